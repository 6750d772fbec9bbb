#include "sentrade/classify.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <chrono>
#include <cmath>

namespace sentrade {
namespace {

using testing::error_code_of;

// Decision function recomputed from the dual vector with its own kernel sum.
double brute_force_decision(const SvmModel& m, const TrainingData& train, const Eigen::VectorXd& z) {
    double f = m.bias;
    for (Eigen::Index i = 0; i < train.x.rows(); ++i) {
        const double d2 = (train.x.row(i).transpose() - z).squaredNorm();
        f += m.training_alphas[i] * train.y[i] * std::exp(-m.gamma * d2);
    }
    return f;
}

double dual_value(const SvmModel& m, const TrainingData& train) {
    const auto k = rbf_kernel_matrix(train.x, m.gamma);
    const Eigen::VectorXd ay = m.training_alphas.cwiseProduct(train.y);
    return m.training_alphas.sum() - 0.5 * ay.dot(k * ay);
}

TEST(Svm, XorSolvedQuickly) {
    const auto d = testing::xor_data();
    const auto start = std::chrono::steady_clock::now();
    const auto m = train_svm_rbf(d, 10.0, 1.0);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_LT(secs, 1.0);
    EXPECT_DOUBLE_EQ(evaluate(m, d).accuracy, 1.0);
    for (Eigen::Index i = 0; i < 4; ++i) {
        const Eigen::VectorXd z = d.x.row(i).transpose();
        const double f = brute_force_decision(m, d, z);
        EXPECT_EQ(f >= 0 ? 1.0 : -1.0, d.y[i]);
        EXPECT_NEAR(predict(m, std::span<const double>(z.data(), 2)).score, f, 1e-12);
    }
    const std::vector<double> corner = {1.0, 1.0};
    EXPECT_EQ(predict(m, corner).label, 1);
}

TEST(Svm, IdenticalVectorsPredictMajority) {
    TrainingData d;
    d.x = Eigen::MatrixXd::Constant(5, 2, 0.3);
    d.y.resize(5);
    d.y << 1, -1, 1, 1, -1;
    d.feature_names = {"a", "b"};
    const auto m = train_svm_rbf(d, 1.0, 1.0);
    const std::vector<double> row = {0.3, 0.3};
    EXPECT_EQ(predict(m, row).label, 1);
    d.y << -1, 1, -1, -1, 1;
    EXPECT_EQ(predict(train_svm_rbf(d, 1.0, 1.0), row).label, -1);
}

TEST(Svm, DuplicatedPatternsLargeGamma) {
    TrainingData d;
    d.x.resize(4, 2);
    d.x << 0.1, 0.2, 0.1, 0.2, 0.9, 0.4, 0.9, 0.4;
    d.y.resize(4);
    d.y << 1, 1, -1, -1;
    d.feature_names = {"a", "b"};
    const auto m = train_svm_rbf(d, 1.0, 100.0);
    EXPECT_DOUBLE_EQ(evaluate(m, d).accuracy, 1.0);
}

TEST(Svm, DualInvariantsOnRandomProblems) {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
        const auto d = testing::xor_signal_data(seed, 60, 2);
        for (double c : {0.1, 1.0, 10.0}) {
            SvmOptions opt;
            opt.record_dual_trace = true;
            const auto m = train_svm_rbf(d, c, 2.0, opt);
            const auto& a = m.training_alphas;
            EXPECT_LE(std::abs(a.dot(d.y)), 1e-6);
            for (Eigen::Index i = 0; i < a.size(); ++i) {
                EXPECT_GE(a[i], 0.0);
                EXPECT_LE(a[i], c);
            }
            const auto& trace = m.diagnostics.dual_trace;
            ASSERT_EQ(trace.size(), m.diagnostics.pair_updates);
            for (std::size_t t = 1; t < trace.size(); ++t) {
                EXPECT_GE(trace[t], trace[t - 1] - 1e-12) << "update " << t;
            }
            ASSERT_FALSE(trace.empty());
            EXPECT_NEAR(trace.back(), dual_value(m, d), 1e-8);
            EXPECT_LT(m.diagnostics.max_violation, 1e-3);
            EXPECT_EQ(static_cast<Eigen::Index>(m.alphas.size()), (a.array() > 0.0).count());
        }
    }
}

TEST(Svm, KernelSymmetricUnitDiagonal) {
    const auto d = testing::planted_signal_data(2, 25, 3, 0.1);
    const auto k = rbf_kernel_matrix(d.x, 0.7);
    for (Eigen::Index i = 0; i < k.rows(); ++i) {
        EXPECT_EQ(k(i, i), 1.0);
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            EXPECT_EQ(k(i, j), k(j, i));
            EXPECT_NEAR(k(i, j), std::exp(-0.7 * (d.x.row(i) - d.x.row(j)).squaredNorm()), 1e-15);
        }
    }
}

TEST(Svm, Errors) {
    auto d = testing::xor_data();
    EXPECT_THROW(train_svm_rbf(d, 0.0, 1.0), std::invalid_argument);
    EXPECT_THROW(train_svm_rbf(d, 1.0, -1.0), std::invalid_argument);
    SvmOptions tight;
    tight.max_pair_updates = 1;
    EXPECT_EQ(error_code_of([&] { train_svm_rbf(testing::xor_signal_data(1, 80, 2), 10.0, 1.0, tight); }),
              ErrorCode::NoConvergence);
    d.y.setConstant(-1.0);
    EXPECT_EQ(error_code_of([&] { train_svm_rbf(d, 1.0, 1.0); }), ErrorCode::SingleClassTraining);
}

}  // namespace
}  // namespace sentrade
