#include "sentrade/classify.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace sentrade {
namespace {

using testing::error_code_of;

TrainingData two_points() {
    TrainingData d;
    d.x.resize(2, 1);
    d.x << 0.0, 1.0;
    d.y.resize(2);
    d.y << -1, 1;
    d.feature_names = {"x"};
    return d;
}

std::vector<double> descending_grid() {
    std::vector<double> cs;
    for (int i = 9; i >= 0; --i) cs.push_back(0.01 * std::pow(10.0, i * 4.0 / 9.0));
    return cs;
}

TEST(LogReg, SeparableTwoPointsLargeC) {
    const auto d = two_points();
    const auto m = train_logreg_l1(d, 1000.0);
    EXPECT_DOUBLE_EQ(evaluate(m, d).accuracy, 1.0);
    EXPECT_GT(m.weights[0], 0.0);
}

TEST(LogReg, TinyCZeroesEveryWeight) {
    const auto d = testing::planted_signal_data(1, 100, 4, 0.0);
    const auto m = train_logreg_l1(d, 1e-6);
    for (Eigen::Index j = 0; j < m.weights.size(); ++j) EXPECT_EQ(m.weights[j], 0.0);
    EXPECT_EQ(m.nonzero_weights(), 0u);
    // bias-only optimum is the log-odds of the positive class
    const double pos = static_cast<double>(d.count(1));
    EXPECT_NEAR(m.bias, std::log(pos / (100.0 - pos)), 1e-6);
}

TEST(LogReg, PlantedNoiseWeightExactlyZeroAndMatchesGridOracle) {
    const auto d = testing::planted_l1_data(3);
    const double c = 10.0;
    const auto m = train_logreg_l1(d, c);
    EXPECT_EQ(m.weights[1], 0.0);
    EXPECT_GT(m.weights[0], 0.0);
    const auto oracle = testing::grid_search_logreg(d, c);
    EXPECT_NEAR(m.diagnostics.objective, oracle.objective, 1e-4);
    EXPECT_LE(m.diagnostics.objective, oracle.objective + 1e-9);
    // closed form for this construction: sigma(-w/2) = 1 / (C * 0.5)
    EXPECT_NEAR(m.weights[0], 2.0 * std::log(c * 0.5 - 1.0), 1e-4);
}

TEST(LogReg, ObjectiveAgreesWithOracleArithmetic) {
    const auto d = testing::planted_signal_data(4, 30, 1, 0.2);
    Eigen::VectorXd w(2);
    w << 0.7, -0.3;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < 30; ++i) {
        const double z = 0.7 * d.x(i, 0) - 0.3 * d.x(i, 1) + 0.1;
        loss += std::log1p(std::exp(-d.y[i] * z));
    }
    EXPECT_NEAR(logreg_objective(d, w, 0.1, 2.0), loss / 30.0 + 1.0 / 2.0, 1e-12);
}

TEST(LogReg, OptimalityResidualAndDescentOnManyRuns) {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto d = testing::planted_signal_data(seed, 150, 6, 0.15);
        for (double c : {0.1, 1.0, 10.0, 100.0}) {
            const auto m = train_logreg_l1(d, c);
            EXPECT_LT(logreg_optimality_residual(d, m.weights, m.bias, c), 1e-5)
                << "seed " << seed << " C " << c;
            const Eigen::VectorXd zero = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(d.dims()));
            EXPECT_LE(m.diagnostics.objective, logreg_objective(d, zero, 0.0, c));
            EXPECT_TRUE(m.weights.allFinite());
        }
    }
}

TEST(LogReg, SparsityNonIncreasingAsCDecreases) {
    int good_seeds = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = testing::planted_signal_data(seed, 200, 8, 0.2);
        std::size_t prev = d.dims();
        bool ok = true;
        for (double c : descending_grid()) {
            const auto nz = train_logreg_l1(d, c).nonzero_weights();
            ok = ok && nz <= prev;
            prev = nz;
        }
        EXPECT_EQ(prev, 0u) << "seed " << seed;
        good_seeds += ok;
    }
    EXPECT_EQ(good_seeds, 10);
}

TEST(LogReg, SingleClassRejected) {
    auto d = two_points();
    d.y << 1, 1;
    EXPECT_EQ(error_code_of([&] { train_logreg_l1(d, 1.0); }), ErrorCode::SingleClassTraining);
    EXPECT_THROW(train_logreg_l1(two_points(), 0.0), std::invalid_argument);
}

TEST(LogReg, PredictTieAndDotProduct) {
    LogRegModel m;
    m.weights = Eigen::VectorXd::Zero(2);
    m.feature_names = {"a", "b"};
    const std::vector<double> row = {0.8, 0.3};
    auto p = predict(m, row);
    EXPECT_EQ(p.label, 1);
    EXPECT_EQ(p.score, 0.0);
    m.weights << 1.0, 0.0;
    p = predict(m, row);
    EXPECT_EQ(p.label, 1);
    EXPECT_DOUBLE_EQ(p.score, 0.8);
    m.bias = -0.9;
    EXPECT_EQ(predict(m, row).label, -1);
}

}  // namespace
}  // namespace sentrade
