#pragma once

#include "sentrade/features.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sentrade {

/// Design matrix plus +/-1 labels for the classifiers.
struct TrainingData {
    Eigen::MatrixXd x;
    Eigen::VectorXd y;
    std::vector<std::string> feature_names;

    static TrainingData from_rows(std::span<const FeatureRow> rows,
                                  std::vector<std::string> feature_names);
    static TrainingData from_dataset_train(const Dataset& ds) {
        return from_rows(ds.train(), ds.feature_names);
    }
    static TrainingData from_dataset_test(const Dataset& ds) {
        return from_rows(ds.test(), ds.feature_names);
    }

    std::size_t size() const { return static_cast<std::size_t>(x.rows()); }
    std::size_t dims() const { return static_cast<std::size_t>(x.cols()); }
    std::size_t count(int label) const;

    /// Rows [begin, end) or everything outside them.
    TrainingData slice(std::size_t begin, std::size_t end) const;
    TrainingData without(std::size_t begin, std::size_t end) const;
    TrainingData columns(std::span<const std::size_t> cols) const;
};

// ─── L1 logistic regression ─────────────────────────────────────────────────

struct LogRegOptions {
    int max_iterations = 10000;
    double objective_tol = 1e-8;
    /// Stationarity residual required alongside the objective test.
    double optimality_tol = 1e-6;
};

struct LogRegDiagnostics {
    int iterations = 0;
    double objective = 0.0;
    double optimality_residual = 0.0;
    bool converged = false;
};

struct LogRegModel {
    Eigen::VectorXd weights;
    double bias = 0.0;
    double c_param = 1.0;
    std::vector<std::string> feature_names;
    LogRegDiagnostics diagnostics;

    std::size_t nonzero_weights() const;
};

/// (1/n) sum log(1 + exp(-y (w.x + b))) + (1/C) ||w||_1
double logreg_objective(const TrainingData& data, const Eigen::VectorXd& w, double b, double c);

/// Infinity norm of the subgradient optimality violation at (w, b): the bias
/// gradient, |g_j + sign(w_j)/C| on the support, max(0, |g_j| - 1/C) off it.
double logreg_optimality_residual(const TrainingData& data, const Eigen::VectorXd& w, double b,
                                  double c);

/// Accelerated proximal gradient (soft-thresholding on w, bias unpenalized)
/// with backtracking and function-value restart.
LogRegModel train_logreg_l1(const TrainingData& data, double c, const LogRegOptions& opt = {});

// ─── RBF-kernel SVM ─────────────────────────────────────────────────────────

struct SvmOptions {
    double tolerance = 1e-3;
    std::size_t max_pair_updates = 100000;
    bool record_dual_trace = false;
};

struct SvmDiagnostics {
    std::size_t pair_updates = 0;
    double max_violation = 0.0;
    double dual_objective = 0.0;
    std::vector<double> dual_trace;  // after each pair update, when requested
};

struct SvmModel {
    Eigen::MatrixXd support_vectors;
    Eigen::VectorXd alphas;     // in (0, C]
    Eigen::VectorXd sv_labels;  // +/-1
    double bias = 0.0;
    double gamma = 1.0;
    double c_param = 1.0;
    std::vector<std::string> feature_names;
    SvmDiagnostics diagnostics;
    /// Full dual vector over the training rows (kept for invariant checks).
    Eigen::VectorXd training_alphas;
    Eigen::VectorXd training_labels;
};

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                  const Eigen::Ref<const Eigen::VectorXd>& b, double gamma);
Eigen::MatrixXd rbf_kernel_matrix(const Eigen::MatrixXd& x, double gamma);

/// Soft-margin dual by SMO with maximal-violating-pair / second-order working
/// set selection; stops once the maximal KKT violation is below tolerance.
SvmModel train_svm_rbf(const TrainingData& data, double c, double gamma,
                       const SvmOptions& opt = {});

// ─── Prediction and evaluation ──────────────────────────────────────────────

using Classifier = std::variant<LogRegModel, SvmModel>;

struct Prediction {
    int label = 1;
    double score = 0.0;
};

Prediction predict(const LogRegModel& model, std::span<const double> row);
Prediction predict(const SvmModel& model, std::span<const double> row);
Prediction predict(const Classifier& model, std::span<const double> row);

/// Checks that `names` equals the model's feature names (FeatureMismatch).
Prediction predict(const Classifier& model, std::span<const double> row,
                   std::span<const std::string> names);

const std::vector<std::string>& feature_names(const Classifier& model);

struct Confusion {
    std::size_t true_pos = 0;
    std::size_t false_pos = 0;
    std::size_t true_neg = 0;
    std::size_t false_neg = 0;

    std::size_t total() const { return true_pos + false_pos + true_neg + false_neg; }
};

struct Evaluation {
    double accuracy = 0.0;
    Confusion confusion;
};

Evaluation evaluate(const Classifier& model, const TrainingData& test);

// ─── Model selection ────────────────────────────────────────────────────────

enum class ModelKind { LogReg, Svm };
std::string_view to_string(ModelKind kind);

struct HyperPoint {
    double c = 1.0;
    double gamma = 0.0;  // unused for LogReg
    bool operator==(const HyperPoint&) const = default;
};

struct HyperGrid {
    ModelKind kind = ModelKind::LogReg;
    std::vector<HyperPoint> points;

    static HyperGrid logreg(std::vector<double> cs = {0.01, 0.1, 1, 10, 100});
    static HyperGrid svm(std::vector<double> cs = {0.01, 0.1, 1, 10, 100},
                         std::vector<double> gammas = {0.01, 0.1, 1, 10});
};

Classifier fit(const TrainingData& data, ModelKind kind, const HyperPoint& point);

struct CvReport {
    ModelKind kind = ModelKind::LogReg;
    std::vector<HyperPoint> grid;
    std::vector<std::vector<double>> fold_accuracy;  // [point][fold]
    std::vector<double> mean_accuracy;
    std::size_t best = 0;

    const HyperPoint& best_point() const { return grid[best]; }
    double best_accuracy() const { return mean_accuracy[best]; }
};

/// k contiguous chronological folds (no shuffling). Best point maximizes the
/// mean held-out accuracy; ties go to smaller C, then smaller gamma.
CvReport cross_validate(const TrainingData& train, const HyperGrid& grid, int k = 3);

struct RfecvStep {
    std::vector<std::string> features;
    double cv_accuracy = 0.0;
    HyperPoint best_point;
    std::string dropped;  // empty on the last step
};

struct RfecvResult {
    std::vector<std::string> selected;
    std::vector<RfecvStep> trace;
};

/// Greedy backward elimination. Each step cross-validates the active set,
/// refits at the best grid point and drops the weakest feature (smallest |w|
/// for LogReg, smallest permutation importance for SVM). Returns the subset
/// with the best CV accuracy along the path, preferring fewer features on ties.
RfecvResult rfecv(const TrainingData& train, const HyperGrid& grid, int k = 3,
                  std::uint64_t seed = 0);

// ─── Serialization ──────────────────────────────────────────────────────────

std::string classifier_to_json(const Classifier& model);
Classifier classifier_from_json(std::string_view json);
std::string format_cv_report(const CvReport& report);

}  // namespace sentrade
