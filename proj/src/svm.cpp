#include "sentrade/classify.hpp"
#include "sentrade/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

namespace sentrade {

namespace {

constexpr double kTau = 1e-12;

}  // namespace

double rbf_kernel(const Eigen::Ref<const Eigen::VectorXd>& a,
                  const Eigen::Ref<const Eigen::VectorXd>& b, double gamma) {
    return std::exp(-gamma * (a - b).squaredNorm());
}

Eigen::MatrixXd rbf_kernel_matrix(const Eigen::MatrixXd& x, double gamma) {
    const auto n = x.rows();
    Eigen::MatrixXd k(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        k(i, i) = 1.0;
        for (Eigen::Index j = i + 1; j < n; ++j) {
            k(i, j) = k(j, i) = std::exp(-gamma * (x.row(i) - x.row(j)).squaredNorm());
        }
    }
    return k;
}

SvmModel train_svm_rbf(const TrainingData& data, double c, double gamma, const SvmOptions& opt) {
    if (!(c > 0.0) || !(gamma > 0.0)) {
        throw std::invalid_argument("train_svm_rbf: C and gamma must be positive");
    }
    if (data.count(1) == 0 || data.count(-1) == 0) {
        throw Error(ErrorCode::SingleClassTraining, "SVM training needs both classes");
    }

    const auto n = data.x.rows();
    const Eigen::VectorXd& y = data.y;
    const Eigen::MatrixXd kernel = rbf_kernel_matrix(data.x, gamma);

    // Minimize f(a) = 1/2 a'Qa - e'a with Q_ij = y_i y_j K_ij, s.t. y'a = 0,
    // 0 <= a <= C. The dual objective reported is -f(a).
    Eigen::VectorXd alpha = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd grad = Eigen::VectorXd::Constant(n, -1.0);

    auto in_up = [&](Eigen::Index t) {
        return (y[t] > 0 && alpha[t] < c) || (y[t] < 0 && alpha[t] > 0);
    };
    auto in_low = [&](Eigen::Index t) {
        return (y[t] > 0 && alpha[t] > 0) || (y[t] < 0 && alpha[t] < c);
    };
    auto dual_objective = [&] { return -0.5 * alpha.dot(grad - Eigen::VectorXd::Ones(n)); };

    SvmDiagnostics diag;
    while (true) {
        // i: maximal violator in I_up.
        double g_max = -std::numeric_limits<double>::infinity();
        Eigen::Index i = -1;
        for (Eigen::Index t = 0; t < n; ++t) {
            if (in_up(t) && -y[t] * grad[t] >= g_max) {
                // >= keeps the later index on exact ties, matching the j scan below
                if (-y[t] * grad[t] > g_max || i < 0) i = t;
                g_max = std::max(g_max, -y[t] * grad[t]);
            }
        }
        // j: second-order choice among I_low entries that violate with i.
        double g_min = std::numeric_limits<double>::infinity();
        Eigen::Index j = -1;
        double best_gain = std::numeric_limits<double>::infinity();
        for (Eigen::Index t = 0; t < n; ++t) {
            if (!in_low(t)) continue;
            const double v = -y[t] * grad[t];
            g_min = std::min(g_min, v);
            if (i >= 0 && v < g_max) {
                const double b = g_max - v;
                double a = kernel(i, i) + kernel(t, t) - 2.0 * kernel(i, t);
                if (a <= 0.0) a = kTau;
                const double gain = -(b * b) / a;
                if (gain < best_gain) {
                    best_gain = gain;
                    j = t;
                }
            }
        }

        diag.max_violation = (i < 0 || !std::isfinite(g_min)) ? 0.0 : g_max - g_min;
        if (diag.max_violation < opt.tolerance || j < 0) break;
        if (diag.pair_updates >= opt.max_pair_updates) {
            throw Error(ErrorCode::NoConvergence,
                        fmt::format("SMO hit {} pair updates with KKT violation {}",
                                    opt.max_pair_updates, diag.max_violation));
        }

        const double old_i = alpha[i];
        const double old_j = alpha[j];
        const double q_ij = y[i] * y[j] * kernel(i, j);
        if (y[i] != y[j]) {
            double quad = kernel(i, i) + kernel(j, j) + 2.0 * q_ij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (-grad[i] - grad[j]) / quad;
            const double diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if (diff > 0.0) {
                if (alpha[j] < 0.0) {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if (diff > 0.0) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if (alpha[j] > c) {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            double quad = kernel(i, i) + kernel(j, j) - 2.0 * q_ij;
            if (quad <= 0.0) quad = kTau;
            const double delta = (grad[i] - grad[j]) / quad;
            const double sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if (sum > c) {
                if (alpha[i] > c) {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if (alpha[j] < 0.0) {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if (sum > c) {
                if (alpha[j] > c) {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if (alpha[i] < 0.0) {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        alpha[i] = std::clamp(alpha[i], 0.0, c);
        alpha[j] = std::clamp(alpha[j], 0.0, c);

        const double d_i = alpha[i] - old_i;
        const double d_j = alpha[j] - old_j;
        for (Eigen::Index t = 0; t < n; ++t) {
            grad[t] += y[t] * (y[i] * kernel(t, i) * d_i + y[j] * kernel(t, j) * d_j);
        }
        ++diag.pair_updates;
        if (opt.record_dual_trace) diag.dual_trace.push_back(dual_objective());
    }

    // Bias from free vectors, or the midpoint of the feasible interval.
    double ub = std::numeric_limits<double>::infinity();
    double lb = -std::numeric_limits<double>::infinity();
    double free_sum = 0.0;
    int free_count = 0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double yg = y[t] * grad[t];
        if (alpha[t] >= c) {
            if (y[t] < 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else if (alpha[t] <= 0.0) {
            if (y[t] > 0) ub = std::min(ub, yg);
            else lb = std::max(lb, yg);
        } else {
            free_sum += yg;
            ++free_count;
        }
    }
    const double rho = free_count > 0 ? free_sum / free_count : 0.5 * (ub + lb);

    SvmModel model;
    model.gamma = gamma;
    model.c_param = c;
    model.bias = -rho;
    model.feature_names = data.feature_names;
    diag.dual_objective = dual_objective();
    model.diagnostics = std::move(diag);
    model.training_alphas = alpha;
    model.training_labels = y;

    std::vector<Eigen::Index> sv;
    for (Eigen::Index t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) sv.push_back(t);
    }
    model.support_vectors.resize(static_cast<Eigen::Index>(sv.size()), data.x.cols());
    model.alphas.resize(static_cast<Eigen::Index>(sv.size()));
    model.sv_labels.resize(static_cast<Eigen::Index>(sv.size()));
    for (std::size_t k = 0; k < sv.size(); ++k) {
        const auto r = static_cast<Eigen::Index>(k);
        model.support_vectors.row(r) = data.x.row(sv[k]);
        model.alphas[r] = alpha[sv[k]];
        model.sv_labels[r] = y[sv[k]];
    }
    return model;
}

}  // namespace sentrade
