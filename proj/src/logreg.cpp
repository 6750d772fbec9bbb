#include "sentrade/classify.hpp"
#include "sentrade/error.hpp"

#include <cmath>

#include <fmt/format.h>

namespace sentrade {

namespace {

// log(1 + exp(-m)) without overflow.
double log1p_exp_neg(double m) {
    return m > 0.0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
}

// d/dm log(1 + exp(-m)) = -sigmoid(-m)
double neg_sigmoid_neg(double m) {
    if (m > 0.0) {
        const double e = std::exp(-m);
        return -e / (1.0 + e);
    }
    return -1.0 / (1.0 + std::exp(m));
}

double smooth_loss(const TrainingData& data, const Eigen::VectorXd& w, double b) {
    const Eigen::VectorXd margin = data.y.array() * ((data.x * w).array() + b);
    double s = 0.0;
    for (Eigen::Index i = 0; i < margin.size(); ++i) s += log1p_exp_neg(margin[i]);
    return s / static_cast<double>(data.x.rows());
}

void smooth_gradient(const TrainingData& data, const Eigen::VectorXd& w, double b,
                     Eigen::VectorXd& gw, double& gb) {
    const auto n = data.x.rows();
    Eigen::VectorXd coef(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const double m = data.y[i] * (data.x.row(i).dot(w) + b);
        coef[i] = data.y[i] * neg_sigmoid_neg(m);
    }
    gw = data.x.transpose() * coef / static_cast<double>(n);
    gb = coef.sum() / static_cast<double>(n);
}

double soft_threshold(double v, double t) {
    if (v > t) return v - t;
    if (v < -t) return v + t;
    return 0.0;
}

void require_two_classes(const TrainingData& data) {
    if (data.size() < 2 || data.count(1) == 0 || data.count(-1) == 0) {
        throw Error(ErrorCode::SingleClassTraining,
                    fmt::format("need both classes; got {} positive, {} negative", data.count(1),
                                data.count(-1)));
    }
}

}  // namespace

std::size_t LogRegModel::nonzero_weights() const {
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < weights.size(); ++i) k += weights[i] != 0.0 ? 1 : 0;
    return k;
}

double logreg_objective(const TrainingData& data, const Eigen::VectorXd& w, double b, double c) {
    return smooth_loss(data, w, b) + w.lpNorm<1>() / c;
}

double logreg_optimality_residual(const TrainingData& data, const Eigen::VectorXd& w, double b,
                                  double c) {
    Eigen::VectorXd gw;
    double gb = 0.0;
    smooth_gradient(data, w, b, gw, gb);
    const double lambda = 1.0 / c;
    double r = std::abs(gb);
    for (Eigen::Index j = 0; j < w.size(); ++j) {
        const double v = w[j] != 0.0 ? std::abs(gw[j] + (w[j] > 0.0 ? lambda : -lambda))
                                     : std::max(0.0, std::abs(gw[j]) - lambda);
        r = std::max(r, v);
    }
    return r;
}

LogRegModel train_logreg_l1(const TrainingData& data, double c, const LogRegOptions& opt) {
    if (!(c > 0.0)) throw std::invalid_argument("train_logreg_l1: C must be positive");
    require_two_classes(data);

    const auto d = data.x.cols();
    const double lambda = 1.0 / c;
    const double pos = static_cast<double>(data.count(1));
    const double neg = static_cast<double>(data.count(-1));

    // Start from the bias-only optimum.
    Eigen::VectorXd w = Eigen::VectorXd::Zero(d);
    double b = std::log(pos / neg);
    auto full_objective = [&](const Eigen::VectorXd& ww, double bb) {
        return smooth_loss(data, ww, bb) + lambda * ww.lpNorm<1>();
    };
    double f_x = full_objective(w, b);

    Eigen::VectorXd yw = w;
    double yb = b;
    double momentum = 1.0;
    double lipschitz = 1.0;
    Eigen::VectorXd gw;
    double gb = 0.0;

    LogRegDiagnostics diag;
    int it = 0;
    for (; it < opt.max_iterations; ++it) {
        smooth_gradient(data, yw, yb, gw, gb);
        const double f_y = smooth_loss(data, yw, yb);

        Eigen::VectorXd zw(d);
        double zb = 0.0;
        while (true) {
            const double step = 1.0 / lipschitz;
            for (Eigen::Index j = 0; j < d; ++j) {
                zw[j] = soft_threshold(yw[j] - step * gw[j], step * lambda);
            }
            zb = yb - step * gb;
            const Eigen::VectorXd dw = zw - yw;
            const double db = zb - yb;
            const double model = f_y + gw.dot(dw) + gb * db +
                                 0.5 * lipschitz * (dw.squaredNorm() + db * db);
            if (smooth_loss(data, zw, zb) <= model + 1e-15 * std::abs(model)) break;
            lipschitz *= 2.0;
        }

        const double f_z = full_objective(zw, zb);
        if (f_z > f_x) {
            // Momentum overshoot: restart from the last accepted iterate.
            if (momentum == 1.0 && yw == w && yb == b) {
                // Plain proximal step failed to descend: numerically converged.
                break;
            }
            momentum = 1.0;
            yw = w;
            yb = b;
            continue;
        }

        const double decrease = f_x - f_z;
        const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
        const double beta = (momentum - 1.0) / next_momentum;
        yw = zw + beta * (zw - w);
        yb = zb + beta * (zb - b);
        w = zw;
        b = zb;
        f_x = f_z;
        momentum = next_momentum;

        if (decrease < opt.objective_tol &&
            logreg_optimality_residual(data, w, b, c) < opt.optimality_tol) {
            diag.converged = true;
            ++it;
            break;
        }
    }

    diag.iterations = it;
    diag.objective = f_x;
    diag.optimality_residual = logreg_optimality_residual(data, w, b, c);
    if (!diag.converged) diag.converged = diag.optimality_residual < opt.optimality_tol;

    LogRegModel model;
    model.weights = std::move(w);
    model.bias = b;
    model.c_param = c;
    model.feature_names = data.feature_names;
    model.diagnostics = diag;
    return model;
}

}  // namespace sentrade
