#include "sentrade/classify.hpp"
#include "sentrade/error.hpp"
#include "sentrade/rng.hpp"
#include "sentrade/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <json.hpp>

namespace sentrade {

namespace {

using ojson = nlohmann::ordered_json;

constexpr double kTieTol = 1e-12;

/// Predicts one label for everything; used when a CV training fold holds a
/// single class.
struct ConstantModel {
    int label = 1;
};

double accuracy_of(const auto& predict_fn, const TrainingData& test) {
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
        const Eigen::VectorXd row = test.x.row(i).transpose();
        hits += predict_fn(std::span<const double>(row.data(), row.size())) ==
                        static_cast<int>(test.y[i])
                    ? 1
                    : 0;
    }
    return static_cast<double>(hits) / static_cast<double>(test.size());
}

double fold_accuracy(const TrainingData& train, const TrainingData& test, ModelKind kind,
                     const HyperPoint& point) {
    if (train.count(1) == 0 || train.count(-1) == 0) {
        const ConstantModel constant{train.count(1) > 0 ? 1 : -1};
        return accuracy_of([&](std::span<const double>) { return constant.label; }, test);
    }
    const Classifier model = fit(train, kind, point);
    return accuracy_of([&](std::span<const double> row) { return predict(model, row).label; },
                       test);
}

bool better_point(double acc, const HyperPoint& p, double best_acc, const HyperPoint& best) {
    if (acc > best_acc + kTieTol) return true;
    if (acc < best_acc - kTieTol) return false;
    if (p.c != best.c) return p.c < best.c;
    return p.gamma < best.gamma;
}

std::vector<double> permutation_importance(const Classifier& model, const TrainingData& data,
                                           std::uint64_t seed, std::size_t step) {
    const auto predict_label = [&](std::span<const double> row) {
        return predict(model, row).label;
    };
    const double base = accuracy_of(predict_label, data);
    std::vector<double> importance(data.dims());
    for (std::size_t j = 0; j < data.dims(); ++j) {
        TrainingData shuffled = data;
        Rng rng(seed, (static_cast<std::uint64_t>(step) << 32) | j);
        for (std::size_t i = data.size(); i > 1; --i) {
            const auto k = rng.index(i);
            std::swap(shuffled.x(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j)),
                      shuffled.x(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)));
        }
        importance[j] = base - accuracy_of(predict_label, shuffled);
    }
    return importance;
}

std::vector<double> to_vector(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

}  // namespace

// ─── TrainingData ───────────────────────────────────────────────────────────

TrainingData TrainingData::from_rows(std::span<const FeatureRow> rows,
                                     std::vector<std::string> feature_names) {
    TrainingData d;
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto m = static_cast<Eigen::Index>(feature_names.size());
    d.x.resize(n, m);
    d.y.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        if (static_cast<Eigen::Index>(r.values.size()) != m) {
            throw Error(ErrorCode::FeatureMismatch,
                        fmt::format("row {} has {} values, expected {}", r.date.to_string(),
                                    r.values.size(), m));
        }
        for (Eigen::Index j = 0; j < m; ++j) d.x(i, j) = r.values[static_cast<std::size_t>(j)];
        d.y[i] = r.label >= 0 ? 1.0 : -1.0;
    }
    d.feature_names = std::move(feature_names);
    return d;
}

std::size_t TrainingData::count(int label) const {
    std::size_t k = 0;
    for (Eigen::Index i = 0; i < y.size(); ++i) k += (y[i] > 0) == (label > 0) ? 1 : 0;
    return k;
}

TrainingData TrainingData::slice(std::size_t begin, std::size_t end) const {
    TrainingData d;
    const auto b = static_cast<Eigen::Index>(begin);
    const auto len = static_cast<Eigen::Index>(end - begin);
    d.x = x.middleRows(b, len);
    d.y = y.segment(b, len);
    d.feature_names = feature_names;
    return d;
}

TrainingData TrainingData::without(std::size_t begin, std::size_t end) const {
    TrainingData d;
    const auto b = static_cast<Eigen::Index>(begin);
    const auto e = static_cast<Eigen::Index>(end);
    const auto n = x.rows();
    d.x.resize(n - (e - b), x.cols());
    d.y.resize(n - (e - b));
    d.x.topRows(b) = x.topRows(b);
    d.y.head(b) = y.head(b);
    d.x.bottomRows(n - e) = x.bottomRows(n - e);
    d.y.tail(n - e) = y.tail(n - e);
    d.feature_names = feature_names;
    return d;
}

TrainingData TrainingData::columns(std::span<const std::size_t> cols) const {
    TrainingData d;
    d.x.resize(x.rows(), static_cast<Eigen::Index>(cols.size()));
    for (std::size_t k = 0; k < cols.size(); ++k) {
        d.x.col(static_cast<Eigen::Index>(k)) = x.col(static_cast<Eigen::Index>(cols[k]));
        d.feature_names.push_back(feature_names[cols[k]]);
    }
    d.y = y;
    return d;
}

// ─── Prediction ─────────────────────────────────────────────────────────────

Prediction predict(const LogRegModel& model, std::span<const double> row) {
    if (row.size() != static_cast<std::size_t>(model.weights.size())) {
        throw Error(ErrorCode::FeatureMismatch,
                    fmt::format("row has {} values, model expects {}", row.size(),
                                model.weights.size()));
    }
    const Eigen::Map<const Eigen::VectorXd> x(row.data(), static_cast<Eigen::Index>(row.size()));
    const double score = model.weights.dot(x) + model.bias;
    return {sign_label(score), score};
}

Prediction predict(const SvmModel& model, std::span<const double> row) {
    if (row.size() != static_cast<std::size_t>(model.support_vectors.cols()) &&
        model.support_vectors.rows() > 0) {
        throw Error(ErrorCode::FeatureMismatch,
                    fmt::format("row has {} values, model expects {}", row.size(),
                                model.support_vectors.cols()));
    }
    const Eigen::Map<const Eigen::VectorXd> x(row.data(), static_cast<Eigen::Index>(row.size()));
    double score = model.bias;
    for (Eigen::Index i = 0; i < model.support_vectors.rows(); ++i) {
        score += model.alphas[i] * model.sv_labels[i] *
                 rbf_kernel(model.support_vectors.row(i).transpose(), x, model.gamma);
    }
    return {sign_label(score), score};
}

Prediction predict(const Classifier& model, std::span<const double> row) {
    return std::visit([&](const auto& m) { return predict(m, row); }, model);
}

Prediction predict(const Classifier& model, std::span<const double> row,
                   std::span<const std::string> names) {
    const auto& expected = feature_names(model);
    if (!std::equal(expected.begin(), expected.end(), names.begin(), names.end())) {
        throw Error(ErrorCode::FeatureMismatch, "row feature names differ from the model's");
    }
    return predict(model, row);
}

const std::vector<std::string>& feature_names(const Classifier& model) {
    return std::visit([](const auto& m) -> const std::vector<std::string>& {
        return m.feature_names;
    }, model);
}

Evaluation evaluate(const Classifier& model, const TrainingData& test) {
    if (test.size() == 0) throw Error(ErrorCode::EmptyTest, "no test rows");
    const auto& expected = feature_names(model);
    if (expected != test.feature_names) {
        throw Error(ErrorCode::FeatureMismatch, "test feature names differ from the model's");
    }
    Evaluation ev;
    for (Eigen::Index i = 0; i < test.x.rows(); ++i) {
        const Eigen::VectorXd row = test.x.row(i).transpose();
        const int p = predict(model, std::span<const double>(row.data(), row.size())).label;
        const bool truth = test.y[i] > 0;
        if (p > 0) {
            ++(truth ? ev.confusion.true_pos : ev.confusion.false_pos);
        } else {
            ++(truth ? ev.confusion.false_neg : ev.confusion.true_neg);
        }
    }
    ev.accuracy = static_cast<double>(ev.confusion.true_pos + ev.confusion.true_neg) /
                  static_cast<double>(ev.confusion.total());
    return ev;
}

// ─── Model selection ────────────────────────────────────────────────────────

std::string_view to_string(ModelKind kind) {
    return kind == ModelKind::LogReg ? "logreg" : "svm";
}

HyperGrid HyperGrid::logreg(std::vector<double> cs) {
    HyperGrid g{ModelKind::LogReg, {}};
    for (double c : cs) g.points.push_back({c, 0.0});
    return g;
}

HyperGrid HyperGrid::svm(std::vector<double> cs, std::vector<double> gammas) {
    HyperGrid g{ModelKind::Svm, {}};
    for (double c : cs) {
        for (double gamma : gammas) g.points.push_back({c, gamma});
    }
    return g;
}

Classifier fit(const TrainingData& data, ModelKind kind, const HyperPoint& point) {
    if (kind == ModelKind::LogReg) return train_logreg_l1(data, point.c);
    return train_svm_rbf(data, point.c, point.gamma);
}

CvReport cross_validate(const TrainingData& train, const HyperGrid& grid, int k) {
    if (k < 2) throw std::invalid_argument("cross_validate: need at least 2 folds");
    if (grid.points.empty()) throw std::invalid_argument("cross_validate: empty grid");
    const auto folds = static_cast<std::size_t>(k);
    if (train.count(1) < folds || train.count(-1) < folds) {
        throw Error(ErrorCode::TooFewRows,
                    fmt::format("{}-fold CV needs {} rows per class; got {} positive, {} negative",
                                k, k, train.count(1), train.count(-1)));
    }

    CvReport report;
    report.kind = grid.kind;
    report.grid = grid.points;
    const std::size_t n = train.size();
    std::vector<TrainingData> fold_train;
    std::vector<TrainingData> fold_test;
    for (std::size_t f = 0; f < folds; ++f) {
        const std::size_t begin = f * n / folds;
        const std::size_t end = (f + 1) * n / folds;
        fold_train.push_back(train.without(begin, end));
        fold_test.push_back(train.slice(begin, end));
    }

    for (const auto& point : grid.points) {
        std::vector<double> accs;
        for (std::size_t f = 0; f < folds; ++f) {
            accs.push_back(fold_accuracy(fold_train[f], fold_test[f], grid.kind, point));
        }
        report.mean_accuracy.push_back(std::accumulate(accs.begin(), accs.end(), 0.0) /
                                       static_cast<double>(folds));
        report.fold_accuracy.push_back(std::move(accs));
    }

    report.best = 0;
    for (std::size_t p = 1; p < report.grid.size(); ++p) {
        if (better_point(report.mean_accuracy[p], report.grid[p],
                         report.mean_accuracy[report.best], report.grid[report.best])) {
            report.best = p;
        }
    }
    return report;
}

RfecvResult rfecv(const TrainingData& train, const HyperGrid& grid, int k, std::uint64_t seed) {
    if (train.dims() == 0) throw Error(ErrorCode::TooFewFeatures, "no features to select from");

    RfecvResult result;
    std::vector<std::size_t> active(train.dims());
    std::iota(active.begin(), active.end(), std::size_t{0});

    std::size_t best_step = 0;
    while (true) {
        const TrainingData sub = train.columns(active);
        const CvReport cv = cross_validate(sub, grid, k);
        RfecvStep step{sub.feature_names, cv.best_accuracy(), cv.best_point(), {}};

        if (!result.trace.empty() &&
            step.cv_accuracy >= result.trace[best_step].cv_accuracy - kTieTol) {
            best_step = result.trace.size();
        }

        if (active.size() == 1) {
            result.trace.push_back(std::move(step));
            break;
        }

        const Classifier model = fit(sub, grid.kind, cv.best_point());
        std::vector<double> importance;
        if (const auto* lr = std::get_if<LogRegModel>(&model)) {
            importance = to_vector(lr->weights.cwiseAbs());
        } else {
            importance = permutation_importance(model, sub, seed, result.trace.size());
        }
        const auto weakest = static_cast<std::size_t>(
            std::min_element(importance.begin(), importance.end()) - importance.begin());
        step.dropped = sub.feature_names[weakest];
        active.erase(active.begin() + static_cast<std::ptrdiff_t>(weakest));
        result.trace.push_back(std::move(step));
    }

    result.selected = result.trace[best_step].features;
    return result;
}

// ─── Serialization ──────────────────────────────────────────────────────────

std::string classifier_to_json(const Classifier& model) {
    ojson j;
    if (const auto* lr = std::get_if<LogRegModel>(&model)) {
        j["kind"] = "logreg";
        j["c"] = lr->c_param;
        j["feature_names"] = lr->feature_names;
        j["weights"] = to_vector(lr->weights);
        j["bias"] = lr->bias;
        j["diagnostics"] = {{"iterations", lr->diagnostics.iterations},
                            {"objective", lr->diagnostics.objective},
                            {"optimality_residual", lr->diagnostics.optimality_residual},
                            {"converged", lr->diagnostics.converged}};
    } else {
        const auto& sv = std::get<SvmModel>(model);
        j["kind"] = "svm";
        j["c"] = sv.c_param;
        j["gamma"] = sv.gamma;
        j["feature_names"] = sv.feature_names;
        j["bias"] = sv.bias;
        j["alphas"] = to_vector(sv.alphas);
        j["sv_labels"] = to_vector(sv.sv_labels);
        ojson rows = ojson::array();
        for (Eigen::Index i = 0; i < sv.support_vectors.rows(); ++i) {
            rows.push_back(to_vector(sv.support_vectors.row(i).transpose()));
        }
        j["support_vectors"] = std::move(rows);
        j["diagnostics"] = {{"pair_updates", sv.diagnostics.pair_updates},
                            {"max_violation", sv.diagnostics.max_violation},
                            {"dual_objective", sv.diagnostics.dual_objective}};
    }
    return j.dump(2) + "\n";
}

Classifier classifier_from_json(std::string_view json) {
    try {
        const auto j = nlohmann::json::parse(json);
        const auto kind = j.at("kind").get<std::string>();
        if (kind == "logreg") {
            LogRegModel m;
            m.c_param = j.at("c").get<double>();
            m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
            m.weights = to_eigen(j.at("weights").get<std::vector<double>>());
            m.bias = j.at("bias").get<double>();
            if (m.weights.size() != static_cast<Eigen::Index>(m.feature_names.size())) {
                throw Error(ErrorCode::FeatureMismatch, "weights and feature names differ in length");
            }
            const auto& d = j.at("diagnostics");
            m.diagnostics.iterations = d.at("iterations").get<int>();
            m.diagnostics.objective = d.at("objective").get<double>();
            m.diagnostics.optimality_residual = d.at("optimality_residual").get<double>();
            m.diagnostics.converged = d.at("converged").get<bool>();
            return m;
        }
        if (kind == "svm") {
            SvmModel m;
            m.c_param = j.at("c").get<double>();
            m.gamma = j.at("gamma").get<double>();
            m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
            m.bias = j.at("bias").get<double>();
            m.alphas = to_eigen(j.at("alphas").get<std::vector<double>>());
            m.sv_labels = to_eigen(j.at("sv_labels").get<std::vector<double>>());
            const auto rows = j.at("support_vectors").get<std::vector<std::vector<double>>>();
            const auto dims = static_cast<Eigen::Index>(m.feature_names.size());
            m.support_vectors.resize(static_cast<Eigen::Index>(rows.size()), dims);
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (static_cast<Eigen::Index>(rows[i].size()) != dims) {
                    throw Error(ErrorCode::FeatureMismatch, "support vector width differs from feature names");
                }
                m.support_vectors.row(static_cast<Eigen::Index>(i)) = to_eigen(rows[i]).transpose();
            }
            const auto& d = j.at("diagnostics");
            m.diagnostics.pair_updates = d.at("pair_updates").get<std::size_t>();
            m.diagnostics.max_violation = d.at("max_violation").get<double>();
            m.diagnostics.dual_objective = d.at("dual_objective").get<double>();
            return m;
        }
        throw std::invalid_argument("unknown model kind '" + kind + "'");
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed model JSON: ") + e.what());
    }
}

std::string format_cv_report(const CvReport& report) {
    std::string out = "c,gamma";
    const std::size_t folds = report.fold_accuracy.empty() ? 0 : report.fold_accuracy[0].size();
    for (std::size_t f = 0; f < folds; ++f) out += fmt::format(",fold_{}", f + 1);
    out += ",mean_accuracy,best\n";
    for (std::size_t p = 0; p < report.grid.size(); ++p) {
        out += io::format_double(report.grid[p].c) + "," + io::format_double(report.grid[p].gamma);
        for (double a : report.fold_accuracy[p]) out += "," + io::format_double(a);
        out += "," + io::format_double(report.mean_accuracy[p]) + (p == report.best ? ",1\n" : ",0\n");
    }
    return out;
}

}  // namespace sentrade
