#include "sentrade/backtest.hpp"
#include "sentrade/error.hpp"
#include "sentrade/text_io.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace sentrade::backtest {

namespace {

std::vector<std::size_t> column_map(std::span<const std::string> wanted,
                                    std::span<const std::string> available) {
    std::vector<std::size_t> idx;
    for (const auto& name : wanted) {
        const auto it = std::find(available.begin(), available.end(), name);
        if (it == available.end()) {
            throw Error(ErrorCode::FeatureMismatch, "strategy needs missing feature '" + name + "'");
        }
        idx.push_back(static_cast<std::size_t>(it - available.begin()));
    }
    return idx;
}

std::vector<double> project(const FeatureRow& row, const std::vector<std::size_t>& idx) {
    std::vector<double> out;
    out.reserve(idx.size());
    for (auto i : idx) out.push_back(row.values.at(i));
    return out;
}

/// Produces one position per day; Q-learning keeps its own mutable weights.
class PositionSource {
public:
    PositionSource(const Signal& signal, std::span<const FeatureRow> rows,
                   std::span<const std::string> names, std::span<const double> next)
        : signal_(signal), rows_(rows), next_(next) {
        if (const auto* q = std::get_if<QLearningSignal>(&signal_)) {
            idx_ = column_map(q->weights.market_features, names);
            weights_ = q->weights;
        } else if (const auto* c = std::get_if<ClassifierSignal>(&signal_)) {
            idx_ = column_map(feature_names(c->model), names);
        }
    }

    int position(std::size_t t, int prev, double equity) {
        if (std::holds_alternative<OracleSignal>(signal_)) return sign_label(next_[t]);
        if (const auto* c = std::get_if<ClassifierSignal>(&signal_)) {
            const auto x = project(rows_[t], idx_);
            return predict(c->model, x).label;
        }
        const auto& q = std::get<QLearningSignal>(signal_);
        const qlearn::AgentState s{project(rows_[t], idx_), prev, equity};
        const auto a = qlearn::greedy_action(weights_, s, q.cfg);
        const int pos = qlearn::apply_action(a, prev);
        if (q.online_updates) {
            const double reward = pos * next_[t];
            const double next_equity = equity * (1.0 + reward);
            if (t + 1 < rows_.size()) {
                const qlearn::AgentState s_next{project(rows_[t + 1], idx_), pos, next_equity};
                qlearn::update(weights_, s, a, reward, s_next, q.cfg);
            } else {
                qlearn::update_terminal(weights_, s, a, reward, q.cfg);
            }
        }
        return pos;
    }

private:
    const Signal& signal_;
    std::span<const FeatureRow> rows_;
    std::span<const double> next_;
    std::vector<std::size_t> idx_;
    qlearn::QWeights weights_;
};

}  // namespace

Strategy Strategy::q_learning(qlearn::QWeights w, qlearn::EpisodeConfig cfg, bool online_updates) {
    return {"q_learning", QLearningSignal{std::move(w), cfg, online_updates}};
}

Strategy Strategy::ml_signal(Classifier model) {
    return {"ml_signal", ClassifierSignal{std::move(model)}};
}

Strategy Strategy::baseline(Classifier model) {
    return {"baseline", ClassifierSignal{std::move(model)}};
}

Strategy Strategy::oracle() { return {"oracle", OracleSignal{}}; }

EquityCurve run(const Strategy& strategy, std::span<const FeatureRow> test,
                std::span<const std::string> feature_names, const TargetSeries& targets,
                double cost_per_trade) {
    if (test.empty()) throw Error(ErrorCode::EmptyTest, "backtest needs at least one test day");
    if (!(cost_per_trade >= 0.0)) throw std::invalid_argument("cost per trade must be >= 0");

    std::vector<double> next(test.size());
    for (std::size_t t = 0; t < test.size(); ++t) next[t] = targets.next_return(test[t].date);

    PositionSource source(strategy.signal, test, feature_names, next);
    EquityCurve curve{strategy.name, {}};
    curve.points.reserve(test.size());
    int prev = 0;
    double equity = 1.0;
    for (std::size_t t = 0; t < test.size(); ++t) {
        const int pos = source.position(t, prev, equity);
        const double ret = pos * next[t] - cost_per_trade * std::abs(pos - prev);
        equity *= 1.0 + ret;
        curve.points.push_back({test[t].date, pos, ret, equity});
        prev = pos;
    }
    return curve;
}

Metrics metrics(const EquityCurve& curve) {
    Metrics m;
    m.name = curve.name;
    if (curve.points.empty()) return m;
    m.final_equity = curve.points.back().equity;
    m.annualized_return =
        std::pow(m.final_equity, 252.0 / static_cast<double>(curve.points.size())) - 1.0;
    double peak = 1.0;
    std::size_t invested = 0;
    std::size_t hits = 0;
    for (const auto& p : curve.points) {
        peak = std::max(peak, p.equity);
        m.max_drawdown = std::max(m.max_drawdown, 1.0 - p.equity / peak);
        if (p.position != 0) {
            ++invested;
            hits += p.ret > 0.0 ? 1 : 0;
        }
    }
    m.hit_rate = invested == 0 ? 0.0 : static_cast<double>(hits) / static_cast<double>(invested);
    return m;
}

std::vector<Metrics> compare(std::span<const EquityCurve> curves) {
    for (const auto& c : curves) {
        const auto& ref = curves.front().points;
        const bool same = c.points.size() == ref.size() &&
                          std::equal(c.points.begin(), c.points.end(), ref.begin(),
                                     [](const EquityPoint& a, const EquityPoint& b) {
                                         return a.date == b.date;
                                     });
        if (!same) {
            throw Error(ErrorCode::DateRangeMismatch,
                        "curve '" + c.name + "' covers different dates than '" +
                            curves.front().name + "'");
        }
    }
    std::vector<Metrics> table;
    for (const auto& c : curves) table.push_back(metrics(c));
    std::stable_sort(table.begin(), table.end(), [](const Metrics& a, const Metrics& b) {
        return a.final_equity > b.final_equity;
    });
    return table;
}

std::string format_curve_csv(const EquityCurve& curve) {
    std::string out = "date,position,ret,equity\n";
    for (const auto& p : curve.points) {
        out += fmt::format("{},{},{},{}\n", p.date.to_string(), p.position,
                           io::format_double(p.ret), io::format_double(p.equity));
    }
    return out;
}

EquityCurve parse_curve_csv(std::string_view csv, std::string name) {
    EquityCurve curve{std::move(name), {}};
    const auto ls = io::lines(csv);
    if (ls.empty() || io::trim(ls[0]) != "date,position,ret,equity") {
        throw Error(ErrorCode::MissingColumn, "equity CSV header must be date,position,ret,equity");
    }
    for (std::size_t i = 1; i < ls.size(); ++i) {
        if (io::trim(ls[i]).empty()) continue;
        const auto f = io::split(ls[i], ',');
        const auto date = f.size() == 4 ? Date::parse(f[0]) : std::nullopt;
        const auto pos = f.size() == 4 ? io::parse_double(f[1]) : std::nullopt;
        const auto ret = f.size() == 4 ? io::parse_double(f[2]) : std::nullopt;
        const auto eq = f.size() == 4 ? io::parse_double(f[3]) : std::nullopt;
        if (!date || !pos || !ret || !eq) {
            throw Error(ErrorCode::MalformedRow, fmt::format("row {}: cannot parse equity record", i));
        }
        curve.points.push_back({*date, static_cast<int>(*pos), *ret, *eq});
    }
    return curve;
}

std::string format_comparison_csv(std::span<const Metrics> table) {
    std::string out = "strategy,final_equity,annualized_return,max_drawdown,hit_rate\n";
    for (const auto& m : table) {
        out += fmt::format("{},{},{},{},{}\n", m.name, io::format_double(m.final_equity),
                           io::format_double(m.annualized_return),
                           io::format_double(m.max_drawdown), io::format_double(m.hit_rate));
    }
    return out;
}

std::string render_svg(std::span<const EquityCurve> curves) {
    constexpr double kWidth = 800;
    constexpr double kHeight = 400;
    constexpr double kPad = 40;
    static constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#7f7f7f",
                                              "#9467bd", "#ff7f0e"};

    double lo = 1.0;
    double hi = 1.0;
    std::size_t n = 0;
    for (const auto& c : curves) {
        n = std::max(n, c.points.size());
        for (const auto& p : c.points) {
            lo = std::min(lo, p.equity);
            hi = std::max(hi, p.equity);
        }
    }
    if (hi - lo < 1e-9) hi = lo + 1.0;
    const double x_step = n > 1 ? (kWidth - 2 * kPad) / static_cast<double>(n - 1) : 0.0;
    auto y_of = [&](double e) { return kHeight - kPad - (e - lo) / (hi - lo) * (kHeight - 2 * kPad); };

    std::string out = fmt::format(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" "
        "viewBox=\"0 0 {} {}\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
        kWidth, kHeight, kWidth, kHeight);
    out += fmt::format(
        "<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ccc\" "
        "stroke-dasharray=\"4\"/>\n",
        kPad, y_of(1.0), kWidth - kPad);
    out += fmt::format("<text x=\"4\" y=\"{:.2f}\" font-size=\"10\">{:.3g}</text>\n", y_of(hi) + 4, hi);
    out += fmt::format("<text x=\"4\" y=\"{:.2f}\" font-size=\"10\">{:.3g}</text>\n", y_of(lo) + 4, lo);
    if (!curves.empty() && !curves.front().points.empty()) {
        const auto& pts = curves.front().points;
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\">{}</text>\n", kPad,
                           kHeight - 10, pts.front().date.to_string());
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"10\" text-anchor=\"end\">{}</text>\n",
                           kWidth - kPad, kHeight - 10, pts.back().date.to_string());
    }
    for (std::size_t k = 0; k < curves.size(); ++k) {
        const char* color = kColors[k % std::size(kColors)];
        std::string pts;
        for (std::size_t i = 0; i < curves[k].points.size(); ++i) {
            pts += fmt::format("{}{:.2f},{:.2f}", i == 0 ? "" : " ",
                               kPad + x_step * static_cast<double>(i),
                               y_of(curves[k].points[i].equity));
        }
        out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                           color, pts);
        out += fmt::format("<text x=\"{}\" y=\"{}\" font-size=\"12\" fill=\"{}\">{}</text>\n",
                           kPad + 10, kPad + 14 * static_cast<double>(k), color, curves[k].name);
    }
    out += "</svg>\n";
    return out;
}

}  // namespace sentrade::backtest
