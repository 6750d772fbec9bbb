#pragma once

#include "sentrade/classify.hpp"
#include "sentrade/features.hpp"
#include "sentrade/qlearn.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sentrade::backtest {

struct QLearningSignal {
    qlearn::QWeights weights;
    qlearn::EpisodeConfig cfg;
    bool online_updates = true;
};

/// Long on a + prediction, short on a -.
struct ClassifierSignal {
    Classifier model;
};

/// Perfect foresight: position = sign of the next-day target return.
struct OracleSignal {};

using Signal = std::variant<QLearningSignal, ClassifierSignal, OracleSignal>;

struct Strategy {
    std::string name;
    Signal signal;

    static Strategy q_learning(qlearn::QWeights w, qlearn::EpisodeConfig cfg,
                               bool online_updates = true);
    static Strategy ml_signal(Classifier model);
    /// Same mapping as ml_signal; the model is expected to use technical features only.
    static Strategy baseline(Classifier model);
    static Strategy oracle();
};

struct EquityPoint {
    Date date;
    int position = 0;
    double ret = 0.0;  // position * next-day target return - cost
    double equity = 1.0;
};

struct EquityCurve {
    std::string name;
    std::vector<EquityPoint> points;
};

/// Decides at the close of each test day and earns the following day's
/// target return: equity_t = equity_{t-1} (1 + pos_t R_{t+1} - cost |pos_t - pos_{t-1}|),
/// starting flat at equity 1. Strategy inputs are looked up by feature name
/// in `feature_names`.
EquityCurve run(const Strategy& strategy, std::span<const FeatureRow> test,
                std::span<const std::string> feature_names, const TargetSeries& targets,
                double cost_per_trade = 0.0);

struct Metrics {
    std::string name;
    double final_equity = 1.0;
    double annualized_return = 0.0;  // 252 trading days
    double max_drawdown = 0.0;       // largest peak-to-trough fraction
    double hit_rate = 0.0;           // share of invested days with a positive return
};

Metrics metrics(const EquityCurve& curve);

/// Metrics per curve, sorted by final equity (descending, stable).
/// DateRangeMismatch when the curves cover different dates.
std::vector<Metrics> compare(std::span<const EquityCurve> curves);

std::string format_curve_csv(const EquityCurve& curve);
EquityCurve parse_curve_csv(std::string_view csv, std::string name);
std::string format_comparison_csv(std::span<const Metrics> table);
std::string render_svg(std::span<const EquityCurve> curves);

}  // namespace sentrade::backtest
