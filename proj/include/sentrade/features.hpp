#pragma once

#include "sentrade/date.hpp"
#include "sentrade/ingest.hpp"
#include "sentrade/tweetprep.hpp"

#include <algorithm>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sentrade {

struct FeatureWindows {
    int momentum = 5;
    int volatility = 10;
    int sent_momentum = 3;
    int sent_reversal = 5;

    int technical_max() const { return std::max(momentum, volatility); }
    int sentiment_max() const { return std::max(sent_momentum, sent_reversal); }
    bool operator==(const FeatureWindows&) const = default;
};

/// Raw (unnormalized) per-day features; rows[i] lines up with dates[i] and
/// columns with names.
struct FeatureTable {
    std::vector<Date> dates;
    std::vector<std::string> names;
    std::vector<std::vector<double>> rows;
};

std::vector<std::string> technical_feature_names(const FeatureWindows& w);
std::vector<std::string> sentiment_feature_names(const FeatureWindows& w);

/// ret_1 (log return into the day), volume (that day's volume),
/// momentum_k (k-day cumulative log return), vol_k (population std of the
/// last k daily log returns). The first max-window days are dropped.
FeatureTable technical_features(std::span<const PriceBar> bars, const FeatureWindows& w = {});

/// tweet_count, sent_mean, sent_xvol, sent_mom_k (m_t - m_{t-k}) and
/// sent_rev = rolling k-day mean (including today) minus m_t.
FeatureTable sentiment_features(std::span<const SentimentDay> days, const FeatureWindows& w = {});

/// Per-feature affine min-max map fitted on a training range.
struct MinMaxScaler {
    std::vector<double> lo;
    std::vector<double> hi;

    /// Fits on rows [0, train_rows).
    static MinMaxScaler fit(const std::vector<std::vector<double>>& rows, std::size_t train_rows);

    /// (x - lo) / (hi - lo) clipped to [0, 1]; 0.5 for constant features.
    double transform(std::size_t feature, double x) const;
    std::vector<double> transform(std::span<const double> row) const;
};

struct NormalizedTable {
    FeatureTable table;
    MinMaxScaler scaler;
};

NormalizedTable normalize(const FeatureTable& raw, std::size_t train_rows);

enum class TargetKind { Alpha, TotalReturn };
std::string_view to_string(TargetKind kind);
TargetKind parse_target_kind(std::string_view s);

/// Target return from day t to day t+1 (Alpha: stock minus ETF log return;
/// TotalReturn: stock log return), keyed by day t.
class TargetSeries {
public:
    TargetSeries(std::span<const PriceBar> bars, TargetKind kind);

    /// AlignmentMismatch when `day` has no following bar.
    double next_return(const Date& day) const;
    TargetKind kind() const { return kind_; }

private:
    std::vector<Date> dates_;
    std::vector<double> next_;
    TargetKind kind_;
};

/// Sign label with the zero tie resolved to +1.
inline int sign_label(double x) { return x >= 0.0 ? 1 : -1; }

struct FeatureRow {
    Date date;
    std::vector<double> values;  // ordered as Dataset::feature_names
    int label = 1;               // sign of the next day's target
    TargetKind target_kind = TargetKind::Alpha;
};

struct Dataset {
    std::vector<FeatureRow> rows;
    std::size_t split_index = 0;
    std::vector<std::string> feature_names;
    TargetKind target_kind = TargetKind::Alpha;
    FeatureWindows windows;
    MinMaxScaler scaler;
    std::string tag;

    std::span<const FeatureRow> train() const { return {rows.data(), split_index}; }
    std::span<const FeatureRow> test() const {
        return {rows.data() + split_index, rows.size() - split_index};
    }

    /// Column subset in the requested order; FeatureMismatch for unknown names.
    Dataset select(std::span<const std::string> names) const;
};

/// Joins technical and sentiment features on dates, labels each day with the
/// sign of the next day's target, drops the unlabeled last day, splits at
/// ceil(n/2) and min-max normalizes on the training half.
Dataset build_dataset(std::span<const PriceBar> bars, std::span<const SentimentDay> sent_days,
                      TargetKind target, const FeatureWindows& w = {});

/// `date,label,<features...>` CSV plus a JSON sidecar (split, target,
/// windows, scaler, tag).
std::string format_dataset_csv(const Dataset& ds);
std::string format_dataset_sidecar(const Dataset& ds);
Dataset parse_dataset(std::string_view csv, std::string_view sidecar_json);

}  // namespace sentrade
