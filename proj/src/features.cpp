#include "sentrade/features.hpp"
#include "sentrade/error.hpp"
#include "sentrade/text_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

namespace sentrade {

namespace {

void check_windows(const FeatureWindows& w) {
    if (w.momentum < 1 || w.volatility < 1 || w.sent_momentum < 1 || w.sent_reversal < 1) {
        throw std::invalid_argument("feature windows must be >= 1");
    }
}

double population_std(std::span<const double> xs) {
    double mean = 0.0;
    for (double x : xs) mean += x;
    mean /= static_cast<double>(xs.size());
    double ss = 0.0;
    for (double x : xs) ss += (x - mean) * (x - mean);
    return std::sqrt(ss / static_cast<double>(xs.size()));
}

}  // namespace

std::vector<std::string> technical_feature_names(const FeatureWindows& w) {
    return {"ret_1", "volume", fmt::format("momentum_{}", w.momentum),
            fmt::format("vol_{}", w.volatility)};
}

std::vector<std::string> sentiment_feature_names(const FeatureWindows& w) {
    return {"tweet_count", "sent_mean", "sent_xvol", fmt::format("sent_mom_{}", w.sent_momentum),
            "sent_rev"};
}

FeatureTable technical_features(std::span<const PriceBar> bars, const FeatureWindows& w) {
    check_windows(w);
    const auto first = static_cast<std::size_t>(w.technical_max());
    if (bars.size() < first + 1) {
        throw Error(ErrorCode::InsufficientHistory,
                    fmt::format("{} bars, need at least {}", bars.size(), first + 1));
    }
    std::vector<double> log_ret(bars.size(), 0.0);
    for (std::size_t t = 1; t < bars.size(); ++t) {
        log_ret[t] = std::log(bars[t].close / bars[t - 1].close);
    }

    FeatureTable out;
    out.names = technical_feature_names(w);
    const auto mom = static_cast<std::size_t>(w.momentum);
    const auto vol = static_cast<std::size_t>(w.volatility);
    for (std::size_t t = first; t < bars.size(); ++t) {
        double momentum = 0.0;
        for (std::size_t i = t + 1 - mom; i <= t; ++i) momentum += log_ret[i];
        const double volatility = population_std({log_ret.data() + t + 1 - vol, vol});
        out.dates.push_back(bars[t].date);
        out.rows.push_back({log_ret[t], bars[t].volume, momentum, volatility});
    }
    return out;
}

FeatureTable sentiment_features(std::span<const SentimentDay> days, const FeatureWindows& w) {
    check_windows(w);
    const auto first = static_cast<std::size_t>(w.sentiment_max());
    if (days.size() < first + 1) {
        throw Error(ErrorCode::InsufficientHistory,
                    fmt::format("{} sentiment days, need at least {}", days.size(), first + 1));
    }
    FeatureTable out;
    out.names = sentiment_feature_names(w);
    const auto mom = static_cast<std::size_t>(w.sent_momentum);
    const auto rev = static_cast<std::size_t>(w.sent_reversal);
    for (std::size_t t = first; t < days.size(); ++t) {
        const double m = days[t].mean_score;
        double rolling = 0.0;
        for (std::size_t i = t + 1 - rev; i <= t; ++i) rolling += days[i].mean_score;
        rolling /= static_cast<double>(rev);
        out.dates.push_back(days[t].date);
        out.rows.push_back({static_cast<double>(days[t].tweet_count), m, days[t].score_std,
                            m - days[t - mom].mean_score, rolling - m});
    }
    return out;
}

// ─── Normalization ──────────────────────────────────────────────────────────

MinMaxScaler MinMaxScaler::fit(const std::vector<std::vector<double>>& rows,
                               std::size_t train_rows) {
    if (rows.empty() || train_rows == 0 || train_rows > rows.size()) {
        throw std::invalid_argument("MinMaxScaler::fit: empty training range");
    }
    const std::size_t d = rows.front().size();
    MinMaxScaler s;
    s.lo.assign(d, std::numeric_limits<double>::infinity());
    s.hi.assign(d, -std::numeric_limits<double>::infinity());
    for (std::size_t r = 0; r < train_rows; ++r) {
        for (std::size_t j = 0; j < d; ++j) {
            s.lo[j] = std::min(s.lo[j], rows[r][j]);
            s.hi[j] = std::max(s.hi[j], rows[r][j]);
        }
    }
    return s;
}

double MinMaxScaler::transform(std::size_t feature, double x) const {
    const double span = hi[feature] - lo[feature];
    if (!(span > 0.0)) return 0.5;
    return std::clamp((x - lo[feature]) / span, 0.0, 1.0);
}

std::vector<double> MinMaxScaler::transform(std::span<const double> row) const {
    std::vector<double> out(row.size());
    for (std::size_t j = 0; j < row.size(); ++j) out[j] = transform(j, row[j]);
    return out;
}

NormalizedTable normalize(const FeatureTable& raw, std::size_t train_rows) {
    NormalizedTable out{raw, MinMaxScaler::fit(raw.rows, train_rows)};
    for (auto& row : out.table.rows) row = out.scaler.transform(row);
    return out;
}

// ─── Targets and datasets ───────────────────────────────────────────────────

std::string_view to_string(TargetKind kind) {
    return kind == TargetKind::Alpha ? "alpha" : "total";
}

TargetKind parse_target_kind(std::string_view s) {
    if (s == "alpha") return TargetKind::Alpha;
    if (s == "total") return TargetKind::TotalReturn;
    throw std::invalid_argument("unknown target '" + std::string(s) + "'");
}

TargetSeries::TargetSeries(std::span<const PriceBar> bars, TargetKind kind) : kind_(kind) {
    for (std::size_t t = 0; t + 1 < bars.size(); ++t) {
        const double stock = std::log(bars[t + 1].close / bars[t].close);
        const double etf = std::log(bars[t + 1].etf_close / bars[t].etf_close);
        dates_.push_back(bars[t].date);
        next_.push_back(kind == TargetKind::Alpha ? stock - etf : stock);
    }
}

double TargetSeries::next_return(const Date& day) const {
    auto it = std::lower_bound(dates_.begin(), dates_.end(), day);
    if (it == dates_.end() || *it != day) {
        throw Error(ErrorCode::AlignmentMismatch,
                    fmt::format("no next-day target for {}", day.to_string()));
    }
    return next_[static_cast<std::size_t>(it - dates_.begin())];
}

Dataset Dataset::select(std::span<const std::string> names) const {
    std::vector<std::size_t> idx;
    for (const auto& n : names) {
        auto it = std::find(feature_names.begin(), feature_names.end(), n);
        if (it == feature_names.end()) {
            throw Error(ErrorCode::FeatureMismatch, "dataset has no feature '" + n + "'");
        }
        idx.push_back(static_cast<std::size_t>(it - feature_names.begin()));
    }
    Dataset out = *this;
    out.feature_names.assign(names.begin(), names.end());
    out.scaler = {};
    for (auto i : idx) {
        if (i < scaler.lo.size()) {
            out.scaler.lo.push_back(scaler.lo[i]);
            out.scaler.hi.push_back(scaler.hi[i]);
        }
    }
    for (std::size_t r = 0; r < rows.size(); ++r) {
        out.rows[r].values.clear();
        for (auto i : idx) out.rows[r].values.push_back(rows[r].values[i]);
    }
    return out;
}

Dataset build_dataset(std::span<const PriceBar> bars, std::span<const SentimentDay> sent_days,
                      TargetKind target, const FeatureWindows& w) {
    if (bars.size() != sent_days.size()) {
        throw Error(ErrorCode::AlignmentMismatch,
                    fmt::format("{} bars vs {} sentiment days", bars.size(), sent_days.size()));
    }
    for (std::size_t i = 0; i < bars.size(); ++i) {
        if (bars[i].date != sent_days[i].date) {
            throw Error(ErrorCode::AlignmentMismatch,
                        fmt::format("row {}: bar date {} vs sentiment date {}", i + 1,
                                    bars[i].date.to_string(), sent_days[i].date.to_string()));
        }
    }

    const auto tech = technical_features(bars, w);
    const auto sent = sentiment_features(sent_days, w);
    const auto first = static_cast<std::size_t>(std::max(w.technical_max(), w.sentiment_max()));
    if (bars.size() < first + 2) {
        throw Error(ErrorCode::InsufficientHistory, "no labeled day after the feature windows");
    }
    const std::size_t tech_off = first - static_cast<std::size_t>(w.technical_max());
    const std::size_t sent_off = first - static_cast<std::size_t>(w.sentiment_max());

    FeatureTable raw;
    raw.names = tech.names;
    raw.names.insert(raw.names.end(), sent.names.begin(), sent.names.end());
    const TargetSeries targets(bars, target);
    std::vector<int> labels;
    // The last bar has no next day, so it never becomes a row.
    for (std::size_t t = first; t + 1 < bars.size(); ++t) {
        auto row = tech.rows[t - first + tech_off];
        const auto& s = sent.rows[t - first + sent_off];
        row.insert(row.end(), s.begin(), s.end());
        raw.dates.push_back(bars[t].date);
        raw.rows.push_back(std::move(row));
        labels.push_back(sign_label(targets.next_return(bars[t].date)));
    }

    const std::size_t n = raw.rows.size();
    const std::size_t split = (n + 1) / 2;
    auto normalized = normalize(raw, split);

    Dataset ds;
    ds.split_index = split;
    ds.feature_names = raw.names;
    ds.target_kind = target;
    ds.windows = w;
    ds.scaler = std::move(normalized.scaler);
    ds.rows.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        ds.rows.push_back(
            FeatureRow{raw.dates[i], std::move(normalized.table.rows[i]), labels[i], target});
    }
    return ds;
}

// ─── Serialization ──────────────────────────────────────────────────────────

std::string format_dataset_csv(const Dataset& ds) {
    std::string out = "date,label";
    for (const auto& n : ds.feature_names) out += "," + n;
    out += '\n';
    for (const auto& r : ds.rows) {
        out += r.date.to_string();
        out += fmt::format(",{}", r.label);
        for (double v : r.values) out += "," + io::format_double(v);
        out += '\n';
    }
    return out;
}

std::string format_dataset_sidecar(const Dataset& ds) {
    nlohmann::ordered_json j;
    j["split_index"] = ds.split_index;
    j["n_rows"] = ds.rows.size();
    j["target_kind"] = std::string(to_string(ds.target_kind));
    j["tag"] = ds.tag;
    j["windows"] = {{"momentum", ds.windows.momentum},
                    {"volatility", ds.windows.volatility},
                    {"sent_momentum", ds.windows.sent_momentum},
                    {"sent_reversal", ds.windows.sent_reversal}};
    j["feature_names"] = ds.feature_names;
    nlohmann::ordered_json norm = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < ds.feature_names.size() && i < ds.scaler.lo.size(); ++i) {
        norm[ds.feature_names[i]] = {{"min", ds.scaler.lo[i]}, {"max", ds.scaler.hi[i]}};
    }
    j["normalization"] = norm;
    return j.dump(2) + "\n";
}

Dataset parse_dataset(std::string_view csv, std::string_view sidecar_json) {
    Dataset ds;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(sidecar_json);
        ds.split_index = j.at("split_index").get<std::size_t>();
        ds.target_kind = parse_target_kind(j.at("target_kind").get<std::string>());
        ds.tag = j.value("tag", "");
        const auto& w = j.at("windows");
        ds.windows = {w.at("momentum").get<int>(), w.at("volatility").get<int>(),
                      w.at("sent_momentum").get<int>(), w.at("sent_reversal").get<int>()};
        ds.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        const auto& norm = j.at("normalization");
        for (const auto& name : ds.feature_names) {
            ds.scaler.lo.push_back(norm.at(name).at("min").get<double>());
            ds.scaler.hi.push_back(norm.at(name).at("max").get<double>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(ErrorCode::MalformedLine, std::string("dataset sidecar: ") + e.what());
    }

    const auto all_lines = io::lines(csv);
    if (all_lines.empty()) throw Error(ErrorCode::MissingColumn, "dataset CSV is empty");
    const auto header = io::split(all_lines.front(), ',');
    if (header.size() != ds.feature_names.size() + 2 || header[0] != "date" || header[1] != "label") {
        throw Error(ErrorCode::FeatureMismatch, "dataset CSV header does not match sidecar");
    }
    for (std::size_t i = 0; i < ds.feature_names.size(); ++i) {
        if (header[i + 2] != ds.feature_names[i]) {
            throw Error(ErrorCode::FeatureMismatch, "dataset CSV header does not match sidecar");
        }
    }
    for (std::size_t li = 1; li < all_lines.size(); ++li) {
        if (io::trim(all_lines[li]).empty()) continue;
        const auto f = io::split(all_lines[li], ',');
        auto date = f.size() == header.size() ? Date::parse(f[0]) : std::nullopt;
        auto label = date ? io::parse_double(f[1]) : std::nullopt;
        if (!date || !label || (*label != 1.0 && *label != -1.0)) {
            throw Error(ErrorCode::MalformedRow, fmt::format("dataset row {} malformed", li));
        }
        FeatureRow row{*date, {}, static_cast<int>(*label), ds.target_kind};
        for (std::size_t i = 2; i < f.size(); ++i) {
            auto v = io::parse_double(f[i]);
            if (!v) throw Error(ErrorCode::MalformedRow, fmt::format("dataset row {} malformed", li));
            row.values.push_back(*v);
        }
        ds.rows.push_back(std::move(row));
    }
    if (ds.split_index > ds.rows.size()) {
        throw Error(ErrorCode::MalformedLine, "split_index beyond dataset length");
    }
    return ds;
}

}  // namespace sentrade
