#include "sentrade/tweetprep.hpp"
#include "sentrade/error.hpp"
#include "sentrade/text_io.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace sentrade {

namespace {

char lower(char c) {
    return static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), lower);
    return out;
}

bool is_word_char(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u < 0x80 && (std::isalnum(u) || c == '\'');
}

bool is_space(char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
}

}  // namespace

// ─── Lexicon ────────────────────────────────────────────────────────────────

Lexicon::Lexicon(std::unordered_map<std::string, double> entries, double default_score)
    : entries_(std::move(entries)), default_score_(default_score) {
    if (entries_.empty()) throw Error(ErrorCode::InvalidLexicon, "lexicon has no entries");
    if (!(default_score_ >= kMinSentiment && default_score_ <= kMaxSentiment)) {
        throw Error(ErrorCode::InvalidLexicon, "default score outside [0,4]");
    }
    for (const auto& [token, score] : entries_) {
        if (!(score >= kMinSentiment && score <= kMaxSentiment)) {
            throw Error(ErrorCode::InvalidLexicon,
                        fmt::format("score {} for '{}' outside [0,4]", score, token));
        }
        min_entry_ = std::min(min_entry_, score);
        max_entry_ = std::max(max_entry_, score);
    }
}

Lexicon Lexicon::parse_csv(std::string_view csv, double default_score) {
    const auto all_lines = io::lines(csv);
    if (all_lines.empty() || io::trim(all_lines.front()) != "token,score") {
        throw Error(ErrorCode::InvalidLexicon, "lexicon header must be token,score");
    }
    std::unordered_map<std::string, double> entries;
    for (std::size_t i = 1; i < all_lines.size(); ++i) {
        if (io::trim(all_lines[i]).empty()) continue;
        const auto fields = io::split(all_lines[i], ',');
        auto score = fields.size() == 2 ? io::parse_double(fields[1]) : std::nullopt;
        auto token = fields.empty() ? std::string() : to_lower(io::trim(fields[0]));
        if (!score || token.empty()) {
            throw Error(ErrorCode::InvalidLexicon, fmt::format("line {}: expected token,score", i + 1));
        }
        if (!entries.emplace(token, *score).second) {
            throw Error(ErrorCode::InvalidLexicon,
                        fmt::format("line {}: duplicate token '{}'", i + 1, token));
        }
    }
    return Lexicon(std::move(entries), default_score);
}

Lexicon Lexicon::load(const std::filesystem::path& path, double default_score) {
    return parse_csv(io::read_file(path), default_score);
}

double Lexicon::score(std::string_view token) const {
    auto it = entries_.find(std::string(token));
    return it == entries_.end() ? default_score_ : it->second;
}

const Lexicon& builtin_lexicon() {
    static const Lexicon lex = Lexicon::parse_csv(builtin_lexicon_csv());
    return lex;
}

// ─── Stopwords ──────────────────────────────────────────────────────────────

StopwordList StopwordList::parse(std::string_view text) {
    std::unordered_set<std::string> words;
    for (auto line : io::lines(text)) {
        line = io::trim(line);
        if (line.empty() || line.front() == '#') continue;
        words.insert(to_lower(line));
    }
    return StopwordList(std::move(words));
}

StopwordList StopwordList::load(const std::filesystem::path& path) {
    return parse(io::read_file(path));
}

const StopwordList& builtin_stopwords() {
    static const StopwordList list = StopwordList::parse(builtin_stopwords_text());
    return list;
}

// ─── Filtering and cleaning ─────────────────────────────────────────────────

std::string_view to_string(RejectReason reason) {
    switch (reason) {
        case RejectReason::UrlAd: return "UrlAd";
        case RejectReason::DoubleQuestionMark: return "DoubleQuestionMark";
        case RejectReason::NonEnglish: return "NonEnglish";
        case RejectReason::EmptyAfterClean: return "EmptyAfterClean";
    }
    return "Unknown";
}

std::string clean_tweet(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && is_space(text[i])) ++i;
        const std::size_t start = i;
        while (i < text.size() && !is_space(text[i])) ++i;
        if (start == i) break;
        const std::string_view token = text.substr(start, i - start);
        if (token.front() == '#' || token.front() == '@') continue;
        if (!out.empty()) out += ' ';
        out += token;
    }
    return out;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && !is_word_char(text[i])) ++i;
        std::size_t start = i;
        while (i < text.size() && is_word_char(text[i])) ++i;
        std::size_t end = i;
        while (start < end && text[start] == '\'') ++start;
        while (end > start && text[end - 1] == '\'') --end;
        if (end > start) tokens.push_back(to_lower(text.substr(start, end - start)));
    }
    return tokens;
}

bool is_english(std::string_view text, const StopwordList& stopwords, double threshold) {
    if (text.empty()) throw std::invalid_argument("is_english: text must be non-empty");
    const auto tokens = tokenize(text);
    if (tokens.empty()) return false;
    const auto hits = std::count_if(tokens.begin(), tokens.end(),
                                    [&](const std::string& t) { return stopwords.contains(t); });
    return static_cast<double>(hits) >= threshold * static_cast<double>(tokens.size());
}

FilterVerdict filter_tweet(std::string_view text, const FilterConfig& cfg) {
    const std::string lowered = to_lower(text);
    if (lowered.find("http") != std::string::npos || lowered.find(".com") != std::string::npos) {
        return RejectReason::UrlAd;
    }
    if (text.find("??") != std::string_view::npos) return RejectReason::DoubleQuestionMark;

    const std::string cleaned = clean_tweet(text);
    if (cleaned.empty()) return RejectReason::EmptyAfterClean;

    const StopwordList& stopwords = cfg.stopwords ? *cfg.stopwords : builtin_stopwords();
    if (!is_english(cleaned, stopwords, cfg.english_threshold)) return RejectReason::NonEnglish;
    return std::nullopt;
}

// ─── Scoring ────────────────────────────────────────────────────────────────

double score_tweet(std::string_view text, const Lexicon& lex) {
    double sentence_sum = 0.0;
    std::size_t sentences = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t end = text.find_first_of(".!?", start);
        if (end == std::string_view::npos) end = text.size();
        const auto tokens = tokenize(text.substr(start, end - start));
        if (!tokens.empty()) {
            double sum = 0.0;
            for (const auto& t : tokens) sum += lex.score(t);
            sentence_sum += sum / static_cast<double>(tokens.size());
            ++sentences;
        }
        start = end + 1;
    }
    if (sentences == 0) throw Error(ErrorCode::NoTokens, "no sentence contains a token");
    return sentence_sum / static_cast<double>(sentences);
}

// ─── Daily aggregation ──────────────────────────────────────────────────────

std::vector<SentimentDay> aggregate_daily(std::span<const ScoredTweet> tweets,
                                          std::span<const Date> trading_days) {
    if (trading_days.empty()) throw std::invalid_argument("aggregate_daily: no trading days");
    if (!std::is_sorted(trading_days.begin(), trading_days.end())) {
        throw std::invalid_argument("aggregate_daily: trading days must be ascending");
    }

    std::vector<std::vector<double>> buckets(trading_days.size());
    for (const auto& t : tweets) {
        if (!(t.score >= kMinSentiment && t.score <= kMaxSentiment)) {
            throw std::invalid_argument("aggregate_daily: score outside [0,4]");
        }
        auto it = std::lower_bound(trading_days.begin(), trading_days.end(), t.date);
        if (it == trading_days.end()) {
            throw Error(ErrorCode::TweetAfterLastTradingDay,
                        fmt::format("tweet on {} is after the last trading day {}",
                                    t.date.to_string(), trading_days.back().to_string()));
        }
        buckets[static_cast<std::size_t>(it - trading_days.begin())].push_back(t.score / 4.0);
    }

    std::vector<SentimentDay> out;
    out.reserve(trading_days.size());
    for (std::size_t i = 0; i < trading_days.size(); ++i) {
        const auto& b = buckets[i];
        SentimentDay day{trading_days[i], 0.5, b.size(), 0.0};
        if (!b.empty()) {
            double sum = 0.0;
            for (double x : b) sum += x;
            const double mean = sum / static_cast<double>(b.size());
            double ss = 0.0;
            for (double x : b) ss += (x - mean) * (x - mean);
            day.mean_score = std::clamp(mean, 0.0, 1.0);
            day.score_std = b.size() > 1 ? std::sqrt(ss / static_cast<double>(b.size())) : 0.0;
        }
        out.push_back(day);
    }
    return out;
}

PrepResult prepare_sentiment(std::span<const TweetRecord> tweets, const Lexicon& lex,
                             std::span<const Date> trading_days, const FilterConfig& cfg) {
    PrepResult result;
    std::vector<ScoredTweet> scored;
    scored.reserve(tweets.size());
    for (const auto& t : tweets) {
        if (auto reason = filter_tweet(t.text, cfg)) {
            ++result.rejected[static_cast<std::size_t>(*reason)];
            continue;
        }
        const std::string cleaned = clean_tweet(t.text);
        double score = 0.0;
        try {
            score = score_tweet(cleaned, lex);
        } catch (const Error& e) {
            // A kept tweet always has an English token, so this is unreachable
            // with a non-zero threshold; treat it like an empty tweet.
            if (e.code() != ErrorCode::NoTokens) throw;
            ++result.rejected[static_cast<std::size_t>(RejectReason::EmptyAfterClean)];
            continue;
        }
        scored.push_back({t.timestamp.date, score});
        ++result.kept;
    }
    result.days = aggregate_daily(scored, trading_days);
    return result;
}

std::string format_sentiment_days(std::span<const SentimentDay> days) {
    std::string out = "date,mean_score,tweet_count,score_std\n";
    for (const auto& d : days) {
        out += fmt::format("{},{},{},{}\n", d.date.to_string(), io::format_double(d.mean_score),
                           d.tweet_count, io::format_double(d.score_std));
    }
    return out;
}

std::vector<SentimentDay> parse_sentiment_days(std::string_view csv) {
    const auto all_lines = io::lines(csv);
    if (all_lines.empty() || io::trim(all_lines.front()) != "date,mean_score,tweet_count,score_std") {
        throw Error(ErrorCode::MissingColumn, "sentiment header must be date,mean_score,tweet_count,score_std");
    }
    std::vector<SentimentDay> out;
    for (std::size_t i = 1; i < all_lines.size(); ++i) {
        if (io::trim(all_lines[i]).empty()) continue;
        const auto f = io::split(all_lines[i], ',');
        std::optional<Date> date;
        std::optional<double> mean, count, sd;
        if (f.size() == 4) {
            date = Date::parse(io::trim(f[0]));
            mean = io::parse_double(f[1]);
            count = io::parse_double(f[2]);
            sd = io::parse_double(f[3]);
        }
        if (!date || !mean || !count || !sd || *count < 0 || *mean < 0 || *mean > 1 || *sd < 0) {
            throw Error(ErrorCode::MalformedRow, fmt::format("sentiment row {} malformed", i));
        }
        out.push_back({*date, *mean, static_cast<std::size_t>(*count), *sd});
    }
    return out;
}

}  // namespace sentrade
