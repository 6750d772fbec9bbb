#pragma once

#include "sentrade/date.hpp"
#include "sentrade/ingest.hpp"

#include <array>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace sentrade {

inline constexpr double kMinSentiment = 0.0;
inline constexpr double kMaxSentiment = 4.0;
inline constexpr double kNeutralSentiment = 2.0;

/// Token polarity table on the 0 (very negative) .. 4 (very positive) scale.
class Lexicon {
public:
    Lexicon(std::unordered_map<std::string, double> entries,
            double default_score = kNeutralSentiment);

    /// Reads CSV `token,score`; tokens are lowercased on load.
    static Lexicon parse_csv(std::string_view csv, double default_score = kNeutralSentiment);
    static Lexicon load(const std::filesystem::path& path,
                        double default_score = kNeutralSentiment);

    double score(std::string_view token) const;
    double default_score() const { return default_score_; }
    const std::unordered_map<std::string, double>& entries() const { return entries_; }
    double min_entry() const { return min_entry_; }
    double max_entry() const { return max_entry_; }

private:
    std::unordered_map<std::string, double> entries_;
    double default_score_;
    double min_entry_ = kMaxSentiment;
    double max_entry_ = kMinSentiment;
};

/// The lexicon shipped as data/lexicon_v1.csv, compiled in.
const Lexicon& builtin_lexicon();

class StopwordList {
public:
    explicit StopwordList(std::unordered_set<std::string> words) : words_(std::move(words)) {}

    /// One word per line; blank lines and `#` comments ignored.
    static StopwordList parse(std::string_view text);
    static StopwordList load(const std::filesystem::path& path);

    bool contains(std::string_view word) const { return words_.contains(std::string(word)); }
    std::size_t size() const { return words_.size(); }
    const std::unordered_set<std::string>& words() const { return words_; }

private:
    std::unordered_set<std::string> words_;
};

/// The stopword list shipped as data/stopwords_en_v1.txt, compiled in.
const StopwordList& builtin_stopwords();
std::string_view builtin_stopwords_text();
std::string_view builtin_lexicon_csv();

enum class RejectReason { UrlAd, DoubleQuestionMark, NonEnglish, EmptyAfterClean };
inline constexpr std::array kRejectReasons = {RejectReason::UrlAd, RejectReason::DoubleQuestionMark,
                                              RejectReason::NonEnglish,
                                              RejectReason::EmptyAfterClean};
std::string_view to_string(RejectReason reason);

/// nullopt means keep.
using FilterVerdict = std::optional<RejectReason>;

struct FilterConfig {
    const StopwordList* stopwords = nullptr;  // null -> builtin_stopwords()
    double english_threshold = 0.15;
};

/// Applies the rejection rules in order: URL/ad, double question mark, empty
/// after cleaning, non-English (judged on the cleaned text).
FilterVerdict filter_tweet(std::string_view text, const FilterConfig& cfg = {});

/// Drops `#`/`@` tokens, turns tabs into spaces, collapses whitespace, trims.
std::string clean_tweet(std::string_view text);

/// Lowercased word tokens: runs of ASCII letters, digits and inner
/// apostrophes. Everything else, including all non-ASCII bytes, separates.
std::vector<std::string> tokenize(std::string_view text);

/// Fraction of tokens found in the stopword list is at least `threshold`.
/// Throws std::invalid_argument on empty text.
bool is_english(std::string_view text, const StopwordList& stopwords = builtin_stopwords(),
                double threshold = 0.15);

/// Sentence-averaged lexicon score in [0, 4]; sentences split on . ! ? and
/// each scored as the mean polarity of its tokens. Sentences without tokens
/// are skipped; NoTokens if none remain.
double score_tweet(std::string_view text, const Lexicon& lex);

struct SentimentDay {
    Date date;
    double mean_score = 0.5;
    std::size_t tweet_count = 0;
    double score_std = 0.0;

    bool operator==(const SentimentDay&) const = default;
};

struct ScoredTweet {
    Date date;
    double score = kNeutralSentiment;  // raw 0..4
};

/// Buckets tweets onto trading days (non-trading dates roll forward to the
/// next trading day) and reports mean and population std of score/4 per day.
/// Days without tweets are filled with (0.5, 0, 0).
std::vector<SentimentDay> aggregate_daily(std::span<const ScoredTweet> tweets,
                                          std::span<const Date> trading_days);

struct PrepResult {
    std::vector<SentimentDay> days;
    std::array<std::size_t, kRejectReasons.size()> rejected{};
    std::size_t kept = 0;
};

/// filter -> clean -> score -> aggregate over a tweet corpus.
PrepResult prepare_sentiment(std::span<const TweetRecord> tweets, const Lexicon& lex,
                             std::span<const Date> trading_days, const FilterConfig& cfg = {});

std::string format_sentiment_days(std::span<const SentimentDay> days);
std::vector<SentimentDay> parse_sentiment_days(std::string_view csv);

}  // namespace sentrade
