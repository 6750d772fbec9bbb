#include "sentrade/synth.hpp"
#include "sentrade/error.hpp"
#include "sentrade/rng.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string_view>

#include <fmt/format.h>

namespace sentrade::synth {

namespace {

// Stream ids are part of the fixture contract: never renumber.
enum Stream : std::uint64_t {
    kMarket = 1,
    kIdio = 2,
    kLatent = 3,
    kEvents = 4,
    kCounts = 5,
    kClasses = 6,
    kText = 7,
    kVolume = 8,
    kTickerLatent = 9,
    kTickerCounts = 10,
    kTickerClasses = 11,
    kTickerText = 12,
};

constexpr std::array<std::array<std::string_view, 4>, 5> kClassWords = {{
    {"terrible", "awful", "horrible", "disaster"},
    {"bad", "weak", "poor", "disappointing"},
    {"stock", "car", "shares", "model"},
    {"good", "nice", "solid", "strong"},
    {"great", "amazing", "excellent", "awesome"},
}};

std::vector<double> latent_from_stream(std::size_t n, double persistence, std::uint64_t seed,
                                       std::uint64_t stream) {
    Rng rng(seed, stream);
    const double innovation = std::sqrt(1.0 - persistence * persistence);
    std::vector<double> s(n);
    double x = rng.normal();
    for (std::size_t t = 0; t < n; ++t) {
        if (t > 0) x = persistence * x + innovation * rng.normal();
        s[t] = 0.5 + 0.4 * std::tanh(x);
    }
    return s;
}

struct TweetDraw {
    std::vector<TweetRecord> tweets;
    std::vector<ScoredTweet> scored;
};

TweetDraw draw_tweets(const std::vector<Date>& dates, const std::vector<double>& latent,
                      const std::vector<double>& rates, SourceTag tag, std::uint64_t seed,
                      std::uint64_t count_stream, std::uint64_t class_stream,
                      std::uint64_t text_stream) {
    Rng counts(seed, count_stream);
    Rng classes(seed, class_stream);
    Rng text(seed, text_stream);
    const Lexicon& lex = builtin_lexicon();

    TweetDraw out;
    for (std::size_t t = 0; t < dates.size(); ++t) {
        const auto n = counts.poisson(rates[t]);
        const double p = std::clamp(0.5 + (latent[t] - 0.5) / 0.8, 0.0, 1.0);
        std::vector<TweetRecord> day;
        day.reserve(n);
        for (std::uint64_t i = 0; i < n; ++i) {
            int k = 0;
            for (int trial = 0; trial < 4; ++trial) k += classes.bernoulli(p) ? 1 : 0;
            const int second = static_cast<int>(text.index(86400));
            day.push_back(TweetRecord{Timestamp{dates[t], second}, render_tweet(k, text.next_u64()),
                                      tag});
        }
        std::stable_sort(day.begin(), day.end(), [](const TweetRecord& a, const TweetRecord& b) {
            return a.timestamp.seconds_of_day < b.timestamp.seconds_of_day;
        });
        for (auto& tw : day) {
            out.scored.push_back({dates[t], score_tweet(clean_tweet(tw.text), lex)});
            out.tweets.push_back(std::move(tw));
        }
    }
    return out;
}

}  // namespace

void SynthParams::validate() const {
    auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidParams, what); };
    if (n_days == 0) fail("n_days must be positive");
    if (!(signal_strength >= 0.0 && signal_strength <= 0.5)) fail("signal_strength must lie in [0, 0.5]");
    if (!(noise_vol > 0.0 && noise_vol <= 0.05)) fail("noise_vol must lie in (0, 0.05]");
    if (!(market_vol > 0.0 && market_vol <= 0.05)) fail("market_vol must lie in (0, 0.05]");
    if (!(tweet_rate > 0.0) || !std::isfinite(tweet_rate)) fail("tweet_rate must be positive");
    if (!(regime_switch_prob >= 0.0 && regime_switch_prob <= 1.0)) {
        fail("regime_switch_prob must lie in [0, 1]");
    }
    if (!(sentiment_persistence >= 0.0 && sentiment_persistence < 1.0)) {
        fail("sentiment_persistence must lie in [0, 1)");
    }
    if (!(event_volume_multiplier >= 1.0)) fail("event_volume_multiplier must be >= 1");
    if (!start_date.is_weekday()) fail("start_date must be a weekday");
}

std::string render_tweet(int sentence_class, std::uint64_t variant) {
    const auto& words = kClassWords.at(static_cast<std::size_t>(sentence_class));
    // "the" is an unknown (neutral) stopword: one neutral token plus four
    // class tokens gives (2 + 4k) / 5 and a stopword ratio of 1/5.
    std::string text = "the";
    for (int i = 0; i < 4; ++i) {
        text += ' ';
        text += words[variant % words.size()];
        variant /= words.size();
    }
    return text;
}

std::vector<double> latent_series(const SynthParams& params) {
    params.validate();
    return latent_from_stream(params.n_days, params.sentiment_persistence, params.seed, kLatent);
}

double true_signal(const SynthParams& params, std::size_t day) {
    if (day >= params.n_days) {
        throw Error(ErrorCode::OutOfRange,
                    fmt::format("day {} outside [0, {})", day, params.n_days));
    }
    return latent_series(params)[day];
}

SynthOutput generate(const SynthParams& params) {
    params.validate();
    const std::size_t n = params.n_days;

    SynthOutput out;
    out.latent = latent_series(params);

    std::vector<Date> dates(n);
    dates[0] = params.start_date;
    for (std::size_t t = 1; t < n; ++t) dates[t] = dates[t - 1].next_weekday();

    Rng market(params.seed, kMarket);
    Rng idio(params.seed, kIdio);
    Rng volume(params.seed, kVolume);
    Rng events(params.seed, kEvents);

    out.event_day.resize(n);
    std::vector<double> rates(n);
    for (std::size_t t = 0; t < n; ++t) {
        out.event_day[t] = events.bernoulli(params.regime_switch_prob);
        rates[t] = params.tweet_rate * (out.event_day[t] ? params.event_volume_multiplier : 1.0);
    }

    out.bars.resize(n);
    double close = 100.0;
    double etf = 50.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double m = params.market_vol * market.normal();
        const double e = params.noise_vol * idio.normal();
        if (t > 0) {
            const double alpha = params.signal_strength * (out.latent[t - 1] - 0.5) + e;
            etf *= std::exp(m);
            close *= std::exp(m + alpha);
        }
        const double base_volume = 1.0e6 * std::exp(0.25 * volume.normal());
        const double v = std::round(base_volume * (out.event_day[t] ? 2.0 : 1.0));
        out.bars[t] = PriceBar{dates[t], close, v, etf};
    }

    auto product = draw_tweets(dates, out.latent, rates, SourceTag::Product, params.seed, kCounts,
                               kClasses, kText);
    out.product_tweets = std::move(product.tweets);
    out.sentiment = aggregate_daily(product.scored, dates);

    const auto ticker_latent = latent_from_stream(n, params.sentiment_persistence, params.seed,
                                                  kTickerLatent);
    auto ticker = draw_tweets(dates, ticker_latent, rates, SourceTag::Ticker, params.seed,
                              kTickerCounts, kTickerClasses, kTickerText);
    out.ticker_tweets = std::move(ticker.tweets);
    out.ticker_sentiment = aggregate_daily(ticker.scored, dates);
    return out;
}

}  // namespace sentrade::synth
