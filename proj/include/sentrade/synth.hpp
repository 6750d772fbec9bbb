#pragma once

#include "sentrade/date.hpp"
#include "sentrade/ingest.hpp"
#include "sentrade/tweetprep.hpp"

#include <cstdint>
#include <vector>

namespace sentrade::synth {

/// Knobs of the synthetic market. Daily log returns are
///
///     etf_t   = market_vol * z_t
///     stock_t = etf_t + signal_strength * (s_{t-1} - 0.5) + noise_vol * e_t
///
/// where s_t in [0.1, 0.9] is the latent sentiment,
/// s_t = 0.5 + 0.4 * tanh(x_t), x_t a unit-variance AR(1) with coefficient
/// sentiment_persistence. Each day draws Poisson(tweet_rate) tweets, or
/// Poisson(tweet_rate * event_volume_multiplier) on an event day (probability
/// regime_switch_prob). Each tweet carries a sentence class k ~ Binomial(4, p_t)
/// with p_t = 0.5 + (s_t - 0.5) / 0.8, rendered so that the lexicon scorer
/// returns (2 + 4k) / 5; its normalized score therefore has mean s_t.
struct SynthParams {
    std::size_t n_days = 500;
    std::uint64_t seed = 1;
    double signal_strength = 0.05;
    double noise_vol = 0.01;
    double market_vol = 0.01;
    double tweet_rate = 20.0;
    double regime_switch_prob = 0.05;
    double sentiment_persistence = 0.0;
    double event_volume_multiplier = 10.0;
    Date start_date = Date(2016, 1, 4);

    /// Throws Error(InvalidParams) naming the first offending field.
    void validate() const;
};

struct SynthOutput {
    std::vector<PriceBar> bars;
    std::vector<SentimentDay> sentiment;       // product tweets, carries the signal
    std::vector<double> latent;                // s_t per day
    std::vector<bool> event_day;
    std::vector<TweetRecord> product_tweets;
    std::vector<TweetRecord> ticker_tweets;    // independent latent, no link to returns
    std::vector<SentimentDay> ticker_sentiment;
};

/// Deterministic in params (bit-identical across runs). The sentiment series
/// are exactly what prepare_sentiment() reports for the rendered tweets under
/// builtin_lexicon().
SynthOutput generate(const SynthParams& params);

/// Uncorrupted latent sentiment of `day`; OutOfRange when day >= n_days.
double true_signal(const SynthParams& params, std::size_t day);

/// Latent series only, without prices or tweets.
std::vector<double> latent_series(const SynthParams& params);

/// Text whose builtin-lexicon score is (2 + 4k) / 5 and which passes every
/// preprocessing filter. `variant` picks among synonyms.
std::string render_tweet(int sentence_class, std::uint64_t variant);

}  // namespace sentrade::synth
