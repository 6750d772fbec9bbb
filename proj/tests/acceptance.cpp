// Acceptance checks: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include "pipeline.hpp"
#include "support.hpp"

#include "sentrade/backtest.hpp"
#include "sentrade/classify.hpp"
#include "sentrade/qlearn.hpp"
#include "sentrade/rng.hpp"
#include "sentrade/text_io.hpp"
#include "sentrade/tweetprep.hpp"

#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>

namespace {

using namespace sentrade;
namespace fs = std::filesystem;

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

constexpr double kNoiseVol = 0.01;

// 1: tabular equivalence
Outcome tabular_equivalence() {
    const auto start = Clock::now();
    const auto mdp = testing::two_state_chain(0.9);
    const auto run = testing::tabular_equivalence(mdp, 50000, 0.5, 1);
    const double secs = seconds_since(start);
    return {run.max_error_vs_oracle < 1e-3 && run.max_step_difference < 1e-12 && secs < 5.0,
            fmt::format("|Q - Q*| = {:.2e}, step-wise |linear - tabular| = {:.2e}, {:.3f}s",
                        run.max_error_vs_oracle, run.max_step_difference, secs)};
}

// 2: epsilon-greedy statistics
Outcome epsilon_greedy() {
    const qlearn::EpisodeConfig cfg;
    auto w = qlearn::QWeights::zeros({"a", "b"}, cfg);
    Rng init(9);
    for (auto& x : w.w) x = init.normal();
    const qlearn::AgentState s{{0.4, 0.7}, 0, 1.0};

    Rng rng(2024);
    std::array<int, 3> counts{};
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        ++counts[static_cast<std::size_t>(qlearn::select_action(w, s, cfg, 1.0, rng))];
    }
    const double sigma = std::sqrt(n * (1.0 / 3.0) * (2.0 / 3.0));
    double worst = 0.0;
    for (int c : counts) worst = std::max(worst, std::abs(c - n / 3.0) / sigma);

    auto greedy_run = [&](std::uint64_t seed) {
        Rng r(seed);
        Rng markets(seed + 1);
        std::vector<qlearn::TradeAction> out;
        qlearn::AgentState st{{0.0, 0.0}, 0, 1.0};
        for (int i = 0; i < 5000; ++i) {
            st.market = {markets.uniform(), markets.uniform()};
            out.push_back(qlearn::select_action(w, st, cfg, 0.0, r));
            st.position = qlearn::apply_action(out.back(), st.position);
        }
        return out;
    };
    const bool same = greedy_run(17) == greedy_run(17);
    return {worst < 3.0 && same,
            fmt::format("counts {}/{}/{}, worst deviation {:.2f} sigma, eps=0 repeat identical: {}",
                        counts[0], counts[1], counts[2], worst, same)};
}

// 3: L1 solver
Outcome l1_solver() {
    double worst_gap = 0.0;
    bool noise_zero = true;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = testing::planted_l1_data(seed);
        const auto m = train_logreg_l1(d, 10.0);
        noise_zero = noise_zero && m.weights[1] == 0.0;
        if (seed < 3) {
            const auto oracle = testing::grid_search_logreg(d, 10.0);
            worst_gap = std::max(worst_gap, std::abs(m.diagnostics.objective - oracle.objective));
        }
    }
    std::vector<double> cs;
    for (int i = 9; i >= 0; --i) cs.push_back(0.01 * std::pow(10.0, i * 4.0 / 9.0));
    int monotone = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto d = testing::planted_signal_data(seed, 200, 8, 0.2);
        std::size_t prev = d.dims();
        bool ok = true;
        for (double c : cs) {
            const auto nz = train_logreg_l1(d, c).nonzero_weights();
            ok = ok && nz <= prev;
            prev = nz;
        }
        monotone += ok;
    }
    return {noise_zero && worst_gap < 1e-4 && monotone == 10,
            fmt::format("noise weight exactly 0 on 10 seeds: {}, objective gap vs grid oracle {:.2e}, "
                        "monotone sparsity {}/10",
                        noise_zero, worst_gap, monotone)};
}

// 4: SMO
Outcome smo() {
    const auto start = Clock::now();
    const auto d = testing::xor_data();
    SvmOptions opt;
    opt.record_dual_trace = true;
    const auto m = train_svm_rbf(d, 10.0, 1.0, opt);
    const double secs = seconds_since(start);
    const double acc = evaluate(m, d).accuracy;
    const double balance = std::abs(m.training_alphas.dot(d.y));
    bool box = true;
    for (Eigen::Index i = 0; i < m.training_alphas.size(); ++i) {
        box = box && m.training_alphas[i] >= 0.0 && m.training_alphas[i] <= 10.0;
    }
    bool ascent = true;
    const auto& tr = m.diagnostics.dual_trace;
    for (std::size_t t = 1; t < tr.size(); ++t) ascent = ascent && tr[t] >= tr[t - 1];
    return {acc == 1.0 && balance <= 1e-6 && box && ascent && secs < 1.0,
            fmt::format("accuracy {:.2f}, |sum a_i y_i| = {:.1e}, box ok: {}, dual non-decreasing over {} "
                        "updates: {}, {:.4f}s",
                        acc, balance, box, tr.size(), ascent, secs)};
}

// 5: planted-signal detection
Outcome planted_signal() {
    int wins = 0;
    std::vector<double> gaps_strong;
    double null_gap = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        for (double beta : {5.0 * kNoiseVol, 0.0}) {
            const auto run = testing::make_synth_run(
                {.n_days = 1000, .seed = 7000 + seed, .signal_strength = beta, .noise_vol = kNoiseVol});
            const auto tech = technical_feature_names(run.dataset.windows);
            const double gap = testing::cv_logreg_test_accuracy(run.dataset) -
                               testing::cv_logreg_test_accuracy(run.dataset, tech);
            if (beta > 0) {
                wins += gap >= 0.05;
                gaps_strong.push_back(gap);
            } else {
                null_gap += gap / 10.0;
            }
        }
    }
    double mean_strong = 0.0;
    for (double g : gaps_strong) mean_strong += g / 10.0;
    return {wins >= 8 && std::abs(null_gap) <= 0.03,
            fmt::format("beta=5*noise_vol: gap >= 5pp on {}/10 seeds (mean {:+.1f}pp); beta=0: mean gap "
                        "{:+.2f}pp",
                        wins, 100 * mean_strong, 100 * null_gap)};
}

// 6: alpha vs total return
Outcome alpha_vs_total() {
    int wins = 0;
    double mean_alpha = 0.0, mean_total = 0.0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const synth::SynthParams p{.n_days = 1000,
                                   .seed = 8000 + seed,
                                   .signal_strength = 5.0 * kNoiseVol,
                                   .noise_vol = kNoiseVol,
                                   .market_vol = 2.0 * kNoiseVol};
        const auto alpha = testing::make_synth_run(p, TargetKind::Alpha);
        const auto total = testing::make_synth_run(p, TargetKind::TotalReturn);
        const double a = testing::cv_logreg_test_accuracy(alpha.dataset);
        const double t = testing::cv_logreg_test_accuracy(total.dataset);
        wins += a > t;
        mean_alpha += a / 10.0;
        mean_total += t / 10.0;
    }
    return {wins >= 8, fmt::format("alpha target wins on {}/10 seeds (mean accuracy {:.3f} vs {:.3f})",
                                   wins, mean_alpha, mean_total)};
}

struct SeedCurves {
    std::vector<backtest::EquityCurve> curves;  // oracle, q_learning, ml_signal, baseline
    std::vector<FeatureRow> test;
    testing::SynthRun run;
};

SeedCurves strategy_curves(const synth::SynthParams& params, double cost) {
    SeedCurves out;
    out.run = testing::make_synth_run(params);
    const auto& ds = out.run.dataset;
    const TargetSeries targets(out.run.data.bars, TargetKind::Alpha);
    const auto train = TrainingData::from_dataset_train(ds);
    const auto ml = fit(train, ModelKind::LogReg, cross_validate(train, HyperGrid::logreg()).best_point());
    const auto tech_ds = ds.select(technical_feature_names(ds.windows));
    const auto tech_train = TrainingData::from_dataset_train(tech_ds);
    const auto base =
        fit(tech_train, ModelKind::LogReg, cross_validate(tech_train, HyperGrid::logreg()).best_point());
    qlearn::EpisodeConfig cfg;
    cfg.seed = params.seed;
    const auto q = qlearn::run_training(ds.train(), ds.feature_names, targets, cfg, 50);
    for (const auto& s : {backtest::Strategy::oracle(), backtest::Strategy::q_learning(q.weights, cfg),
                          backtest::Strategy::ml_signal(ml), backtest::Strategy::baseline(base)}) {
        out.curves.push_back(backtest::run(s, ds.test(), ds.feature_names, targets, cost));
    }
    out.test.assign(ds.test().begin(), ds.test().end());
    return out;
}

double identity_error(const backtest::EquityCurve& c, std::span<const FeatureRow> rows,
                      const TargetSeries& t, double cost) {
    double worst = 0.0, prev = 1.0;
    int prev_pos = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& p = c.points[i];
        const double r = p.position * t.next_return(rows[i].date) - cost * std::abs(p.position - prev_pos);
        const double expected = prev * (1.0 + r);
        worst = std::max(worst, std::abs(p.equity - expected) / std::abs(expected));
        prev = p.equity;
        prev_pos = p.position;
    }
    return worst;
}

// 7: backtest accounting
Outcome accounting() {
    double worst_identity = 0.0;
    int dominated = 0;
    Rng rng(77);
    for (std::uint64_t k = 0; k < 100; ++k) {
        const synth::SynthParams p{.n_days = 120 + rng.index(200),
                                   .seed = 9000 + k,
                                   .signal_strength = 0.1 * rng.uniform(),
                                   .noise_vol = 0.005 + 0.02 * rng.uniform(),
                                   .market_vol = 0.005 + 0.03 * rng.uniform()};
        const auto run = testing::make_synth_run(p);
        const auto& ds = run.dataset;
        const TargetSeries t(run.data.bars, TargetKind::Alpha);
        qlearn::EpisodeConfig cfg;
        cfg.seed = k;
        auto w = qlearn::QWeights::zeros(ds.feature_names, cfg);
        for (auto& x : w.w) x = rng.normal();
        const auto train = TrainingData::from_dataset_train(ds);
        std::vector<backtest::EquityCurve> curves;
        for (const auto& s : {backtest::Strategy::oracle(), backtest::Strategy::q_learning(w, cfg),
                              backtest::Strategy::ml_signal(fit(train, ModelKind::LogReg, {10.0, 0.0}))}) {
            curves.push_back(backtest::run(s, ds.test(), ds.feature_names, t));
        }
        bool dom = true;
        for (const auto& c : curves) {
            worst_identity = std::max(worst_identity, identity_error(c, ds.test(), t, 0.0));
            for (std::size_t i = 0; i < c.points.size(); ++i) {
                dom = dom && curves[0].points[i].equity >= c.points[i].equity;
            }
        }
        // with costs only the identity is checked
        for (const auto& s : {backtest::Strategy::q_learning(w, cfg, false), backtest::Strategy::oracle()}) {
            const auto c = backtest::run(s, ds.test(), ds.feature_names, t, 0.001);
            worst_identity = std::max(worst_identity, identity_error(c, ds.test(), t, 0.001));
        }
        dominated += dom;
    }
    return {worst_identity <= 1e-12 && dominated == 100,
            fmt::format("worst relative identity error {:.1e}, oracle dominates pointwise on {}/100 datasets",
                        worst_identity, dominated)};
}

// 8: strategy ordering
Outcome strategy_ordering() {
    const auto start = Clock::now();
    std::array<double, 4> mean{};
    int q_wins = 0;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const auto sc = strategy_curves(
            {.n_days = 1000, .seed = 6000 + seed, .signal_strength = 5.0 * kNoiseVol, .noise_vol = kNoiseVol},
            0.0);
        for (std::size_t i = 0; i < 4; ++i) mean[i] += sc.curves[i].points.back().equity / 10.0;
        q_wins += sc.curves[1].points.back().equity > sc.curves[2].points.back().equity;
    }
    const double secs = seconds_since(start);
    const bool order = mean[0] > mean[1] && mean[1] >= mean[2] && mean[2] > mean[3];
    return {order && q_wins >= 6 && secs < 120.0,
            fmt::format("mean final equity oracle {:.2f}, q_learning {:.2f}, ml_signal {:.2f}, baseline {:.2f}; "
                        "q_learning beats ml_signal on {}/10 seeds; {:.1f}s",
                        mean[0], mean[1], mean[2], mean[3], q_wins, secs)};
}

// 9: preprocessing goldens
Outcome preprocessing_goldens() {
    const bool ad = filter_tweet("#Fhotoroom #iPhone https://www.fhotoroom.com/fhotos/") == RejectReason::UrlAd;
    const bool dq = filter_tweet("que pasa?? nadie sabe") == RejectReason::DoubleQuestionMark;
    int passed = 0, total = 0;
    const auto text = io::read_file(testing::test_data_dir() / "cleaning_golden.jsonl");
    for (auto line : io::lines(text)) {
        if (io::trim(line).empty()) continue;
        ++total;
        const auto j = nlohmann::json::parse(line);
        const auto input = j.at("input").get<std::string>();
        const auto verdict = filter_tweet(input);
        const std::string name = verdict ? std::string(to_string(*verdict)) : "keep";
        passed += clean_tweet(input) == j.at("clean").get<std::string>() &&
                  name == j.at("verdict").get<std::string>();
    }
    return {ad && dq && total == 20 && passed == 20,
            fmt::format("ad example UrlAd: {}, double question mark: {}, golden cases {}/{}", ad, dq, passed,
                        total)};
}

// 10: end-to-end determinism
Outcome determinism() {
    const auto dir = fs::temp_directory_path() / "sentrade_acceptance_pipeline";
    const auto first = testing::run_pipeline(dir, 42);
    const auto second = testing::run_pipeline(dir, 42);
    fs::remove_all(dir);
    return {first == second && !first.empty(),
            fmt::format("{} artifacts, byte-identical across two runs: {}", first.size(), first == second)};
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
        {"tabular Q-learning equivalence", tabular_equivalence},
        {"epsilon-greedy statistics", epsilon_greedy},
        {"L1 solver correctness", l1_solver},
        {"SMO correctness", smo},
        {"planted-signal detection", planted_signal},
        {"alpha vs total return", alpha_vs_total},
        {"backtest accounting", accounting},
        {"strategy ordering", strategy_ordering},
        {"preprocessing goldens", preprocessing_goldens},
        {"end-to-end determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
                  << o.detail << std::endl;
    }
    return failures == 0 ? 0 : 1;
}
