#include "cli.hpp"

#include "sentrade/backtest.hpp"
#include "sentrade/classify.hpp"
#include "sentrade/error.hpp"
#include "sentrade/features.hpp"
#include "sentrade/ingest.hpp"
#include "sentrade/qlearn.hpp"
#include "sentrade/synth.hpp"
#include "sentrade/text_io.hpp"
#include "sentrade/tweetprep.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>
#include <openssl/evp.h>

namespace sentrade::cli {

namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Records every input read and output written so the run manifest can pin
/// them by digest.
class Run {
public:
    explicit Run(const CLI::App& sub) : sub_(sub) {}

    std::string read(const fs::path& p) {
        std::string text = io::read_file(p);
        inputs_[p.generic_string()] = sha256_hex(text);
        return text;
    }

    void write(const fs::path& p, std::string_view text) {
        io::write_file(p, text);
        outputs_[p.generic_string()] = sha256_hex(text);
    }

    void set_seed(std::uint64_t seed) { seed_ = seed; }
    ojson& results() { return results_; }

    void finish(const fs::path& manifest) {
        ojson j;
        j["command"] = sub_.get_name();
        ojson cfg = ojson::object();
        std::istringstream lines(sub_.config_to_str(true, false));
        for (std::string line; std::getline(lines, line);) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key(io::trim(std::string_view(line).substr(0, eq)));
            if (key == "config") continue;
            std::string value(io::trim(std::string_view(line).substr(eq + 1)));
            if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
                value = value.substr(1, value.size() - 2);
            }
            cfg[key] = value;
        }
        j["config"] = std::move(cfg);
        j["seed"] = seed_ ? ojson(*seed_) : ojson(nullptr);
        j["inputs"] = inputs_;
        j["outputs"] = outputs_;
        if (!results_.is_null()) j["results"] = results_;
        io::write_file(manifest, j.dump(2) + "\n");
    }

private:
    const CLI::App& sub_;
    std::map<std::string, std::string> inputs_;
    std::map<std::string, std::string> outputs_;
    std::optional<std::uint64_t> seed_;
    ojson results_;
};

fs::path manifest_for(const fs::path& out) { return fs::path(out.string() + ".manifest.json"); }

fs::path sidecar_for(const fs::path& csv) {
    auto p = csv;
    return p.replace_extension(".meta.json");
}

Dataset load_dataset(Run& run, const fs::path& csv) {
    const auto text = run.read(csv);
    const auto meta = run.read(sidecar_for(csv));
    return parse_dataset(text, meta);
}

std::vector<PriceBar> load_bars(Run& run, const fs::path& p) { return parse_prices(run.read(p)); }

std::string join(const std::vector<std::string>& xs, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) out += sep;
        out += xs[i];
    }
    return out;
}

// ─── Model training shared by train / experiment ────────────────────────────

struct TrainSpec {
    std::string model = "logreg";
    std::optional<double> c;
    std::optional<double> gamma;
    int folds = 3;
    std::vector<std::string> features;
    std::vector<double> c_grid = {0.01, 0.1, 1, 10, 100};
    std::vector<double> gamma_grid = {0.01, 0.1, 1, 10};
};

struct TrainOutcome {
    Classifier model;
    std::optional<CvReport> cv;
    double train_accuracy = 0.0;
    double test_accuracy = 0.0;
};

ModelKind model_kind(const std::string& model) {
    if (model == "svm") return ModelKind::Svm;
    if (model == "logreg" || model == "baseline") return ModelKind::LogReg;
    throw UsageError("unknown model '" + model + "' (logreg, svm, baseline)");
}

Dataset model_view(const Dataset& ds, const TrainSpec& spec) {
    if (spec.model == "baseline") {
        if (!spec.features.empty()) throw UsageError("--features cannot be combined with baseline");
        return ds.select(technical_feature_names(ds.windows));
    }
    return spec.features.empty() ? ds : ds.select(spec.features);
}

HyperGrid grid_for(const TrainSpec& spec) {
    return model_kind(spec.model) == ModelKind::Svm ? HyperGrid::svm(spec.c_grid, spec.gamma_grid)
                                                    : HyperGrid::logreg(spec.c_grid);
}

TrainOutcome train_model(const Dataset& full, const TrainSpec& spec) {
    const ModelKind kind = model_kind(spec.model);
    const Dataset ds = model_view(full, spec);
    const auto train = TrainingData::from_dataset_train(ds);
    const auto test = TrainingData::from_dataset_test(ds);

    TrainOutcome outcome{LogRegModel{}, std::nullopt, 0.0, 0.0};
    HyperPoint point;
    if (spec.c && (kind == ModelKind::LogReg || spec.gamma)) {
        point = {*spec.c, kind == ModelKind::Svm ? *spec.gamma : 0.0};
    } else {
        HyperGrid grid = grid_for(spec);
        if (spec.c) {
            std::erase_if(grid.points, [&](const HyperPoint& p) { return p.c != *spec.c; });
        }
        if (spec.gamma) {
            std::erase_if(grid.points, [&](const HyperPoint& p) { return p.gamma != *spec.gamma; });
        }
        outcome.cv = cross_validate(train, grid, spec.folds);
        point = outcome.cv->best_point();
    }
    outcome.model = fit(train, kind, point);
    outcome.train_accuracy = evaluate(outcome.model, train).accuracy;
    outcome.test_accuracy = evaluate(outcome.model, test).accuracy;
    return outcome;
}

void add_grid_options(CLI::App* sub, TrainSpec& spec) {
    sub->add_option("--c-grid", spec.c_grid, "C values for cross-validation")->delimiter(',');
    sub->add_option("--gamma-grid", spec.gamma_grid, "RBF gamma values for cross-validation")
        ->delimiter(',');
}

// ─── Subcommands ────────────────────────────────────────────────────────────

struct SynthArgs {
    std::string out_dir;
    synth::SynthParams params;
    std::string start_date = "2016-01-04";
};

void cmd_synth(const CLI::App& sub, SynthArgs& a, std::ostream& out) {
    const auto start = Date::parse(a.start_date);
    if (!start) throw UsageError("--start-date must be YYYY-MM-DD");
    a.params.start_date = *start;
    const auto data = synth::generate(a.params);

    Run run(sub);
    run.set_seed(a.params.seed);
    const fs::path dir(a.out_dir);
    run.write(dir / "prices.csv", format_prices(data.bars));
    run.write(dir / "tweets_product.jsonl", format_tweets(data.product_tweets));
    run.write(dir / "tweets_ticker.jsonl", format_tweets(data.ticker_tweets));
    std::string latent = "date,latent,event_day\n";
    for (std::size_t t = 0; t < data.bars.size(); ++t) {
        latent += fmt::format("{},{},{}\n", data.bars[t].date.to_string(),
                              io::format_double(data.latent[t]), data.event_day[t] ? 1 : 0);
    }
    run.write(dir / "latent.csv", latent);
    run.finish(dir / "synth.manifest.json");
    out << fmt::format("wrote {} days to {}\n", data.bars.size(), dir.generic_string());
}

struct PrepArgs {
    std::string tweets;
    std::string prices;
    std::string lexicon;
    std::string stopwords;
    std::string source = "product";
    double english_threshold = 0.15;
    std::string out;
    std::string rejections;
};

void cmd_prep(const CLI::App& sub, PrepArgs& a, std::ostream& out) {
    Run run(sub);
    const auto tag = parse_source_tag(a.source);
    const auto bars = load_bars(run, a.prices);
    const auto tweets = parse_tweets(run.read(a.tweets), tag);
    const Lexicon lex = a.lexicon.empty() ? builtin_lexicon() : Lexicon::parse_csv(run.read(a.lexicon));
    std::optional<StopwordList> stop;
    if (!a.stopwords.empty()) stop = StopwordList::parse(run.read(a.stopwords));

    std::vector<Date> days;
    for (const auto& b : bars) days.push_back(b.date);
    FilterConfig fc;
    fc.stopwords = stop ? &*stop : nullptr;
    fc.english_threshold = a.english_threshold;
    const auto result = prepare_sentiment(tweets, lex, days, fc);

    const fs::path out_path(a.out);
    const fs::path rej_path =
        a.rejections.empty() ? fs::path(out_path).replace_extension(".rejections.csv")
                             : fs::path(a.rejections);
    run.write(out_path, format_sentiment_days(result.days));
    std::string log = "reason,count\n";
    for (std::size_t k = 0; k < kRejectReasons.size(); ++k) {
        log += fmt::format("{},{}\n", to_string(kRejectReasons[k]), result.rejected[k]);
    }
    log += fmt::format("kept,{}\n", result.kept);
    run.write(rej_path, log);
    run.results() = {{"tweets", tweets.size()}, {"kept", result.kept}};
    run.finish(manifest_for(out_path));
    out << fmt::format("kept {} of {} tweets over {} trading days\n", result.kept, tweets.size(),
                       result.days.size());
}

struct FeaturizeArgs {
    std::string prices;
    std::string sentiment;
    std::string target = "alpha";
    std::string tag;
    FeatureWindows windows;
    std::string out;
};

void cmd_featurize(const CLI::App& sub, FeaturizeArgs& a, std::ostream& out) {
    Run run(sub);
    const auto bars = load_bars(run, a.prices);
    const auto sent = parse_sentiment_days(run.read(a.sentiment));
    auto ds = build_dataset(bars, sent, parse_target_kind(a.target), a.windows);
    ds.tag = a.tag;
    const fs::path out_path(a.out);
    run.write(out_path, format_dataset_csv(ds));
    run.write(sidecar_for(out_path), format_dataset_sidecar(ds));
    run.finish(manifest_for(out_path));
    out << fmt::format("{} rows ({} train), {} features\n", ds.rows.size(), ds.split_index,
                       ds.feature_names.size());
}

struct TrainArgs {
    std::string dataset;
    TrainSpec spec;
    std::string out;
};

void cmd_train(const CLI::App& sub, TrainArgs& a, std::ostream& out) {
    Run run(sub);
    const auto ds = load_dataset(run, a.dataset);
    const auto outcome = train_model(ds, a.spec);
    const fs::path out_path(a.out);
    run.write(out_path, classifier_to_json(outcome.model));
    auto& r = run.results();
    r["train_accuracy"] = outcome.train_accuracy;
    r["test_accuracy"] = outcome.test_accuracy;
    if (outcome.cv) {
        r["cv_accuracy"] = outcome.cv->best_accuracy();
        r["c"] = outcome.cv->best_point().c;
        r["gamma"] = outcome.cv->best_point().gamma;
    }
    run.finish(manifest_for(out_path));
    out << fmt::format("{}: train accuracy {:.4f}, test accuracy {:.4f}\n", a.spec.model,
                       outcome.train_accuracy, outcome.test_accuracy);
}

struct CvArgs {
    std::string dataset;
    TrainSpec spec;
    std::string out;
};

void cmd_cv(const CLI::App& sub, CvArgs& a, std::ostream& out) {
    Run run(sub);
    const auto ds = model_view(load_dataset(run, a.dataset), a.spec);
    const auto report =
        cross_validate(TrainingData::from_dataset_train(ds), grid_for(a.spec), a.spec.folds);
    const fs::path out_path(a.out);
    run.write(out_path, format_cv_report(report));
    run.results() = {{"best_c", report.best_point().c},
                     {"best_gamma", report.best_point().gamma},
                     {"best_accuracy", report.best_accuracy()}};
    run.finish(manifest_for(out_path));
    out << fmt::format("best C {} gamma {} mean accuracy {:.4f}\n", report.best_point().c,
                       report.best_point().gamma, report.best_accuracy());
}

struct RfecvArgs {
    std::string dataset;
    TrainSpec spec;
    std::uint64_t seed = 0;
    std::string out;
};

void cmd_rfecv(const CLI::App& sub, RfecvArgs& a, std::ostream& out) {
    Run run(sub);
    run.set_seed(a.seed);
    const auto ds = model_view(load_dataset(run, a.dataset), a.spec);
    const auto result =
        rfecv(TrainingData::from_dataset_train(ds), grid_for(a.spec), a.spec.folds, a.seed);
    std::string csv = "step,n_features,cv_accuracy,c,gamma,dropped,features\n";
    for (std::size_t i = 0; i < result.trace.size(); ++i) {
        const auto& s = result.trace[i];
        csv += fmt::format("{},{},{},{},{},{},{}\n", i, s.features.size(),
                           io::format_double(s.cv_accuracy), io::format_double(s.best_point.c),
                           io::format_double(s.best_point.gamma), s.dropped, join(s.features, ";"));
    }
    const fs::path out_path(a.out);
    run.write(out_path, csv);
    run.results() = {{"selected", result.selected}};
    run.finish(manifest_for(out_path));
    out << "selected: " << join(result.selected, ",") << "\n";
}

struct QtrainArgs {
    std::string dataset;
    std::string prices;
    int epochs = 50;
    qlearn::EpisodeConfig cfg;
    bool no_lr_decay = false;
    std::string out;
};

void cmd_qtrain(const CLI::App& sub, QtrainArgs& a, std::ostream& out) {
    Run run(sub);
    run.set_seed(a.cfg.seed);
    a.cfg.decay_learning_rate = !a.no_lr_decay;
    const auto ds = load_dataset(run, a.dataset);
    const auto bars = load_bars(run, a.prices);
    const TargetSeries targets(bars, ds.target_kind);
    const auto result = qlearn::run_training(ds.train(), ds.feature_names, targets, a.cfg, a.epochs);
    const fs::path out_path(a.out);
    run.write(out_path, qlearn::weights_to_json(result.weights, a.cfg));
    const double mean_reward = qlearn::greedy_mean_reward(result.weights, ds.train(), targets, a.cfg);
    run.results() = {{"steps", result.steps},
                     {"epoch_rewards", result.epoch_rewards},
                     {"greedy_mean_reward", mean_reward}};
    run.finish(manifest_for(out_path));
    out << fmt::format("{} epochs, {} steps, greedy mean daily reward {:.6f}\n", a.epochs,
                       result.steps, mean_reward);
}

struct BacktestArgs {
    std::string dataset;
    std::string prices;
    std::string q_weights;
    std::string model;
    std::string baseline;
    double cost = 0.0;
    bool frozen = false;
    std::string out_dir;
};

void cmd_backtest(const CLI::App& sub, BacktestArgs& a, std::ostream& out) {
    Run run(sub);
    const auto ds = load_dataset(run, a.dataset);
    const auto bars = load_bars(run, a.prices);
    const TargetSeries targets(bars, ds.target_kind);

    std::vector<backtest::Strategy> strategies{backtest::Strategy::oracle()};
    if (!a.q_weights.empty()) {
        auto [w, cfg] = qlearn::weights_from_json(run.read(a.q_weights));
        strategies.push_back(backtest::Strategy::q_learning(std::move(w), cfg, !a.frozen));
    }
    if (!a.model.empty()) {
        strategies.push_back(backtest::Strategy::ml_signal(classifier_from_json(run.read(a.model))));
    }
    if (!a.baseline.empty()) {
        strategies.push_back(
            backtest::Strategy::baseline(classifier_from_json(run.read(a.baseline))));
    }

    std::vector<backtest::EquityCurve> curves;
    const fs::path dir(a.out_dir);
    for (const auto& s : strategies) {
        curves.push_back(backtest::run(s, ds.test(), ds.feature_names, targets, a.cost));
        run.write(dir / (s.name + ".csv"), backtest::format_curve_csv(curves.back()));
    }
    const auto table = backtest::compare(curves);
    run.write(dir / "comparison.csv", backtest::format_comparison_csv(table));
    run.write(dir / "equity.svg", backtest::render_svg(curves));
    run.finish(dir / "backtest.manifest.json");
    for (const auto& m : table) {
        out << fmt::format("{:<12} final {:>10.4f}  annualized {:>8.4f}  max drawdown {:.4f}  hit rate {:.4f}\n",
                           m.name, m.final_equity, m.annualized_return, m.max_drawdown, m.hit_rate);
    }
}

struct ExperimentArgs {
    std::string prices;
    std::string product_sentiment;
    std::string ticker_sentiment;
    std::vector<std::string> targets = {"alpha", "total"};
    std::vector<std::string> tweet_sets = {"product", "ticker"};
    std::vector<std::string> models = {"logreg", "svm", "baseline"};
    TrainSpec spec;
    std::string out;
};

void cmd_experiment(const CLI::App& sub, ExperimentArgs& a, std::ostream& out) {
    Run run(sub);
    for (const auto& set : a.tweet_sets) {
        if (set != "product" && set != "ticker") throw UsageError("unknown tweet set '" + set + "'");
        const auto& path = set == "product" ? a.product_sentiment : a.ticker_sentiment;
        if (path.empty()) throw UsageError("tweet set '" + set + "' needs --" + set + "-sentiment");
    }
    for (const auto& m : a.models) model_kind(m);
    for (const auto& t : a.targets) parse_target_kind(t);

    const auto bars = load_bars(run, a.prices);
    std::string csv = "target,tweet_set,model,c,gamma,cv_accuracy,train_accuracy,test_accuracy\n";
    for (const auto& set : a.tweet_sets) {
        const auto sent = parse_sentiment_days(
            run.read(set == "product" ? a.product_sentiment : a.ticker_sentiment));
        for (const auto& target : a.targets) {
            auto ds = build_dataset(bars, sent, parse_target_kind(target));
            ds.tag = set;
            for (const auto& model : a.models) {
                TrainSpec spec = a.spec;
                spec.model = model;
                const auto o = train_model(ds, spec);
                csv += fmt::format("{},{},{},{},{},{},{},{}\n", target, set, model,
                                   io::format_double(o.cv->best_point().c),
                                   io::format_double(o.cv->best_point().gamma),
                                   io::format_double(o.cv->best_accuracy()),
                                   io::format_double(o.train_accuracy),
                                   io::format_double(o.test_accuracy));
                out << fmt::format("{:<6} {:<8} {:<9} test accuracy {:.4f}\n", target, set, model,
                                   o.test_accuracy);
            }
        }
    }
    const fs::path out_path(a.out);
    run.write(out_path, csv);
    run.finish(manifest_for(out_path));
}

struct ReportArgs {
    std::string comparison;
    std::string accuracy;
    std::string out;
};

std::string csv_to_markdown(std::string_view csv) {
    std::string md;
    const auto ls = io::lines(csv);
    for (std::size_t i = 0; i < ls.size(); ++i) {
        if (io::trim(ls[i]).empty()) continue;
        std::string row = "|";
        for (auto cell : io::split(ls[i], ',')) row += " " + std::string(cell) + " |";
        md += row + "\n";
        if (i == 0) {
            std::string rule = "|";
            for (std::size_t k = 0; k < io::split(ls[i], ',').size(); ++k) rule += " --- |";
            md += rule + "\n";
        }
    }
    return md;
}

void cmd_report(const CLI::App& sub, ReportArgs& a, std::ostream& out) {
    if (a.comparison.empty() && a.accuracy.empty()) {
        throw UsageError("report needs --comparison and/or --accuracy");
    }
    Run run(sub);
    std::string md = "# sentrade report\n";
    if (!a.accuracy.empty()) {
        md += "\n## Classifier accuracy\n\n" + csv_to_markdown(run.read(a.accuracy));
    }
    if (!a.comparison.empty()) {
        md += "\n## Strategy comparison\n\n" + csv_to_markdown(run.read(a.comparison));
    }
    const fs::path out_path(a.out);
    run.write(out_path, md);
    run.finish(manifest_for(out_path));
    out << "wrote " << out_path.generic_string() << "\n";
}

// ─── Argument plumbing ──────────────────────────────────────────────────────

/// Parses a flat `key = value` file; blank lines and `#` comments skipped.
std::vector<std::pair<std::string, std::string>> read_config(const fs::path& path) {
    std::string text;
    try {
        text = io::read_file(path);
    } catch (const Error&) {
        throw UsageError("cannot read config file " + path.generic_string());
    }
    std::vector<std::pair<std::string, std::string>> kv;
    std::size_t n = 0;
    for (auto line : io::lines(text)) {
        ++n;
        line = io::trim(line);
        if (line.empty() || line.front() == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw UsageError(fmt::format("config line {}: expected key = value", n));
        }
        std::string key(io::trim(line.substr(0, eq)));
        std::string value(io::trim(line.substr(eq + 1)));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        kv.emplace_back(std::move(key), std::move(value));
    }
    return kv;
}

/// Splices `--config` entries into the argument list; explicit flags win.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> kept;
    std::optional<std::string> config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw UsageError("--config needs a path");
            config = args[++i];
        } else if (args[i].starts_with("--config=")) {
            config = args[i].substr(9);
        } else {
            kept.push_back(args[i]);
        }
    }
    if (!config) return kept;
    auto given = [&](const std::string& key) {
        const std::string flag = "--" + key;
        return std::any_of(kept.begin(), kept.end(), [&](const std::string& a) {
            return a == flag || a.starts_with(flag + "=");
        });
    };
    for (const auto& [key, value] : read_config(*config)) {
        if (!given(key)) kept.push_back("--" + key + "=" + value);
    }
    return kept;
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("SHA-256 digest failed");
    }
    std::string hex;
    for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", md[i]);
    return hex;
}

int run_cli(const std::vector<std::string>& raw_args, std::ostream& out, std::ostream& err) {
    const CLI::IsMember kModelNames({"logreg", "svm", "baseline"});
    CLI::App app{"Sentiment-driven trading research pipeline", "sentrade"};
    app.option_defaults()->always_capture_default();
    app.require_subcommand(1);
    auto add_config = [](CLI::App* sub) {
        sub->add_option("--config", "Flat key = value file with option overrides");
    };

    SynthArgs synth_args;
    auto* synth = app.add_subcommand("synth", "Generate a synthetic market with tweets");
    synth->add_option("--out-dir", synth_args.out_dir, "Output directory")->required();
    synth->add_option("--days", synth_args.params.n_days, "Trading days");
    synth->add_option("--seed", synth_args.params.seed, "Random seed");
    synth->add_option("--beta", synth_args.params.signal_strength, "Sentiment signal strength");
    synth->add_option("--noise-vol", synth_args.params.noise_vol, "Idiosyncratic daily vol");
    synth->add_option("--market-vol", synth_args.params.market_vol, "Sector ETF daily vol");
    synth->add_option("--tweet-rate", synth_args.params.tweet_rate, "Mean tweets per day");
    synth->add_option("--regime-switch-prob", synth_args.params.regime_switch_prob,
                      "Probability of a high-volume event day");
    synth->add_option("--persistence", synth_args.params.sentiment_persistence,
                      "AR(1) coefficient of the latent sentiment");
    synth->add_option("--event-multiplier", synth_args.params.event_volume_multiplier,
                      "Tweet-rate multiplier on event days");
    synth->add_option("--start-date", synth_args.start_date, "First trading day (weekday)");
    add_config(synth);

    PrepArgs prep_args;
    auto* prep = app.add_subcommand("prep", "Filter, clean, score and aggregate tweets");
    prep->add_option("--tweets", prep_args.tweets, "Tweets JSONL")->required();
    prep->add_option("--prices", prep_args.prices, "Price CSV (trading calendar)")->required();
    prep->add_option("--lexicon", prep_args.lexicon, "Lexicon CSV (default: built-in)");
    prep->add_option("--stopwords", prep_args.stopwords, "Stopword list (default: built-in)");
    prep->add_option("--source", prep_args.source, "Tweet set tag: ticker or product")
        ->check(CLI::IsMember({"ticker", "product"}));
    prep->add_option("--english-threshold", prep_args.english_threshold,
                     "Minimum stopword share for English");
    prep->add_option("--out", prep_args.out, "Sentiment CSV")->required();
    prep->add_option("--rejections", prep_args.rejections,
                     "Rejection log (default: <out>.rejections.csv)");
    add_config(prep);

    FeaturizeArgs feat_args;
    auto* featurize = app.add_subcommand("featurize", "Build a labeled, normalized dataset");
    featurize->add_option("--prices", feat_args.prices, "Price CSV")->required();
    featurize->add_option("--sentiment", feat_args.sentiment, "Sentiment CSV")->required();
    featurize->add_option("--target", feat_args.target, "alpha or total")
        ->check(CLI::IsMember({"alpha", "total"}));
    featurize->add_option("--tag", feat_args.tag, "Dataset tag (e.g. tweet set)");
    featurize->add_option("--momentum-window", feat_args.windows.momentum)->check(CLI::PositiveNumber);
    featurize->add_option("--volatility-window", feat_args.windows.volatility)->check(CLI::PositiveNumber);
    featurize->add_option("--sent-momentum-window", feat_args.windows.sent_momentum)
        ->check(CLI::PositiveNumber);
    featurize->add_option("--sent-reversal-window", feat_args.windows.sent_reversal)
        ->check(CLI::PositiveNumber);
    featurize->add_option("--out", feat_args.out, "Dataset CSV (sidecar: .meta.json)")->required();
    add_config(featurize);

    TrainArgs train_args;
    auto* train = app.add_subcommand("train", "Train a classifier on the training half");
    train->add_option("--dataset", train_args.dataset, "Dataset CSV")->required();
    train->add_option("--model", train_args.spec.model, "logreg, svm or baseline")
        ->check(kModelNames);
    train->add_option("--c", train_args.spec.c, "Fixed C (otherwise cross-validated)");
    train->add_option("--gamma", train_args.spec.gamma, "Fixed RBF gamma");
    train->add_option("--folds", train_args.spec.folds, "CV folds")->check(CLI::Range(2, 100));
    train->add_option("--features", train_args.spec.features, "Feature subset")->delimiter(',');
    add_grid_options(train, train_args.spec);
    train->add_option("--out", train_args.out, "Model JSON")->required();
    add_config(train);

    CvArgs cv_args;
    auto* cv = app.add_subcommand("cv", "Cross-validate a hyperparameter grid");
    cv->add_option("--dataset", cv_args.dataset, "Dataset CSV")->required();
    cv->add_option("--model", cv_args.spec.model, "logreg, svm or baseline")
        ->check(kModelNames);
    cv->add_option("--folds", cv_args.spec.folds, "CV folds")->check(CLI::Range(2, 100));
    cv->add_option("--features", cv_args.spec.features, "Feature subset")->delimiter(',');
    add_grid_options(cv, cv_args.spec);
    cv->add_option("--out", cv_args.out, "CV report CSV")->required();
    add_config(cv);

    RfecvArgs rfecv_args;
    auto* rfe = app.add_subcommand("rfecv", "Recursive feature elimination with CV");
    rfe->add_option("--dataset", rfecv_args.dataset, "Dataset CSV")->required();
    rfe->add_option("--model", rfecv_args.spec.model, "logreg, svm or baseline")
        ->check(kModelNames);
    rfe->add_option("--folds", rfecv_args.spec.folds, "CV folds")->check(CLI::Range(2, 100));
    rfe->add_option("--seed", rfecv_args.seed, "Permutation-importance seed (svm)");
    add_grid_options(rfe, rfecv_args.spec);
    rfe->add_option("--out", rfecv_args.out, "Elimination trace CSV")->required();
    add_config(rfe);

    QtrainArgs q_args;
    auto* qtrain = app.add_subcommand("qtrain", "Train the Q-learning agent on the training half");
    qtrain->add_option("--dataset", q_args.dataset, "Dataset CSV")->required();
    qtrain->add_option("--prices", q_args.prices, "Price CSV")->required();
    qtrain->add_option("--epochs", q_args.epochs, "Passes over the training days")
        ->check(CLI::NonNegativeNumber);
    qtrain->add_option("--seed", q_args.cfg.seed, "Exploration seed");
    qtrain->add_option("--learning-rate", q_args.cfg.learning_rate, "Initial SGD step");
    qtrain->add_flag("--no-lr-decay", q_args.no_lr_decay, "Keep the step size constant");
    qtrain->add_option("--discount", q_args.cfg.discount, "Discount factor");
    qtrain->add_option("--epsilon", q_args.cfg.epsilon.initial, "Initial exploration rate");
    qtrain->add_option("--epsilon-decay", q_args.cfg.epsilon.decay, "Per-step epsilon multiplier");
    qtrain->add_option("--epsilon-floor", q_args.cfg.epsilon.floor, "Lowest exploration rate");
    qtrain->add_option("--stop-loss", q_args.cfg.stop_loss, "Equity ratio that forces an exit");
    qtrain->add_option("--leverage-limit", q_args.cfg.leverage_limit, "Largest |position| (0 or 1)");
    qtrain->add_option("--out", q_args.out, "Weights JSON")->required();
    add_config(qtrain);

    BacktestArgs bt_args;
    auto* bt = app.add_subcommand("backtest", "Run strategies over the test half");
    bt->add_option("--dataset", bt_args.dataset, "Dataset CSV")->required();
    bt->add_option("--prices", bt_args.prices, "Price CSV")->required();
    bt->add_option("--q-weights", bt_args.q_weights, "Q-learning weights JSON");
    bt->add_option("--model", bt_args.model, "ML signal model JSON");
    bt->add_option("--baseline", bt_args.baseline, "Technical-only model JSON");
    bt->add_option("--cost", bt_args.cost, "Cost per unit position change")
        ->check(CLI::NonNegativeNumber);
    bt->add_flag("--frozen", bt_args.frozen, "Disable online Q-learning updates");
    bt->add_option("--out-dir", bt_args.out_dir, "Output directory")->required();
    add_config(bt);

    ExperimentArgs ex_args;
    auto* ex = app.add_subcommand("experiment", "Accuracy matrix over target x tweet set x model");
    ex->add_option("--prices", ex_args.prices, "Price CSV")->required();
    ex->add_option("--product-sentiment", ex_args.product_sentiment, "Product-tweet sentiment CSV");
    ex->add_option("--ticker-sentiment", ex_args.ticker_sentiment, "Ticker-tweet sentiment CSV");
    ex->add_option("--targets", ex_args.targets, "alpha,total")->delimiter(',');
    ex->add_option("--tweet-sets", ex_args.tweet_sets, "product,ticker")->delimiter(',');
    ex->add_option("--models", ex_args.models, "logreg,svm,baseline")->delimiter(',');
    ex->add_option("--folds", ex_args.spec.folds, "CV folds")->check(CLI::Range(2, 100));
    add_grid_options(ex, ex_args.spec);
    ex->add_option("--out", ex_args.out, "Accuracy matrix CSV")->required();
    add_config(ex);

    ReportArgs rep_args;
    auto* rep = app.add_subcommand("report", "Markdown summary of accuracy and backtest tables");
    rep->add_option("--comparison", rep_args.comparison, "comparison.csv from backtest");
    rep->add_option("--accuracy", rep_args.accuracy, "Accuracy CSV from experiment");
    rep->add_option("--out", rep_args.out, "Markdown file")->required();
    add_config(rep);

    try {
        auto args = expand_config(raw_args);
        std::reverse(args.begin(), args.end());
        app.parse(args);

        if (synth->parsed()) cmd_synth(*synth, synth_args, out);
        else if (prep->parsed()) cmd_prep(*prep, prep_args, out);
        else if (featurize->parsed()) cmd_featurize(*featurize, feat_args, out);
        else if (train->parsed()) cmd_train(*train, train_args, out);
        else if (cv->parsed()) cmd_cv(*cv, cv_args, out);
        else if (rfe->parsed()) cmd_rfecv(*rfe, rfecv_args, out);
        else if (qtrain->parsed()) cmd_qtrain(*qtrain, q_args, out);
        else if (bt->parsed()) cmd_backtest(*bt, bt_args, out);
        else if (ex->parsed()) cmd_experiment(*ex, ex_args, out);
        else if (rep->parsed()) cmd_report(*rep, rep_args, out);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        const bool usage = e.code() == ErrorCode::InvalidParams || e.code() == ErrorCode::FileNotFound;
        return usage ? kExitUsage : kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
}

}  // namespace sentrade::cli
