#include "sentrade/qlearn.hpp"
#include "sentrade/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>
#include <json.hpp>

namespace sentrade::qlearn {

namespace {

std::size_t action_index(TradeAction a) { return static_cast<std::size_t>(a); }

void check_dims(const QWeights& w, const AgentState& s) {
    if (s.market.size() != w.market_features.size() ||
        w.w.size() != state_dims(s.market.size()) * kActionCount) {
        throw Error(ErrorCode::DimensionMismatch,
                    fmt::format("state has {} market values, weights expect {} ({} weights)",
                                s.market.size(), w.market_features.size(), w.w.size()));
    }
}

double effective_rate(const QWeights& w, const EpisodeConfig& cfg) {
    if (!cfg.decay_learning_rate) return w.learning_rate;
    return w.learning_rate / std::sqrt(static_cast<double>(w.updates + 1));
}

AgentState make_state(const FeatureRow& row, int position, double equity) {
    return {row.values, position, equity};
}

}  // namespace

std::string_view to_string(TradeAction a) {
    switch (a) {
        case TradeAction::Buy: return "buy";
        case TradeAction::Hold: return "hold";
        case TradeAction::Sell: return "sell";
    }
    return "?";
}

int apply_action(TradeAction a, int position) {
    switch (a) {
        case TradeAction::Buy: return position + 1;
        case TradeAction::Sell: return position - 1;
        case TradeAction::Hold: return position;
    }
    return position;
}

double SparseVector::dot(std::span<const double> w) const {
    double s = 0.0;
    for (const auto& [i, v] : entries) s += w[i] * v;
    return s;
}

std::vector<double> SparseVector::dense() const {
    std::vector<double> out(dims, 0.0);
    for (const auto& [i, v] : entries) out[i] += v;
    return out;
}

double sgd_step(std::vector<double>& w, const SparseVector& phi, double target, double eta) {
    const double residual = phi.dot(w) - target;
    for (const auto& [i, v] : phi.entries) w[i] -= eta * residual * v;
    return residual;
}

double td_step(std::vector<double>& w, const SparseVector& phi_sa,
               std::span<const SparseVector> next, double reward, double discount, double eta) {
    double next_value = 0.0;
    if (!next.empty()) {
        next_value = -std::numeric_limits<double>::infinity();
        for (const auto& p : next) next_value = std::max(next_value, p.dot(w));
    }
    return sgd_step(w, phi_sa, reward + discount * next_value, eta);
}

double EpsilonSchedule::at(std::size_t step) const {
    return std::max(floor, initial * std::pow(decay, static_cast<double>(step)));
}

void EpisodeConfig::validate() const {
    auto fail = [](const std::string& msg) { throw Error(ErrorCode::InvalidParams, msg); };
    const auto& e = epsilon;
    if (!(e.initial >= 0.0 && e.initial <= 1.0)) fail("epsilon initial must lie in [0, 1]");
    if (!(e.floor >= 0.0 && e.floor <= 1.0)) fail("epsilon floor must lie in [0, 1]");
    if (!(e.decay > 0.0 && e.decay <= 1.0)) fail("epsilon decay must lie in (0, 1]");
    if (leverage_limit < 0 || leverage_limit > 1) fail("leverage limit must be 0 or 1");
    if (!(stop_loss >= 0.0 && stop_loss < 1.0)) fail("stop loss must lie in [0, 1)");
    if (!(learning_rate > 0.0 && learning_rate <= 1.0)) fail("learning rate must lie in (0, 1]");
    if (!(discount >= 0.0 && discount <= 1.0)) fail("discount must lie in [0, 1]");
}

QWeights QWeights::zeros(std::vector<std::string> market_features, const EpisodeConfig& cfg) {
    QWeights w;
    w.w.assign(qlearn::state_dims(market_features.size()) * kActionCount, 0.0);
    w.market_features = std::move(market_features);
    w.learning_rate = cfg.learning_rate;
    w.discount = cfg.discount;
    return w;
}

std::size_t state_dims(std::size_t market_dims) { return market_dims + 5; }

std::vector<double> state_vector(const AgentState& s) {
    if (s.position < -1 || s.position > 1) {
        throw std::invalid_argument(fmt::format("position {} outside [-1, 1]", s.position));
    }
    if (!(s.equity_ratio > 0.0)) throw std::invalid_argument("equity ratio must be positive");
    std::vector<double> v = s.market;
    v.push_back(s.position == -1 ? 1.0 : 0.0);
    v.push_back(s.position == 0 ? 1.0 : 0.0);
    v.push_back(s.position == 1 ? 1.0 : 0.0);
    v.push_back(std::log(s.equity_ratio));
    v.push_back(1.0);
    return v;
}

SparseVector phi(const AgentState& s, TradeAction a) {
    const auto v = state_vector(s);
    SparseVector out;
    out.dims = v.size() * kActionCount;
    const std::size_t offset = action_index(a) * v.size();
    out.entries.reserve(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out.entries.emplace_back(offset + i, v[i]);
    return out;
}

double q_value(const QWeights& w, const AgentState& s, TradeAction a) {
    check_dims(w, s);
    return phi(s, a).dot(w.w);
}

std::vector<TradeAction> valid_actions(const AgentState& s, const EpisodeConfig& cfg) {
    if (s.equity_ratio <= cfg.stop_loss) {
        if (s.position > 0) return {TradeAction::Sell};
        if (s.position < 0) return {TradeAction::Buy};
        return {TradeAction::Hold};
    }
    std::vector<TradeAction> out;
    for (auto a : kAllActions) {
        if (std::abs(apply_action(a, s.position)) <= cfg.leverage_limit ||
            std::abs(apply_action(a, s.position)) < std::abs(s.position)) {
            out.push_back(a);
        }
    }
    return out;
}

TradeAction greedy_action(const QWeights& w, const AgentState& s, const EpisodeConfig& cfg) {
    const auto valid = valid_actions(s, cfg);
    TradeAction best = valid.front();
    double best_q = q_value(w, s, best);
    for (std::size_t k = 1; k < valid.size(); ++k) {
        const double q = q_value(w, s, valid[k]);
        if (q > best_q) {
            best = valid[k];
            best_q = q;
        }
    }
    return best;
}

TradeAction select_action(const QWeights& w, const AgentState& s, const EpisodeConfig& cfg,
                          double epsilon, Rng& rng) {
    const double u = rng.uniform();
    if (u < epsilon) {
        const auto valid = valid_actions(s, cfg);
        return valid[rng.index(valid.size())];
    }
    return greedy_action(w, s, cfg);
}

void update(QWeights& w, const AgentState& s, TradeAction a, double reward,
            const AgentState& s_next, const EpisodeConfig& cfg) {
    check_dims(w, s_next);
    check_dims(w, s);
    std::vector<SparseVector> next;
    for (auto a2 : valid_actions(s_next, cfg)) next.push_back(phi(s_next, a2));
    td_step(w.w, phi(s, a), next, reward, w.discount, effective_rate(w, cfg));
    ++w.updates;
}

void update_terminal(QWeights& w, const AgentState& s, TradeAction a, double reward,
                     const EpisodeConfig& cfg) {
    check_dims(w, s);
    td_step(w.w, phi(s, a), {}, reward, w.discount, effective_rate(w, cfg));
    ++w.updates;
}

Policy greedy_policy(const QWeights& w, const EpisodeConfig& cfg) {
    return [w, cfg](const AgentState& s) { return greedy_action(w, s, cfg); };
}

TrainingResult run_training(std::span<const FeatureRow> rows,
                            std::span<const std::string> feature_names,
                            const TargetSeries& targets, const EpisodeConfig& cfg, int epochs) {
    cfg.validate();
    if (epochs < 0) throw Error(ErrorCode::InvalidParams, "epochs must be non-negative");
    TrainingResult result;
    result.weights = QWeights::zeros({feature_names.begin(), feature_names.end()}, cfg);
    if (rows.empty()) return result;

    std::vector<double> next_return(rows.size());
    for (std::size_t t = 0; t < rows.size(); ++t) {
        next_return[t] = targets.next_return(rows[t].date);
    }

    Rng rng(cfg.seed, 0x71ea);
    for (int epoch = 0; epoch < epochs; ++epoch) {
        int position = 0;
        double equity = 1.0;
        double total = 0.0;
        for (std::size_t t = 0; t < rows.size(); ++t) {
            const AgentState s = make_state(rows[t], position, equity);
            const TradeAction a =
                select_action(result.weights, s, cfg, cfg.epsilon.at(result.steps), rng);
            position = apply_action(a, position);
            const double reward = position * next_return[t];
            equity *= 1.0 + reward;
            total += reward;
            if (t + 1 < rows.size()) {
                update(result.weights, s, a, reward, make_state(rows[t + 1], position, equity), cfg);
            } else {
                update_terminal(result.weights, s, a, reward, cfg);
            }
            ++result.steps;
        }
        result.epoch_rewards.push_back(total);
    }
    return result;
}

double greedy_mean_reward(const QWeights& w, std::span<const FeatureRow> rows,
                          const TargetSeries& targets, const EpisodeConfig& cfg) {
    if (rows.empty()) return 0.0;
    int position = 0;
    double equity = 1.0;
    double total = 0.0;
    for (const auto& row : rows) {
        position = apply_action(greedy_action(w, make_state(row, position, equity), cfg), position);
        const double reward = position * targets.next_return(row.date);
        equity *= 1.0 + reward;
        total += reward;
    }
    return total / static_cast<double>(rows.size());
}

std::string weights_to_json(const QWeights& w, const EpisodeConfig& cfg) {
    nlohmann::ordered_json j;
    j["market_features"] = w.market_features;
    j["state_layout"] = {"market...", "pos_short", "pos_flat", "pos_long", "log_equity", "bias"};
    j["actions"] = {"buy", "hold", "sell"};
    j["learning_rate"] = w.learning_rate;
    j["discount"] = w.discount;
    j["updates"] = w.updates;
    j["config"] = {{"epsilon_initial", cfg.epsilon.initial},
                   {"epsilon_decay", cfg.epsilon.decay},
                   {"epsilon_floor", cfg.epsilon.floor},
                   {"leverage_limit", cfg.leverage_limit},
                   {"stop_loss", cfg.stop_loss},
                   {"learning_rate", cfg.learning_rate},
                   {"decay_learning_rate", cfg.decay_learning_rate},
                   {"discount", cfg.discount},
                   {"seed", cfg.seed}};
    j["weights"] = w.w;
    return j.dump(2) + "\n";
}

std::pair<QWeights, EpisodeConfig> weights_from_json(std::string_view json) {
    try {
        const auto j = nlohmann::json::parse(json);
        EpisodeConfig cfg;
        const auto& c = j.at("config");
        cfg.epsilon.initial = c.at("epsilon_initial").get<double>();
        cfg.epsilon.decay = c.at("epsilon_decay").get<double>();
        cfg.epsilon.floor = c.at("epsilon_floor").get<double>();
        cfg.leverage_limit = c.at("leverage_limit").get<int>();
        cfg.stop_loss = c.at("stop_loss").get<double>();
        cfg.learning_rate = c.at("learning_rate").get<double>();
        cfg.decay_learning_rate = c.at("decay_learning_rate").get<bool>();
        cfg.discount = c.at("discount").get<double>();
        cfg.seed = c.at("seed").get<std::uint64_t>();
        cfg.validate();

        QWeights w;
        w.market_features = j.at("market_features").get<std::vector<std::string>>();
        w.learning_rate = j.at("learning_rate").get<double>();
        w.discount = j.at("discount").get<double>();
        w.updates = j.at("updates").get<std::size_t>();
        w.w = j.at("weights").get<std::vector<double>>();
        if (w.w.size() != w.state_dims() * kActionCount) {
            throw Error(ErrorCode::DimensionMismatch,
                        fmt::format("{} weights for {} market features", w.w.size(),
                                    w.market_features.size()));
        }
        return {std::move(w), cfg};
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("malformed Q-weights JSON: ") + e.what());
    }
}

}  // namespace sentrade::qlearn
