#pragma once

#include "sentrade/features.hpp"
#include "sentrade/rng.hpp"

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace sentrade::qlearn {

/// Declaration order is also the argmax tie order.
enum class TradeAction { Buy = 0, Hold = 1, Sell = 2 };
inline constexpr std::array<TradeAction, 3> kAllActions{TradeAction::Buy, TradeAction::Hold,
                                                        TradeAction::Sell};
inline constexpr std::size_t kActionCount = kAllActions.size();

std::string_view to_string(TradeAction a);

/// Position after taking `a` at `position` (one unit per step).
int apply_action(TradeAction a, int position);

struct AgentState {
    std::vector<double> market;  // normalized feature values
    int position = 0;            // -1, 0 or +1
    double equity_ratio = 1.0;
};

/// Sparse vector: (index, value) pairs over a fixed dimension.
struct SparseVector {
    std::size_t dims = 0;
    std::vector<std::pair<std::size_t, double>> entries;

    double dot(std::span<const double> w) const;
    std::vector<double> dense() const;
};

/// One plain SGD step toward `target`: w <- w - eta (w.phi - target) phi.
/// Returns the residual w.phi - target before the step.
double sgd_step(std::vector<double>& w, const SparseVector& phi, double target, double eta);

/// Semi-gradient Q-learning step for an arbitrary feature map: target is
/// reward + discount * max over `next` of w.phi (0 when `next` is empty).
/// Returns the residual before the step.
double td_step(std::vector<double>& w, const SparseVector& phi_sa,
               std::span<const SparseVector> next, double reward, double discount, double eta);

struct EpsilonSchedule {
    double initial = 0.2;
    double decay = 0.999;  // multiplicative, per step
    double floor = 0.01;

    double at(std::size_t step) const;
};

struct EpisodeConfig {
    EpsilonSchedule epsilon;
    int leverage_limit = 1;
    double stop_loss = 0.5;
    double learning_rate = 0.05;
    bool decay_learning_rate = true;  // eta_t = eta0 / sqrt(t + 1)
    double discount = 0.95;
    std::uint64_t seed = 0;

    /// InvalidParams when out of range.
    void validate() const;
};

struct QWeights {
    std::vector<double> w;
    std::vector<std::string> market_features;
    double learning_rate = 0.05;  // eta0
    double discount = 0.95;
    std::size_t updates = 0;      // drives the 1/sqrt(t) decay

    static QWeights zeros(std::vector<std::string> market_features, const EpisodeConfig& cfg);
    std::size_t state_dims() const { return market_features.size() + 5; }
};

/// [market..., one-hot(position -1, 0, +1), log(equity_ratio), 1]
std::size_t state_dims(std::size_t market_dims);
std::vector<double> state_vector(const AgentState& s);

/// The state vector copied into the block of action `a`; zeros elsewhere.
SparseVector phi(const AgentState& s, TradeAction a);

/// DimensionMismatch if the state does not fit the weights.
double q_value(const QWeights& w, const AgentState& s, TradeAction a);

/// Leverage masking; once equity_ratio <= stop_loss only the move toward
/// flat is allowed (Hold when already flat).
std::vector<TradeAction> valid_actions(const AgentState& s, const EpisodeConfig& cfg);

TradeAction greedy_action(const QWeights& w, const AgentState& s, const EpisodeConfig& cfg);

/// Draws u ~ U[0,1) on every call; explores uniformly over the valid actions
/// when u < epsilon, otherwise acts greedily.
TradeAction select_action(const QWeights& w, const AgentState& s, const EpisodeConfig& cfg,
                          double epsilon, Rng& rng);

/// Semi-gradient Q-learning step bootstrapping on the masked max at s_next.
void update(QWeights& w, const AgentState& s, TradeAction a, double reward,
            const AgentState& s_next, const EpisodeConfig& cfg);
/// Same with a terminal next state (value 0).
void update_terminal(QWeights& w, const AgentState& s, TradeAction a, double reward,
                     const EpisodeConfig& cfg);

using Policy = std::function<TradeAction(const AgentState&)>;
Policy greedy_policy(const QWeights& w, const EpisodeConfig& cfg);

struct TrainingResult {
    QWeights weights;
    std::vector<double> epoch_rewards;
    std::size_t steps = 0;
};

/// Walks the rows in order once per epoch. Each epoch starts flat with
/// equity 1; reward is position-after-action times the next-day target
/// return, and equity compounds by (1 + reward).
TrainingResult run_training(std::span<const FeatureRow> rows,
                            std::span<const std::string> feature_names,
                            const TargetSeries& targets, const EpisodeConfig& cfg, int epochs);

/// Mean daily reward of the greedy policy replayed over `rows` from flat.
double greedy_mean_reward(const QWeights& w, std::span<const FeatureRow> rows,
                          const TargetSeries& targets, const EpisodeConfig& cfg);

std::string weights_to_json(const QWeights& w, const EpisodeConfig& cfg);
std::pair<QWeights, EpisodeConfig> weights_from_json(std::string_view json);

}  // namespace sentrade::qlearn
