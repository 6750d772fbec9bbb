#pragma once

// Fixtures and independent oracles shared by the unit tests and the
// acceptance binary.

#include "sentrade/classify.hpp"
#include "sentrade/error.hpp"
#include "sentrade/features.hpp"
#include "sentrade/synth.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace sentrade::testing {

std::filesystem::path test_data_dir();

/// Code of the sentrade::Error thrown by fn, or nullopt if it returns.
template <class F>
std::optional<ErrorCode> error_code_of(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    return std::nullopt;
}

/// A fresh empty directory under the system temp dir.
std::filesystem::path scratch_dir(const std::string& name);

// ─── Classifier fixtures ────────────────────────────────────────────────────

/// Column 0 equals (y + 1) / 2, column 1 is uniform noise; balanced labels.
TrainingData planted_l1_data(std::uint64_t seed, std::size_t n = 200);

/// (0,0),(1,1) -> +1; (0,1),(1,0) -> -1.
TrainingData xor_data();

/// Column 0 carries the label through a noisy threshold with flip rate
/// `label_noise`; the other `noise_features` columns are uniform noise.
TrainingData planted_signal_data(std::uint64_t seed, std::size_t n, std::size_t noise_features,
                                 double label_noise);

/// Label-noise free "XOR in the first two coordinates" plus noise columns.
TrainingData xor_signal_data(std::uint64_t seed, std::size_t n, std::size_t noise_features);

// ─── Oracles ────────────────────────────────────────────────────────────────

struct GridOptimum {
    double objective = 0.0;
    std::vector<double> w;
    double b = 0.0;
};

/// Minimizes the L1-logistic objective by exhaustive search on a dense grid
/// over (w, b), re-centering and shrinking the grid around the incumbent.
/// Uses its own loss arithmetic, not the library's.
GridOptimum grid_search_logreg(const TrainingData& data, double c);

/// Deterministic finite MDP with |S| states and |A| actions.
struct TabularMdp {
    std::size_t states = 0;
    std::size_t actions = 0;
    std::vector<std::size_t> next;  // [s * actions + a]
    std::vector<double> reward;     // [s * actions + a]
    double discount = 0.9;
};

/// The 2-state, 2-action chain: action 0 stays, action 1 switches;
/// rewards r(0,0)=0, r(0,1)=1, r(1,0)=2, r(1,1)=0.
TabularMdp two_state_chain(double discount = 0.9);

/// Q* by value iteration to a sup-norm change below 1e-13.
std::vector<double> value_iteration(const TabularMdp& mdp);

struct TabularComparison {
    std::vector<double> weights;      // linear learner with one-hot phi
    std::vector<double> table;        // plain tabular rule on the same trajectory
    double max_step_difference = 0.0; // sup over every step of |weights - table|
    double max_error_vs_oracle = 0.0; // final |weights - Q*|
};

/// Runs the library's semi-gradient step with one-hot phi(s, a) alongside
/// the tabular rule Q <- (1 - eta) Q + eta (r + discount max Q(s', .)) on one
/// uniformly exploring trajectory of `updates` transitions.
TabularComparison tabular_equivalence(const TabularMdp& mdp, std::size_t updates, double eta,
                                      std::uint64_t seed);

// ─── Synthetic-market experiments ───────────────────────────────────────────

struct SynthRun {
    synth::SynthParams params;
    synth::SynthOutput data;
    Dataset dataset;
};

SynthRun make_synth_run(const synth::SynthParams& params, TargetKind target = TargetKind::Alpha);

/// Test accuracy of an L1 logistic regression cross-validated on the
/// training half, using the named columns (all columns if empty).
double cv_logreg_test_accuracy(const Dataset& ds, const std::vector<std::string>& columns = {});

}  // namespace sentrade::testing
