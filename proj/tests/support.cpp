#include "support.hpp"

#include "sentrade/qlearn.hpp"
#include "sentrade/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sentrade::testing {

namespace fs = std::filesystem;

fs::path test_data_dir() { return SENTRADE_TEST_DATA; }

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("sentrade_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

TrainingData planted_l1_data(std::uint64_t seed, std::size_t n) {
    Rng rng(seed, 101);
    TrainingData d;
    d.x.resize(static_cast<Eigen::Index>(n), 2);
    d.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double y = i % 2 == 0 ? 1.0 : -1.0;
        d.y[r] = y;
        d.x(r, 0) = (y + 1.0) / 2.0;
        d.x(r, 1) = rng.uniform();
    }
    d.feature_names = {"signal", "noise"};
    return d;
}

TrainingData xor_data() {
    TrainingData d;
    d.x.resize(4, 2);
    d.x << 0, 0, 1, 1, 0, 1, 1, 0;
    d.y.resize(4);
    d.y << 1, 1, -1, -1;
    d.feature_names = {"x1", "x2"};
    return d;
}

TrainingData planted_signal_data(std::uint64_t seed, std::size_t n, std::size_t noise_features,
                                 double label_noise) {
    Rng rng(seed, 202);
    TrainingData d;
    const auto m = static_cast<Eigen::Index>(noise_features + 1);
    d.x.resize(static_cast<Eigen::Index>(n), m);
    d.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double s = rng.uniform();
        double y = s >= 0.5 ? 1.0 : -1.0;
        if (rng.uniform() < label_noise) y = -y;
        d.y[r] = y;
        d.x(r, 0) = s;
        for (Eigen::Index j = 1; j < m; ++j) d.x(r, j) = rng.uniform();
    }
    d.feature_names.push_back("signal");
    for (std::size_t j = 0; j < noise_features; ++j) {
        d.feature_names.push_back("noise_" + std::to_string(j + 1));
    }
    return d;
}

TrainingData xor_signal_data(std::uint64_t seed, std::size_t n, std::size_t noise_features) {
    Rng rng(seed, 303);
    TrainingData d;
    const auto m = static_cast<Eigen::Index>(noise_features + 2);
    d.x.resize(static_cast<Eigen::Index>(n), m);
    d.y.resize(static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = static_cast<Eigen::Index>(i);
        const double a = rng.uniform();
        const double b = rng.uniform();
        d.x(r, 0) = a;
        d.x(r, 1) = b;
        d.y[r] = (a >= 0.5) == (b >= 0.5) ? 1.0 : -1.0;
        for (Eigen::Index j = 2; j < m; ++j) d.x(r, j) = rng.uniform();
    }
    d.feature_names = {"a", "b"};
    for (std::size_t j = 0; j < noise_features; ++j) {
        d.feature_names.push_back("noise_" + std::to_string(j + 1));
    }
    return d;
}

namespace {

double naive_objective(const TrainingData& data, const std::vector<double>& w, double b,
                       double c) {
    double loss = 0.0;
    for (Eigen::Index i = 0; i < data.x.rows(); ++i) {
        double z = b;
        for (std::size_t j = 0; j < w.size(); ++j) z += w[j] * data.x(i, static_cast<Eigen::Index>(j));
        const double m = data.y[i] * z;
        loss += m > 0 ? std::log(1.0 + std::exp(-m)) : -m + std::log(1.0 + std::exp(m));
    }
    double l1 = 0.0;
    for (double v : w) l1 += std::abs(v);
    return loss / static_cast<double>(data.x.rows()) + l1 / c;
}

}  // namespace

GridOptimum grid_search_logreg(const TrainingData& data, double c) {
    const std::size_t dims = data.dims() + 1;  // weights then bias
    constexpr int kHalf = 10;                  // 21 points per axis
    std::vector<double> center(dims, 0.0);
    double step = 1.0;                          // spans [-10, 10] initially
    GridOptimum best;
    best.objective = std::numeric_limits<double>::infinity();

    std::vector<int> idx(dims);
    for (int round = 0; round < 30; ++round) {
        std::fill(idx.begin(), idx.end(), -kHalf);
        while (true) {
            std::vector<double> w(dims - 1);
            for (std::size_t j = 0; j + 1 < dims; ++j) w[j] = center[j] + step * idx[j];
            const double b = center[dims - 1] + step * idx[dims - 1];
            const double f = naive_objective(data, w, b, c);
            if (f < best.objective) best = {f, w, b};
            std::size_t k = 0;
            while (k < dims && ++idx[k] > kHalf) idx[k++] = -kHalf;
            if (k == dims) break;
        }
        for (std::size_t j = 0; j + 1 < dims; ++j) center[j] = best.w[j];
        center[dims - 1] = best.b;
        step /= 2.0;
    }
    return best;
}

TabularMdp two_state_chain(double discount) {
    TabularMdp m;
    m.states = 2;
    m.actions = 2;
    m.next = {0, 1, 1, 0};
    m.reward = {0.0, 1.0, 2.0, 0.0};
    m.discount = discount;
    return m;
}

std::vector<double> value_iteration(const TabularMdp& mdp) {
    std::vector<double> q(mdp.states * mdp.actions, 0.0);
    while (true) {
        std::vector<double> next(q.size());
        for (std::size_t sa = 0; sa < q.size(); ++sa) {
            const std::size_t s2 = mdp.next[sa];
            double v = -std::numeric_limits<double>::infinity();
            for (std::size_t a2 = 0; a2 < mdp.actions; ++a2) v = std::max(v, q[s2 * mdp.actions + a2]);
            next[sa] = mdp.reward[sa] + mdp.discount * v;
        }
        double change = 0.0;
        for (std::size_t i = 0; i < q.size(); ++i) change = std::max(change, std::abs(next[i] - q[i]));
        q = std::move(next);
        if (change < 1e-13) return q;
    }
}

TabularComparison tabular_equivalence(const TabularMdp& mdp, std::size_t updates, double eta,
                                      std::uint64_t seed) {
    const std::size_t dims = mdp.states * mdp.actions;
    auto one_hot = [dims](std::size_t i) {
        qlearn::SparseVector v;
        v.dims = dims;
        v.entries = {{i, 1.0}};
        return v;
    };
    TabularComparison out;
    out.weights.assign(dims, 0.0);
    out.table.assign(dims, 0.0);
    Rng rng(seed, 404);
    std::size_t s = 0;
    for (std::size_t t = 0; t < updates; ++t) {
        const std::size_t a = rng.index(mdp.actions);
        const std::size_t sa = s * mdp.actions + a;
        const std::size_t s2 = mdp.next[sa];
        const double r = mdp.reward[sa];

        std::vector<qlearn::SparseVector> next;
        for (std::size_t a2 = 0; a2 < mdp.actions; ++a2) next.push_back(one_hot(s2 * mdp.actions + a2));
        qlearn::td_step(out.weights, one_hot(sa), next, r, mdp.discount, eta);

        double best = -std::numeric_limits<double>::infinity();
        for (std::size_t a2 = 0; a2 < mdp.actions; ++a2) best = std::max(best, out.table[s2 * mdp.actions + a2]);
        out.table[sa] = (1.0 - eta) * out.table[sa] + eta * (r + mdp.discount * best);

        for (std::size_t i = 0; i < dims; ++i) {
            out.max_step_difference =
                std::max(out.max_step_difference, std::abs(out.weights[i] - out.table[i]));
        }
        s = s2;
    }
    const auto q_star = value_iteration(mdp);
    for (std::size_t i = 0; i < dims; ++i) {
        out.max_error_vs_oracle = std::max(out.max_error_vs_oracle, std::abs(out.weights[i] - q_star[i]));
    }
    return out;
}

SynthRun make_synth_run(const synth::SynthParams& params, TargetKind target) {
    SynthRun run{params, synth::generate(params), {}};
    run.dataset = build_dataset(run.data.bars, run.data.sentiment, target);
    return run;
}

double cv_logreg_test_accuracy(const Dataset& full, const std::vector<std::string>& columns) {
    const Dataset ds = columns.empty() ? full : full.select(columns);
    const auto train = TrainingData::from_dataset_train(ds);
    const auto test = TrainingData::from_dataset_test(ds);
    const auto cv = cross_validate(train, HyperGrid::logreg());
    const auto model = fit(train, ModelKind::LogReg, cv.best_point());
    return evaluate(model, test).accuracy;
}

}  // namespace sentrade::testing
