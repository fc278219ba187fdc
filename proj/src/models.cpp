#include "tieq/models.hpp"

#include <cmath>
#include <random>

#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"
#include "tieq/numeric.hpp"
#include "tieq/verify.hpp"

namespace tieq::models {

ModelSpec two_state_switching(int per_dim_count) {
    ModelSpec m;
    m.states = 2;
    m.grid = build_action_grid({{0.0, 1.0}}, per_dim_count, /*include_vertices=*/true);
    const std::size_t n = m.grid.size();

    std::vector<std::vector<double>> g(2, std::vector<double>(n, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        const double u = m.grid.nodes[k][0];
        g[0][k] = -7.0 / 8.0 * std::sqrt(u);
        g[1][k] = 19.0 / 9.0 - std::sqrt(1.0 - u);
    }
    m.reward = RewardSpec::separable(Discount::exponential_mixture({0.5, 0.5}, {1.0, 2.0}),
                                     std::move(g));

    Tensor3 q(static_cast<int>(n), 2, 2);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = m.grid.nodes[k][0];
        q(static_cast<int>(k), 0, 0) = -u;
        q(static_cast<int>(k), 0, 1) = u;
        q(static_cast<int>(k), 1, 0) = u;
        q(static_cast<int>(k), 1, 1) = -u;
    }
    m.generator = std::move(q);
    finalize_model(m);
    return m;
}

ModelSpec entropy_only_single_state(int per_dim_count) {
    ModelSpec m;
    m.states = 1;
    m.grid = build_action_grid({{0.0, 2.0}}, per_dim_count);
    m.reward = RewardSpec::separable(Discount::exponential_factor(0.5),
                                     {std::vector<double>(m.grid.size(), 0.0)});
    Tensor3 p(static_cast<int>(m.grid.size()), 1, 1);
    for (int k = 0; k < p.n_nodes; ++k) p(k, 0, 0) = 1.0;
    m.transition = std::move(p);
    finalize_model(m);
    return m;
}

ModelSpec direct_choice_two_state(int per_dim_count, const DirectChoiceParams& params,
                                  double discount_factor) {
    if (!(params.lo >= 0.0 && params.hi <= 1.0 && params.lo < params.hi))
        throw Precondition("direct-choice action range must sit inside [0,1]");
    ModelSpec m;
    m.states = 2;
    m.grid = build_action_grid({{params.lo, params.hi}}, per_dim_count);
    const std::size_t n = m.grid.size();

    std::vector<std::vector<double>> g(2, std::vector<double>(n, 0.0));
    Tensor3 p(static_cast<int>(n), 2, 2);
    for (std::size_t k = 0; k < n; ++k) {
        const double u = m.grid.nodes[k][0];
        g[0][k] = params.c1 - params.a1 * (u - params.m1) * (u - params.m1);
        g[1][k] = params.c2 - params.a2 * (u - params.m2) * (u - params.m2);
        for (int i = 0; i < 2; ++i) {
            p(static_cast<int>(k), i, 0) = u;
            p(static_cast<int>(k), i, 1) = 1.0 - u;
        }
    }
    m.reward = RewardSpec::separable(Discount::exponential_factor(discount_factor), std::move(g));
    m.transition = std::move(p);
    finalize_model(m);
    return m;
}

namespace {

ModelSpec random_dt_attempt(int states, int per_dim_count, double discount_factor,
                            std::uint64_t seed) {
    ModelSpec m;
    m.states = states;
    m.grid = build_action_grid({{0.0, 1.0}}, per_dim_count);
    const std::size_t n = m.grid.size();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::exponential_distribution<double> expo(1.0);

    std::vector<std::vector<double>> g(states, std::vector<double>(n, 0.0));
    for (int i = 0; i < states; ++i)
        for (std::size_t k = 0; k < n; ++k) g[i][k] = unif(rng);

    Tensor3 p(static_cast<int>(n), states, states);
    for (std::size_t k = 0; k < n; ++k)
        for (int i = 0; i < states; ++i) {
            std::vector<double> row(states);
            double sum = 0.0;
            for (int j = 0; j < states; ++j) {
                row[j] = expo(rng) + 1e-3;
                sum += row[j];
            }
            for (int j = 0; j < states; ++j) p(static_cast<int>(k), i, j) = row[j] / sum;
        }
    m.reward = RewardSpec::separable(Discount::exponential_factor(discount_factor), std::move(g));
    m.transition = std::move(p);
    finalize_model(m);
    return m;
}

} // namespace

ModelSpec random_dt_model(int states, int per_dim_count, double discount_factor,
                          std::uint64_t seed, double min_gap) {
    for (int attempt = 0; attempt < 200; ++attempt) {
        ModelSpec m = random_dt_attempt(states, per_dim_count, discount_factor,
                                        seed + 0x9e3779b97f4a7c15ULL * attempt);
        const ValueVector opt = optimal_value_exponential(m, 1e-13);
        const double beta = m.reward.discount()(1.0);
        double gap = HUGE_VAL;
        for (int i = 0; i < states; ++i) {
            double best = -HUGE_VAL, second = -HUGE_VAL;
            for (std::size_t k = 0; k < m.grid.size(); ++k) {
                const double v = m.reward.g()[i][k] +
                                 beta * stable_dot(m.kernel_row(static_cast<int>(k), i), opt);
                if (v > best) {
                    second = best;
                    best = v;
                } else if (v > second) {
                    second = v;
                }
            }
            gap = std::min(gap, best - second);
        }
        if (gap >= min_gap) return m;
    }
    throw Error("could not draw a gap-separated random model for this seed");
}

ModelSpec constant_model(int states, int per_dim_count, Mode mode) {
    ModelSpec m;
    m.states = states;
    m.grid = build_action_grid({{0.0, 1.0}}, per_dim_count);
    const std::size_t n = m.grid.size();
    std::vector<std::vector<double>> g(states, std::vector<double>(n, 0.0));
    for (int i = 0; i < states; ++i)
        for (std::size_t k = 0; k < n; ++k) g[i][k] = 0.25 * (i + 1);
    m.reward = RewardSpec::separable(Discount::exponential_factor(0.5), std::move(g));
    if (mode == Mode::dt) {
        Tensor3 p(static_cast<int>(n), states, states);
        for (std::size_t k = 0; k < n; ++k)
            for (int i = 0; i < states; ++i)
                for (int j = 0; j < states; ++j)
                    p(static_cast<int>(k), i, j) = 1.0 / static_cast<double>(states);
        m.transition = std::move(p);
    } else {
        Tensor3 q(static_cast<int>(n), states, states);
        for (std::size_t k = 0; k < n; ++k)
            for (int i = 0; i < states; ++i)
                for (int j = 0; j < states; ++j)
                    q(static_cast<int>(k), i, j) = (j == i) ? -1.0 : 1.0 / (states - 1);
        if (states == 1)
            for (std::size_t k = 0; k < n; ++k) q(static_cast<int>(k), 0, 0) = 0.0;
        m.generator = std::move(q);
    }
    finalize_model(m);
    return m;
}

ModelSpec frozen_chain(int states, int per_dim_count, double reward_level) {
    ModelSpec m;
    m.states = states;
    m.grid = build_action_grid({{0.0, 1.0}}, per_dim_count);
    const std::size_t n = m.grid.size();
    std::vector<std::vector<double>> g(states, std::vector<double>(n, reward_level));
    m.reward = RewardSpec::separable(Discount::exponential_mixture({0.5, 0.5}, {1.0, 2.0}),
                                     std::move(g));
    m.generator = Tensor3(static_cast<int>(n), states, states);
    finalize_model(m);
    return m;
}

} // namespace tieq::models
