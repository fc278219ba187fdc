#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"
#include "tieq/models.hpp"

using namespace tieq;

TEST_CASE("entropy of uniform densities") {
    const ActionGrid unit = build_action_grid({{0.0, 1.0}}, 6);
    CHECK(entropy(std::vector<double>(6, 1.0), unit) == doctest::Approx(0.0).epsilon(1e-15));
    const ActionGrid two = build_action_grid({{0.0, 2.0}}, 6);
    CHECK(entropy(std::vector<double>(6, 0.5), two) ==
          doctest::Approx(std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("entropy uses the 0 ln 0 convention") {
    const ActionGrid g = build_action_grid({{0.0, 1.0}}, 2);
    CHECK(entropy(std::vector<double>{2.0, 0.0}, g) ==
          doctest::Approx(-std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("entropy rejects bad densities") {
    const ActionGrid g = build_action_grid({{0.0, 1.0}}, 2);
    CHECK_THROWS_AS(entropy(std::vector<double>{1.5, 1.0}, g), NotNormalized);
    CHECK_THROWS_AS(entropy(std::vector<double>{3.0, -1.0}, g), NegativeDensity);
}

TEST_CASE("constant exponents give the uniform density") {
    const ModelSpec m = models::entropy_only_single_state(8);
    const auto rho = gibbs(ValueVector{0.7}, 0, 0.3, m, Mode::dt);
    for (double r : rho) CHECK(r == doctest::Approx(1.0 / m.grid.volume).epsilon(1e-14));
}

TEST_CASE("gibbs matches the analytic density for a linear objective") {
    // f(0,0,u) = u on [0,1], zero kernel contribution, lambda = 1:
    // density e^u / (e - 1). Node u = 1/2 exists for odd counts.
    const int n = 51;
    ModelSpec m;
    m.states = 1;
    m.grid = build_action_grid({{0.0, 1.0}}, n);
    std::vector<double> g(n);
    for (int k = 0; k < n; ++k) g[k] = m.grid.nodes[k][0];
    m.reward = RewardSpec::separable(Discount::exponential_factor(0.5), {g});
    Tensor3 p(n, 1, 1);
    for (int k = 0; k < n; ++k) p(k, 0, 0) = 1.0;
    m.transition = std::move(p);
    finalize_model(m);

    const auto rho = gibbs(ValueVector{0.0}, 0, 1.0, m, Mode::dt);
    const double analytic = std::exp(0.5) / (std::exp(1.0) - 1.0);
    CHECK(rho[n / 2] == doctest::Approx(analytic).epsilon(2e-4));
}

TEST_CASE("gibbs requires a positive lambda") {
    const ModelSpec m = models::entropy_only_single_state(4);
    CHECK_THROWS_AS(gibbs(ValueVector{0.0}, 0, 0.0, m, Mode::dt), NonpositiveLambda);
    CHECK_THROWS_AS(gibbs(ValueVector{0.0}, 0, -1.0, m, Mode::dt), NonpositiveLambda);
}

namespace {

// Transition model whose rows are dyadic and sum to one exactly in binary
// floating point, so constant shifts of y pass through the objective exactly.
ModelSpec dyadic_dt_model(int states, int nodes, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    ModelSpec m;
    m.states = states;
    m.grid = build_action_grid({{0.0, 1.0}}, nodes);
    std::vector<std::vector<double>> g(states, std::vector<double>(nodes));
    std::uniform_int_distribution<int> cents(-64, 64);
    for (int i = 0; i < states; ++i)
        for (int k = 0; k < nodes; ++k) g[i][k] = cents(rng) / 128.0;
    m.reward = RewardSpec::separable(Discount::exponential_factor(0.5), std::move(g));
    Tensor3 p(nodes, states, states);
    for (int k = 0; k < nodes; ++k)
        for (int i = 0; i < states; ++i) {
            // Distribute 4 quarter-units over the row.
            std::vector<int> parts(states, 0);
            int left = 4;
            for (int j = 0; j + 1 < states; ++j) {
                std::uniform_int_distribution<int> take(0, left);
                parts[j] = take(rng);
                left -= parts[j];
            }
            parts[states - 1] = left;
            for (int j = 0; j < states; ++j) p(k, i, j) = parts[j] / 4.0;
        }
    m.transition = std::move(p);
    finalize_model(m);
    return m;
}

} // namespace

TEST_CASE("shift invariance is exact for representable shifts") {
    std::mt19937_64 rng(21);
    std::uniform_int_distribution<int> dims_pick(1, 4);
    std::uniform_int_distribution<int> node_pick(2, 6);
    std::uniform_int_distribution<long long> dyadic(-(1LL << 23), 1LL << 23);
    std::uniform_real_distribution<double> lambda_pick(1e-3, 10.0);
    for (int rep = 0; rep < 120; ++rep) {
        const int d = dims_pick(rng);
        const ModelSpec m = dyadic_dt_model(d, node_pick(rng), 1000 + rep);
        ValueVector y(d), shifted(d);
        const double c = static_cast<double>(dyadic(rng)) / (1 << 20);
        for (int i = 0; i < d; ++i) {
            y[i] = static_cast<double>(dyadic(rng)) / (1 << 20);
            shifted[i] = y[i] + c; // exact: both are multiples of 2^-20 well below 2^53
        }
        const double lambda = lambda_pick(rng);
        const int state = rep % d;
        const auto a = gibbs(y, state, lambda, m, Mode::dt);
        const auto b = gibbs(shifted, state, lambda, m, Mode::dt);
        double worst = 0.0;
        for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
        CHECK(worst <= 1e-14);
    }
}

TEST_CASE("softmax identity over random instances") {
    std::mt19937_64 rng(22);
    std::uniform_int_distribution<int> dims_pick(1, 4);
    std::uniform_int_distribution<int> node_pick(2, 7);
    std::uniform_real_distribution<double> lambda_pick(0.05, 5.0);
    std::uniform_real_distribution<double> y_pick(-1.0, 1.0);
    for (int rep = 0; rep < 120; ++rep) {
        const int d = dims_pick(rng);
        const ModelSpec m = models::random_dt_model(d, node_pick(rng), 0.6, 300 + rep, 0.0);
        ValueVector y(d);
        for (double& v : y) v = y_pick(rng);
        const double lambda = lambda_pick(rng);
        const int state = rep % d;
        const ObjectiveRow row = one_step_objective(m, Mode::dt, y, state);
        const auto rho = gibbs_from_objective(row, lambda, m.grid);
        // sum_k w_k (a_k - lambda ln rho_k) rho_k == lambda ln sum_k w_k e^{a_k/lambda}
        double lhs = 0.0;
        for (std::size_t k = 0; k < rho.size(); ++k)
            if (rho[k] > 0.0)
                lhs += m.grid.weights[k] * rho[k] * (row.value(k) - lambda * std::log(rho[k]));
        CHECK(lhs == doctest::Approx(softmax_value(row, lambda, m.grid)).epsilon(1e-9));
    }
}

TEST_CASE("entropy never exceeds the log volume") {
    std::mt19937_64 rng(23);
    std::uniform_int_distribution<int> dims_pick(1, 3);
    std::uniform_int_distribution<int> node_pick(2, 6);
    std::uniform_real_distribution<double> len(0.2, 5.0);
    for (int rep = 0; rep < 150; ++rep) {
        const int dims = dims_pick(rng);
        std::vector<std::pair<double, double>> bounds;
        for (int m = 0; m < dims; ++m) {
            const double a = -len(rng);
            bounds.emplace_back(a, a + len(rng) + 0.1);
        }
        const ActionGrid grid = build_action_grid(bounds, node_pick(rng));
        const auto rho = oracles::random_density(grid, 500 + rep);
        CHECK(entropy(rho, grid) <= std::log(grid.volume) + 1e-12);
    }
}

TEST_CASE("entropy magnitude bound holds on the switching model") {
    const ModelSpec m = models::two_state_switching(17);
    std::mt19937_64 rng(24);
    std::uniform_real_distribution<double> scale_pick(-3.0, 3.0);
    for (double lambda : {0.05, 0.5, 5.0}) {
        for (int rep = 0; rep < 40; ++rep) {
            ValueVector y(2);
            const double mag = std::pow(10.0, scale_pick(rng));
            std::uniform_real_distribution<double> comp(-mag, mag);
            for (double& v : y) v = comp(rng);
            if (two_norm(y) > 1e3) continue;
            const GibbsDiagnostics diag = gibbs_diagnostics(y, lambda, m, Mode::ct);
            for (double h : diag.entropy_by_state) {
                CHECK(std::abs(h) <= diag.lower_bound_phi + 1e-9);
                CHECK(h <= diag.upper_bound_ln_leb + 1e-12);
            }
            CHECK(diag.max_density <= diag.density_bound * (1.0 + 1e-9));
            CHECK(diag.violations.empty());
        }
    }
}

TEST_CASE("densities flatten toward uniform as lambda grows") {
    const ModelSpec m = models::two_state_switching(17);
    const ValueVector y{0.4, -0.9};
    const double uniform = 1.0 / m.grid.volume;
    double prev = HUGE_VAL;
    for (double lambda : {1.0, 10.0, 100.0, 1000.0}) {
        const auto rho = gibbs(y, 0, lambda, m, Mode::ct);
        double dist = 0.0;
        for (double r : rho) dist = std::max(dist, std::abs(r - uniform));
        CHECK(dist <= prev);
        prev = dist;
    }
}

TEST_CASE("diagnostics for the uniform case") {
    const ModelSpec m = models::entropy_only_single_state(8);
    const GibbsDiagnostics diag = gibbs_diagnostics(ValueVector{0.0}, 1.0, m, Mode::dt);
    CHECK(diag.max_density == doctest::Approx(1.0 / m.grid.volume).epsilon(1e-13));
    CHECK(diag.entropy_by_state[0] == doctest::Approx(std::log(m.grid.volume)).epsilon(1e-13));
}

TEST_CASE("halving lambda raises the uniform bound by kappa2 ln 2") {
    const ModelSpec m = models::two_state_switching(9);
    const ValueVector y{0.3, 0.1};
    const BoundConstants b = bound_constants(m);
    const GibbsDiagnostics d1 = gibbs_diagnostics(y, 0.5, m, Mode::ct);
    const GibbsDiagnostics d2 = gibbs_diagnostics(y, 0.25, m, Mode::ct);
    CHECK(d2.lambda_uniform_bound - d1.lambda_uniform_bound ==
          doctest::Approx(b.kappa2 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("confinement radius satisfies its defining inequality") {
    const ModelSpec m = models::two_state_switching(9);
    const BoundConstants b = bound_constants(m);
    const double big_m = m.big_m();
    for (double lambda : {0.5, 0.05}) {
        const double alpha = confinement_radius(m, lambda);
        CHECK(alpha >= (1.0 + lambda * b.phi(lambda, alpha)) * big_m - 1e-6 * alpha);
        CHECK(alpha + 1.0 >= (1.0 + lambda * b.phi(lambda, alpha + 1.0)) * big_m);
    }
    const double uniform_alpha = confinement_radius(m, -1.0);
    CHECK(uniform_alpha >= (1.0 + b.eta(uniform_alpha)) * big_m - 1e-6 * uniform_alpha);
}
