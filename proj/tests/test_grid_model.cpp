#include <doctest.h>

#include <cmath>
#include <random>

#include "tieq/errors.hpp"
#include "tieq/model.hpp"
#include "tieq/models.hpp"
#include "tieq/numeric.hpp"

using namespace tieq;

TEST_CASE("midpoint grid on [0,1] with three nodes") {
    const ActionGrid g = build_action_grid({{0.0, 1.0}}, 3);
    REQUIRE(g.size() == 3);
    CHECK(g.nodes[0][0] == doctest::Approx(1.0 / 6.0).epsilon(1e-15));
    CHECK(g.nodes[1][0] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(g.nodes[2][0] == doctest::Approx(5.0 / 6.0).epsilon(1e-15));
    for (double w : g.weights) CHECK(w == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
    CHECK(g.volume == 1.0);
}

TEST_CASE("tensor product grid on the unit square") {
    const ActionGrid g = build_action_grid({{0.0, 1.0}, {0.0, 1.0}}, 2);
    REQUIRE(g.size() == 4);
    for (double w : g.weights) CHECK(w == doctest::Approx(0.25).epsilon(1e-15));
    for (std::size_t k = 0; k < 4; ++k)
        for (int m = 0; m < 2; ++m)
            CHECK((g.nodes[k][m] == doctest::Approx(0.25) || g.nodes[k][m] == doctest::Approx(0.75)));
}

TEST_CASE("weight sum equals the volume") {
    const ActionGrid g = build_action_grid({{0.0, 2.0}}, 4);
    for (double w : g.weights) CHECK(w == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(stable_sum(g.weights) == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("grid construction errors") {
    CHECK_THROWS_AS(build_action_grid({{1.0, 1.0}}, 3), DegenerateBox);
    CHECK_THROWS_AS(build_action_grid({{0.0, 1.0}}, 1), Precondition);
    CHECK_THROWS_AS(build_action_grid({{0.0, 1.0}, {0.0, 1.0}}, 64, false, 1000), GridTooLarge);
}

TEST_CASE("weight-sum identity over random boxes") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lo(-5.0, 5.0);
    std::uniform_real_distribution<double> len(0.1, 10.0);
    std::uniform_int_distribution<int> dims_pick(1, 4);
    for (int rep = 0; rep < 120; ++rep) {
        const int dims = dims_pick(rng);
        const int max_per_dim = dims <= 2 ? 64 : (dims == 3 ? 25 : 12);
        std::uniform_int_distribution<int> count_pick(2, max_per_dim);
        std::vector<std::pair<double, double>> bounds;
        for (int m = 0; m < dims; ++m) {
            const double a = lo(rng);
            bounds.emplace_back(a, a + len(rng));
        }
        const ActionGrid g = build_action_grid(bounds, count_pick(rng), rep % 2 == 0,
                                               std::size_t(1) << 24);
        CHECK(std::abs(stable_sum(g.weights) - g.volume) <= 1e-12 * std::max(1.0, g.volume));
        for (std::size_t k = 0; k < g.size(); ++k)
            for (int m = 0; m < dims; ++m) {
                CHECK(g.nodes[k][m] >= bounds[m].first);
                CHECK(g.nodes[k][m] <= bounds[m].second);
                if (!g.includes_vertices) {
                    CHECK(g.nodes[k][m] > bounds[m].first);
                    CHECK(g.nodes[k][m] < bounds[m].second);
                }
            }
    }
}

TEST_CASE("vertex grids hit the box corners exactly") {
    const ActionGrid g = build_action_grid({{0.0, 1.0}}, 33, true);
    CHECK(g.nodes.front()[0] == 0.0);
    CHECK(g.nodes.back()[0] == 1.0);
    CHECK(stable_sum(g.weights) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("validate_model accepts the two-state switching model") {
    const ModelSpec m = models::two_state_switching(17);
    const ValidationReport rep = validate_model(m);
    CHECK(rep.passed);
    CHECK(rep.violations.empty());
    CHECK(rep.theta_estimate > 0.0);
}

TEST_CASE("validate_model flags broken rows") {
    SUBCASE("transition row not stochastic") {
        ModelSpec bad;
        bad.states = 2;
        bad.grid = build_action_grid({{0.0, 1.0}}, 2);
        bad.reward = RewardSpec::separable(Discount::exponential_factor(0.5),
                                           {{0.0, 0.0}, {0.0, 0.0}});
        Tensor3 p(2, 2, 2);
        for (int k = 0; k < 2; ++k) {
            p(k, 0, 0) = 0.5;
            p(k, 0, 1) = 0.6;
            p(k, 1, 0) = 0.5;
            p(k, 1, 1) = 0.5;
        }
        bad.transition = std::move(p);
        const ValidationReport rep = validate_model(bad);
        CHECK_FALSE(rep.passed);
        bool found = false;
        for (const auto& v : rep.violations) found = found || v.code == "RowNotStochastic";
        CHECK(found);
    }
    SUBCASE("generator row does not sum to zero") {
        ModelSpec bad;
        bad.states = 2;
        bad.grid = build_action_grid({{0.0, 1.0}}, 2);
        bad.reward = RewardSpec::separable(
            Discount::exponential_mixture({0.5, 0.5}, {1.0, 2.0}), {{0.0, 0.0}, {0.0, 0.0}});
        Tensor3 q(2, 2, 2);
        for (int k = 0; k < 2; ++k) {
            q(k, 0, 0) = -1.0;
            q(k, 0, 1) = 0.5;
            q(k, 1, 0) = 1.0;
            q(k, 1, 1) = -1.0;
        }
        bad.generator = std::move(q);
        const ValidationReport rep = validate_model(bad);
        CHECK_FALSE(rep.passed);
        bool found = false;
        for (const auto& v : rep.violations) found = found || v.code == "RowSumNonzero";
        CHECK(found);
    }
}

namespace {

ModelSpec geometric_unit_model(double factor, double sup_g) {
    // Single state, constant reward sup_g, exponential factor discount.
    ModelSpec m;
    m.states = 1;
    m.grid = build_action_grid({{0.0, 1.0}}, 2);
    m.reward = RewardSpec::separable(Discount::exponential_factor(factor),
                                     {std::vector<double>(m.grid.size(), sup_g)});
    Tensor3 p(2, 1, 1);
    p(0, 0, 0) = 1.0;
    p(1, 0, 0) = 1.0;
    m.transition = std::move(p);
    finalize_model(m);
    return m;
}

} // namespace

TEST_CASE("truncation horizon matches the geometric tail") {
    // Oracle: direct summation. sum_{t>T} 0.5^t first dips below 1e-6 at T = 20.
    const ModelSpec m = geometric_unit_model(0.5, 1.0);
    long long expected = -1;
    for (long long T = 0; T < 64 && expected < 0; ++T) {
        double tail = 0.0;
        for (long long t = T + 1; t < T + 200; ++t) tail += std::pow(0.5, static_cast<double>(t));
        if (tail <= 1e-6) expected = T;
    }
    REQUIRE(expected == 20);
    CHECK(truncation_horizon(m, 0.0, 1e-6, Mode::dt) == 20.0);
}

TEST_CASE("continuous truncation horizon matches the closed-form tail") {
    // Envelope 3 * (e^-t + e^-2t)/2; tail(T) = 3(e^-T + e^-2T / 2)/2 = 1e-6.
    ModelSpec m;
    m.states = 1;
    m.grid = build_action_grid({{0.0, 1.0}}, 2);
    m.reward = RewardSpec::separable(Discount::exponential_mixture({0.5, 0.5}, {1.0, 2.0}),
                                     {std::vector<double>(m.grid.size(), 3.0)});
    m.generator = Tensor3(2, 1, 1);
    finalize_model(m);

    auto tail = [](double T) { return 3.0 * (std::exp(-T) + std::exp(-2.0 * T) / 2.0) / 2.0; };
    double lo = 0.0, hi = 64.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) <= 1e-6 ? hi : lo) = mid;
    }
    const double exact = hi; // about 14.22

    const double T = truncation_horizon(m, 0.0, 1e-6, Mode::ct);
    CHECK(T >= exact - 1e-6);
    CHECK(T <= exact + 0.01);
    CHECK(tail(T) <= 1e-6);

    // Cross-check the closed form by plain numeric integration of the envelope.
    double num = 0.0;
    const double step = 1e-4;
    for (double t = T; t < T + 60.0; t += step)
        num += step * 3.0 * (std::exp(-(t + step / 2)) + std::exp(-2.0 * (t + step / 2))) / 2.0;
    CHECK(num <= 1e-6);
}

TEST_CASE("horizon is zero when the tolerance swallows the total mass") {
    const ModelSpec m = geometric_unit_model(0.5, 1.0);
    CHECK(truncation_horizon(m, 0.0, 100.0, Mode::dt) == 0.0);
}

TEST_CASE("horizon grows as the tolerance shrinks") {
    const ModelSpec m = geometric_unit_model(0.7, 2.0);
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> logtol(-9.0, -1.0);
    for (int rep = 0; rep < 50; ++rep) {
        double t1 = std::pow(10.0, logtol(rng));
        double t2 = std::pow(10.0, logtol(rng));
        if (t1 > t2) std::swap(t1, t2); // t1 < t2
        CHECK(truncation_horizon(m, 0.0, t1, Mode::dt) >=
              truncation_horizon(m, 0.0, t2, Mode::dt));
    }
}

TEST_CASE("no finite horizon when the tail bound is stuck above the tolerance") {
    ModelSpec m;
    m.states = 1;
    m.grid = build_action_grid({{0.0, 1.0}}, 2);
    m.reward = RewardSpec::general(Discount::exponential_factor(0.5),
                                   {{{1.0, 1.0}}, {{0.5, 0.5}}}, /*tail_bound=*/1e-3);
    Tensor3 p(2, 1, 1);
    p(0, 0, 0) = 1.0;
    p(1, 0, 0) = 1.0;
    m.transition = std::move(p);
    finalize_model(m);
    CHECK_THROWS_AS(truncation_horizon(m, 0.0, 1e-6, Mode::dt), NoFiniteHorizon);
    CHECK(truncation_horizon(m, 0.0, 2e-3, Mode::dt) <= 2.0);
}

TEST_CASE("discarded mass stays below the tolerance for each discount family") {
    struct Case {
        Discount d;
        bool ct;
    };
    const std::vector<Case> cases = {
        {Discount::exponential_factor(0.8), false},
        {Discount::exponential_rate(0.3), true},
        {Discount::quasi_hyperbolic(0.7, 0.9), false},
        {Discount::exponential_mixture({0.3, 0.7}, {0.5, 2.0}), true},
        {Discount::generalized_hyperbolic(2.5, 1.0), false},
        {Discount::tabulated({1.0, 0.5, 0.25, 0.125, 0.0625}, 0.0), false},
    };
    const double lambda = 0.3, tol = 1e-5;
    for (const Case& c : cases) {
        ModelSpec m;
        m.states = 1;
        m.grid = build_action_grid({{0.0, 2.0}}, 3);
        m.reward = RewardSpec::separable(c.d, {std::vector<double>(3, 1.5)});
        if (c.ct) {
            m.generator = Tensor3(3, 1, 1);
        } else {
            Tensor3 p(3, 1, 1);
            for (int k = 0; k < 3; ++k) p(k, 0, 0) = 1.0;
            m.transition = std::move(p);
        }
        finalize_model(m);
        const double cap = std::abs(std::log(m.grid.volume));
        const Mode mode = c.ct ? Mode::ct : Mode::dt;
        const double T = truncation_horizon(m, lambda, tol, mode);
        double discarded = 0.0;
        if (c.ct) {
            const double step = 1e-3;
            for (double t = T; t < T + 80.0; t += step) {
                const double mid = t + step / 2;
                discarded += step * (m.reward.envelope(mid) + lambda * cap * c.d(mid));
            }
        } else {
            for (long long t = static_cast<long long>(T) + 1; t < static_cast<long long>(T) + 4000;
                 ++t) {
                const double td = static_cast<double>(t);
                discarded += m.reward.envelope(td) + lambda * cap * c.d(td);
            }
        }
        CHECK(discarded <= tol * (1.0 + 1e-9));
    }
}

TEST_CASE("default cone parameters follow the box geometry") {
    const ActionGrid g1 = build_action_grid({{0.0, 1.0}}, 4);
    const ConeParams c1 = default_cone(g1);
    CHECK(c1.theta == doctest::Approx(0.5));
    const ActionGrid g2 = build_action_grid({{0.0, 2.0}, {0.0, 1.0}}, 4);
    const ConeParams c2 = default_cone(g2);
    CHECK(c2.theta == doctest::Approx(0.5));
    CHECK(c2.iota == doctest::Approx(std::atan(1.0)));
}

TEST_CASE("one-hot densities are normalized") {
    const ActionGrid g = build_action_grid({{0.0, 1.0}}, 5, true);
    const RelaxedPolicy pi = one_hot_policy(g, {0, 4});
    for (int i = 0; i < 2; ++i) {
        double mass = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) mass += g.weights[k] * pi.rho[i][k];
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-12));
    }
}
