#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tieq/errors.hpp"
#include "tieq/eval_ct.hpp"
#include "tieq/models.hpp"

using namespace tieq;

TEST_CASE("policy generator selects rows under one-hot policies") {
    const ModelSpec m = models::two_state_switching(9);
    const RelaxedPolicy pi = one_hot_policy(m.grid, {3, 6});
    const Matrix q = policy_generator(pi, m);
    const double u3 = m.grid.nodes[3][0], u6 = m.grid.nodes[6][0];
    CHECK(q(0, 0) == doctest::Approx(-u3).epsilon(1e-12));
    CHECK(q(0, 1) == doctest::Approx(u3).epsilon(1e-12));
    CHECK(q(1, 0) == doctest::Approx(u6).epsilon(1e-12));
    CHECK(q(1, 1) == doctest::Approx(-u6).epsilon(1e-12));
}

TEST_CASE("uniform policy averages the switching rate") {
    const ModelSpec m = models::two_state_switching(9);
    const Matrix q = policy_generator(uniform_policy(m.grid, 2), m);
    CHECK(q(0, 0) == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(q(0, 1) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("zero generator gives the zero matrix and identity transitions") {
    const ModelSpec m = models::frozen_chain(3, 4, 1.0);
    const Matrix q = policy_generator(uniform_policy(m.grid, 3), m);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(q(i, j) == 0.0);
    const Matrix p = transition_matrix(q, 3.7, 1e-12);
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) CHECK(p(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("two-state transition matrix matches the closed form") {
    Matrix q(2, 2);
    q(0, 0) = -1.0;
    q(0, 1) = 1.0;
    q(1, 0) = 1.0;
    q(1, 1) = -1.0;
    const Matrix got = transition_matrix(q, 1.0, 1e-13);
    const Matrix want = oracles::expm_two_state(1.0, 1.0, 1.0);
    CHECK(want(0, 0) == doctest::Approx((1.0 + std::exp(-2.0)) / 2.0).epsilon(1e-14));
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(got(i, j) == doctest::Approx(want(i, j)).epsilon(1e-11));
}

TEST_CASE("time zero gives the identity") {
    const Matrix q = oracles::random_generator_matrix(4, 31);
    const Matrix p = transition_matrix(q, 0.0, 1e-12);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) CHECK(p(i, j) == (i == j ? 1.0 : 0.0));
}

TEST_CASE("transition matrices satisfy Chapman-Kolmogorov") {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> time_pick(0.05, 2.5);
    for (int rep = 0; rep < 110; ++rep) {
        const Matrix q = oracles::random_generator_matrix(4, 7000 + rep);
        const double s = time_pick(rng), t = time_pick(rng);
        const Matrix lhs = transition_matrix(q, s + t, 1e-12);
        const Matrix rhs = transition_matrix(q, s, 1e-12) * transition_matrix(q, t, 1e-12);
        for (int i = 0; i < 4; ++i) {
            double row = 0.0;
            for (int j = 0; j < 4; ++j) {
                CHECK(std::abs(lhs(i, j) - rhs(i, j)) <= 1e-8);
                row += lhs(i, j);
            }
            CHECK(row == doctest::Approx(1.0).epsilon(1e-10));
        }
    }
}

TEST_CASE("transition matrix rejects a non-generator") {
    Matrix bad(2, 2);
    bad(0, 0) = -1.0;
    bad(0, 1) = 0.5;
    bad(1, 0) = 1.0;
    bad(1, 1) = -1.0;
    CHECK_THROWS_AS(transition_matrix(bad, 1.0, 1e-10), InvalidGenerator);
}

namespace {

// Corner one-hot policies on the switching model; node 0 is u = 0 and the
// last node is u = 1 because the grid includes the vertices.
RelaxedPolicy corner_policy(const ModelSpec& m, bool first_high, bool second_high) {
    const std::size_t last = m.grid.size() - 1;
    return one_hot_policy(m.grid, {first_high ? last : 0, second_high ? last : 0});
}

} // namespace

TEST_CASE("switching-model corner values match the closed forms") {
    const ModelSpec m = models::two_state_switching(33);
    // Closed form: V(0,1) - V(0,2) = int delta(s) e^{-(a+b)s} ds (g1(a) - g2(b))
    // with the integral = (1/(1+a+b) + 1/(2+a+b)) / 2.
    auto closed_diff = [](double a, double b) {
        const double integral = 0.5 * (1.0 / (1.0 + a + b) + 1.0 / (2.0 + a + b));
        const double g1 = -7.0 / 8.0 * std::sqrt(a);
        const double g2 = 19.0 / 9.0 - std::sqrt(1.0 - b);
        return integral * (g1 - g2);
    };
    CHECK(closed_diff(0, 0) == doctest::Approx(-5.0 / 6.0).epsilon(1e-15));
    CHECK(closed_diff(1, 0) == doctest::Approx(-5.0 / 12.0 * (15.0 / 8.0 + 1.0 / 9.0)).epsilon(1e-15));
    CHECK(closed_diff(0, 1) == doctest::Approx(-5.0 / 12.0 * (2.0 + 1.0 / 9.0)).epsilon(1e-15));
    CHECK(closed_diff(1, 1) == doctest::Approx(-7.0 / 24.0 * (23.0 / 8.0 + 1.0 / 9.0)).epsilon(1e-15));

    for (int a = 0; a <= 1; ++a)
        for (int b = 0; b <= 1; ++b) {
            const ValueVector v = value_ct(corner_policy(m, a, b), 0.0, 0.0, m, 1e-8);
            CHECK(std::abs((v[0] - v[1]) - closed_diff(a, b)) <= 1e-6);
        }
}

TEST_CASE("frozen chain integrates the discount mass") {
    const ModelSpec m = models::frozen_chain(2, 4, 2.0);
    const ValueVector v = value_ct(uniform_policy(m.grid, 2), 0.0, 0.0, m, 1e-9);
    for (double x : v) CHECK(x == doctest::Approx(2.0 * 0.75).epsilon(1e-8));
}

TEST_CASE("value_ct rejects discrete-time models and bad arguments") {
    const ModelSpec dt = models::entropy_only_single_state(4);
    CHECK_THROWS_AS(value_ct(uniform_policy(dt.grid, 1), 0.0, 0.0, dt, 1e-8), ModeMismatch);
    const ModelSpec ct = models::frozen_chain(2, 4, 1.0);
    CHECK_THROWS_AS(value_ct(uniform_policy(ct.grid, 2), 0.0, 0.0, ct, 0.0), Precondition);
    CHECK_THROWS_AS(value_ct(uniform_policy(ct.grid, 2), 0.0, -1.0, ct, 1e-8), Precondition);
}

TEST_CASE("uniformization agrees with fourth-order time stepping") {
    for (int rep = 0; rep < 6; ++rep) {
        const int d = 2 + rep % 3;
        const ModelSpec m = oracles::random_ct_model(d, 4, 11000 + rep);
        RelaxedPolicy pi;
        pi.rho.resize(d);
        for (int i = 0; i < d; ++i) pi.rho[i] = oracles::random_density(m.grid, 600 + 13 * rep + i);
        const double lambda = rep % 2 == 0 ? 0.0 : 0.2;
        const double horizon = truncation_horizon(m, lambda, 1e-10 / 2.0, Mode::ct, 0.0,
                                                  std::abs(std::log(m.grid.volume)));
        const ValueVector got = value_ct(pi, lambda, 0.0, m, 1e-10);
        const std::vector<double> want =
            oracles::rk4_value_ct(pi, lambda, m, horizon, 40000);
        for (int i = 0; i < d; ++i) CHECK(std::abs(got[i] - want[i]) <= 1e-7);
    }
}

TEST_CASE("nonzero start time shifts the reward clock") {
    const ModelSpec m = models::frozen_chain(1, 4, 1.0);
    // V(t0) = int_0^inf delta(t0 + s) ds = (e^-t0 + e^-2 t0 / 2) / 2.
    for (double t0 : {0.0, 0.5, 2.0}) {
        const ValueVector v = value_ct(uniform_policy(m.grid, 1), 0.0, t0, m, 1e-9);
        const double want = 0.5 * (std::exp(-t0) + std::exp(-2.0 * t0) / 2.0);
        CHECK(v[0] == doctest::Approx(want).epsilon(1e-7));
    }
}
