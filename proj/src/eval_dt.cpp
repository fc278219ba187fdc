#include "tieq/eval_dt.hpp"

#include <cmath>
#include <string>

#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"

namespace tieq {

void check_policy(const RelaxedPolicy& pi, const ModelSpec& model) {
    if (pi.states() != model.states)
        throw Precondition("policy state count does not match the model");
    for (int i = 0; i < model.states; ++i) {
        if (pi.rho[i].size() != model.grid.size())
            throw Precondition("policy row length does not match the grid");
        Compensated mass;
        for (std::size_t k = 0; k < pi.rho[i].size(); ++k) {
            if (pi.rho[i][k] < 0.0)
                throw NegativeDensity("policy density negative at state " + std::to_string(i));
            mass.add_product(model.grid.weights[k], pi.rho[i][k]);
        }
        if (std::abs(mass.value() - 1.0) > 1e-10)
            throw NotNormalized("policy row " + std::to_string(i) + " integrates to " +
                                std::to_string(mass.value()));
    }
}

Matrix policy_kernel(const RelaxedPolicy& pi, const ModelSpec& model) {
    if (model.mode() != Mode::dt) throw ModeMismatch("policy_kernel needs a discrete-time model");
    check_policy(pi, model);
    const int d = model.states;
    Matrix p(d, d);
    for (int i = 0; i < d; ++i) {
        for (int j = 0; j < d; ++j) {
            Compensated acc;
            for (std::size_t k = 0; k < model.grid.size(); ++k)
                acc.add_product(model.grid.weights[k] * pi.rho[i][k],
                                (*model.transition)(static_cast<int>(k), i, j));
            p(i, j) = acc.value();
        }
    }
    return p;
}

ValueVector value_dt(const RelaxedPolicy& pi, double lambda, int offset,
                     const ModelSpec& model, double tol) {
    if (model.mode() != Mode::dt) throw ModeMismatch("value_dt needs a discrete-time model");
    if (!(tol > 0.0)) throw Precondition("tolerance must be positive");
    if (lambda < 0.0) throw Precondition("lambda must be nonnegative");
    if (offset != 0 && offset != 1) throw Precondition("offset must be 0 or 1");
    check_policy(pi, model);

    const int d = model.states;
    const auto& grid = model.grid;
    const auto& reward = model.reward;
    const auto& delta = reward.discount();

    // Per-state entropy is constant across time steps; compute once.
    std::vector<double> h(d, 0.0);
    double h_cap = 0.0;
    if (lambda > 0.0) {
        for (int i = 0; i < d; ++i) {
            h[i] = entropy(pi.rho[i], grid);
            h_cap = std::max(h_cap, std::abs(h[i]));
        }
    }

    const auto horizon = static_cast<long long>(
        truncation_horizon(model, lambda, tol, Mode::dt, offset, h_cap));

    const Matrix p = policy_kernel(pi, model);

    // Policy-averaged reward at time t. Separable rewards factor into a
    // time-independent part scaled by delta(t).
    std::vector<double> gbar(d, 0.0);
    if (reward.separable_form()) {
        for (int i = 0; i < d; ++i) {
            Compensated acc;
            for (std::size_t k = 0; k < grid.size(); ++k)
                acc.add_product(grid.weights[k] * pi.rho[i][k], reward.g()[i][k]);
            gbar[i] = acc.value();
        }
    }
    auto running = [&](long long k, std::vector<double>& out) {
        const double t = static_cast<double>(offset + k);
        const double dt = delta(t);
        for (int i = 0; i < d; ++i) {
            double fr;
            if (reward.separable_form()) {
                fr = dt * gbar[i];
            } else {
                Compensated acc;
                for (std::size_t m = 0; m < grid.size(); ++m)
                    acc.add_product(grid.weights[m] * pi.rho[i][m],
                                    reward.value(t, i, static_cast<int>(m)));
                fr = acc.value();
            }
            out[i] = fr + lambda * dt * h[i];
        }
    };

    // Backward recursion acc = r_k + P acc evaluates sum_k P^k r_k for every
    // initial state in O(T d^2) without forming matrix powers.
    std::vector<double> acc(d, 0.0), rk(d, 0.0);
    for (long long k = horizon; k >= 0; --k) {
        running(k, rk);
        if (k == horizon) {
            acc = rk;
            continue;
        }
        std::vector<double> pa = p.apply(acc);
        for (int i = 0; i < d; ++i) acc[i] = rk[i] + pa[i];
    }
    return acc;
}

} // namespace tieq
