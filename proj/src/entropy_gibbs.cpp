#include "tieq/entropy_gibbs.hpp"

#include <algorithm>
#include <cmath>

#include "tieq/errors.hpp"

namespace tieq {

double entropy(std::span<const double> rho, const ActionGrid& grid) {
    if (rho.size() != grid.size()) throw Precondition("density length does not match the grid");
    Compensated mass, h;
    for (std::size_t k = 0; k < rho.size(); ++k) {
        if (rho[k] < 0.0) throw NegativeDensity("density is negative at node " + std::to_string(k));
        mass.add_product(grid.weights[k], rho[k]);
        if (rho[k] > 0.0) h.add_product(grid.weights[k] * rho[k], -std::log(rho[k]));
    }
    if (std::abs(mass.value() - 1.0) > 1e-10)
        throw NotNormalized("density integrates to " + std::to_string(mass.value()));
    return h.value();
}

ObjectiveRow one_step_objective(const ModelSpec& model, Mode mode,
                                std::span<const double> y, int state) {
    if (model.mode() != mode) throw ModeMismatch("model kernel does not match the requested mode");
    if (static_cast<int>(y.size()) != model.states)
        throw Precondition("value vector length does not match the state count");
    const std::size_t n = model.grid.size();
    ObjectiveRow row;
    row.hi.resize(n);
    row.lo.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        Compensated acc;
        acc.add(model.reward.value(0.0, state, static_cast<int>(k)));
        const auto ker = model.kernel_row(static_cast<int>(k), state);
        for (int j = 0; j < model.states; ++j) acc.add_product(ker[j], y[j]);
        row.hi[k] = acc.hi;
        row.lo[k] = acc.lo;
        if (!std::isfinite(acc.value()))
            throw Precondition("one-step objective is not finite");
        if (row.value(k) > row.value(row.argmax)) row.argmax = k;
    }
    return row;
}

std::vector<double> gibbs_from_objective(const ObjectiveRow& row, double lambda,
                                         const ActionGrid& grid) {
    if (!(lambda > 0.0)) throw NonpositiveLambda("gibbs requires lambda > 0");
    const std::size_t n = row.size();
    std::vector<double> rho(n);
    for (std::size_t k = 0; k < n; ++k) rho[k] = std::exp(row.gap_from_max(k) / lambda);
    Compensated norm;
    for (std::size_t k = 0; k < n; ++k) norm.add_product(grid.weights[k], rho[k]);
    const double s = norm.value();
    for (double& r : rho) r /= s;
    return rho;
}

std::vector<double> gibbs(std::span<const double> y, int state, double lambda,
                          const ModelSpec& model, Mode mode) {
    return gibbs_from_objective(one_step_objective(model, mode, y, state), lambda, model.grid);
}

RelaxedPolicy gibbs_policy(std::span<const double> y, double lambda,
                           const ModelSpec& model, Mode mode) {
    RelaxedPolicy pi;
    pi.rho.resize(model.states);
    for (int i = 0; i < model.states; ++i) pi.rho[i] = gibbs(y, i, lambda, model, mode);
    return pi;
}

double softmax_value(const ObjectiveRow& row, double lambda, const ActionGrid& grid) {
    if (!(lambda > 0.0)) throw NonpositiveLambda("softmax_value requires lambda > 0");
    Compensated s;
    for (std::size_t k = 0; k < row.size(); ++k)
        s.add_product(grid.weights[k], std::exp(row.gap_from_max(k) / lambda));
    return row.max_value() + lambda * std::log(s.value());
}

double BoundConstants::c_bound(double lambda) const {
    const double lipschitz_term =
        theta > 0.0 ? std::pow(theta / lambda, dims) / (k1 * k2) : 0.0;
    return std::max(1.0 / k0, lipschitz_term);
}

double BoundConstants::kappa(double lambda) const {
    return ln_leb + std::abs(std::log(c_bound(lambda)));
}

double BoundConstants::phi(double lambda, double ynorm) const {
    return kappa(lambda) + dims * std::log1p(ynorm);
}

double BoundConstants::lambda_uniform(double lambda, double ynorm) const {
    return kappa1 + kappa2 * std::abs(std::log(lambda)) + dims * std::log1p(ynorm);
}

double BoundConstants::eta(double ynorm) const {
    return uniform_k() * (1.0 + std::log1p(ynorm));
}

double BoundConstants::uniform_k() const {
    // lambda * (kappa1 + kappa2 |ln lambda| + dims ln(1+z)) <= K (1 + ln(1+z))
    // for all lambda in (0,1], using sup lambda |ln lambda| = 1/e.
    return std::max(kappa1 + kappa2 / std::exp(1.0), static_cast<double>(dims));
}

namespace {

double sin_power_integral(int m) {
    // int_0^pi sin^m(x) dx = sqrt(pi) Gamma((m+1)/2) / Gamma(m/2 + 1)
    return std::sqrt(M_PI) *
           std::exp(std::lgamma((m + 1) / 2.0) - std::lgamma(m / 2.0 + 1.0));
}

} // namespace

BoundConstants bound_constants(const ModelSpec& model) {
    BoundConstants b;
    b.dims = model.grid.dims;
    b.ln_leb = std::abs(std::log(model.grid.volume));
    const ConeParams cone = model.cone_params();
    if (b.dims == 1) {
        b.k1 = 1.0;
        b.k2 = 1.0 - std::exp(-1.0);
        b.k0 = std::exp(-1.0) * cone.theta;
    } else {
        double angular = 2.0 * cone.iota;
        for (int m = b.dims - 2; m >= 1; --m) angular *= sin_power_integral(m);
        b.k1 = angular;
        // int_0^1 z^(dims-1) e^-z dz = (dims-1)! (1 - e^-1 sum_{j<=dims-1} 1/j!)
        double fact = 1.0, partial = 0.0, jfact = 1.0;
        for (int j = 0; j <= b.dims - 1; ++j) {
            if (j > 0) jfact *= j;
            partial += 1.0 / jfact;
            if (j > 0) fact *= j;
        }
        b.k2 = fact * (1.0 - std::exp(-1.0) * partial);
        b.k0 = std::exp(-1.0) * b.k1 * std::pow(cone.theta, b.dims) / b.dims;
    }
    // The grid estimate is a Lipschitz constant in the l1 path metric; inflate
    // by sqrt(dims) to cover Euclidean distances.
    b.theta = model.theta() * std::sqrt(static_cast<double>(b.dims));
    if (b.theta > 0.0) {
        b.kappa1 = b.ln_leb + std::max(std::abs(std::log(1.0 / b.k0)),
                                       std::abs(std::log(std::pow(b.theta, b.dims) / (b.k1 * b.k2))));
        b.kappa2 = static_cast<double>(b.dims);
    } else {
        b.kappa1 = b.ln_leb + std::abs(std::log(1.0 / b.k0));
        b.kappa2 = 0.0;
    }
    return b;
}

double confinement_radius(const ModelSpec& model, double lambda) {
    const BoundConstants b = bound_constants(model);
    const double m = model.big_m();
    auto grow = [&](double alpha) {
        return lambda >= 0.0 ? (1.0 + lambda * b.phi(lambda, alpha)) * m
                             : (1.0 + b.eta(alpha)) * m;
    };
    // g(alpha) = grow(alpha) - alpha starts positive and decreases through a
    // single sign change (grow is concave increasing and sublinear).
    double hi = std::max(1.0, 2.0 * m);
    while (grow(hi) > hi) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-9 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (grow(mid) > mid ? lo : hi) = mid;
    }
    return hi;
}

GibbsDiagnostics gibbs_diagnostics(std::span<const double> y, double lambda,
                                   const ModelSpec& model, Mode mode) {
    GibbsDiagnostics d;
    const BoundConstants b = bound_constants(model);
    const double ynorm = two_norm(y);
    d.upper_bound_ln_leb = std::log(model.grid.volume);
    d.lower_bound_phi = b.phi(lambda, ynorm);
    d.lambda_uniform_bound = b.lambda_uniform(lambda, ynorm);
    d.density_bound = b.c_bound(lambda) * std::pow(1.0 + ynorm, b.dims);
    d.entropy_by_state.resize(model.states);
    for (int i = 0; i < model.states; ++i) {
        const auto rho = gibbs(y, i, lambda, model, mode);
        d.max_density = std::max(d.max_density, *std::max_element(rho.begin(), rho.end()));
        d.entropy_by_state[i] = entropy(rho, model.grid);
        if (d.entropy_by_state[i] > d.upper_bound_ln_leb + 1e-9)
            d.violations.push_back("entropy above ln Leb(U) at state " + std::to_string(i));
        if (std::abs(d.entropy_by_state[i]) > d.lower_bound_phi + 1e-9)
            d.violations.push_back("entropy magnitude above phi(|y|) at state " + std::to_string(i));
    }
    if (d.max_density > d.density_bound * (1.0 + 1e-9))
        d.violations.push_back("density above the cone bound");
    return d;
}

} // namespace tieq
