#include "tieq/discount.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

#include "tieq/errors.hpp"

namespace tieq {

namespace {

double table_interp(const std::vector<double>& v, double t) {
    if (t <= 0.0) return v.front();
    const double last = static_cast<double>(v.size() - 1);
    if (t >= last) return t == last ? v.back() : 0.0;
    const auto lo = static_cast<std::size_t>(std::floor(t));
    const double frac = t - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[lo + 1] * frac;
}

// int_T^(n-1) of the piecewise-linear interpolant (exact).
double table_integral_tail(const std::vector<double>& v, double t0) {
    const double last = static_cast<double>(v.size() - 1);
    if (t0 >= last) return 0.0;
    if (t0 < 0.0) t0 = 0.0;
    double acc = 0.0;
    std::size_t seg = static_cast<std::size_t>(std::floor(t0));
    // Partial first segment.
    {
        const double hi = std::min(last, static_cast<double>(seg + 1));
        const double va = table_interp(v, t0);
        const double vb = table_interp(v, hi);
        acc += 0.5 * (va + vb) * (hi - t0);
        ++seg;
    }
    for (; seg + 1 <= v.size() - 1; ++seg)
        acc += 0.5 * (v[seg] + v[seg + 1]);
    return acc;
}

} // namespace

Discount Discount::exponential_factor(double factor) {
    Discount d;
    d.family_ = Family::Exponential;
    if (!(factor > 0.0 && factor < 1.0))
        throw Precondition("exponential discount factor must lie in (0,1)");
    d.a_ = -std::log(factor);
    return d;
}

Discount Discount::exponential_rate(double rate) {
    Discount d;
    d.family_ = Family::Exponential;
    if (!(rate > 0.0)) throw Precondition("exponential discount rate must be positive");
    d.a_ = rate;
    return d;
}

Discount Discount::quasi_hyperbolic(double beta, double gamma) {
    Discount d;
    d.family_ = Family::QuasiHyperbolic;
    if (!(beta > 0.0 && beta <= 1.0)) throw Precondition("quasi-hyperbolic beta must lie in (0,1]");
    if (!(gamma > 0.0 && gamma < 1.0)) throw Precondition("quasi-hyperbolic gamma must lie in (0,1)");
    d.a_ = beta;
    d.b_ = gamma;
    return d;
}

Discount Discount::exponential_mixture(std::vector<double> weights, std::vector<double> rates) {
    Discount d;
    d.family_ = Family::ExponentialMixture;
    if (weights.empty() || weights.size() != rates.size())
        throw Precondition("mixture weights and rates must be nonempty and of equal length");
    double sum = 0.0;
    for (std::size_t m = 0; m < weights.size(); ++m) {
        if (!(weights[m] > 0.0)) throw Precondition("mixture weights must be positive");
        if (!(rates[m] > 0.0)) throw Precondition("mixture rates must be positive");
        sum += weights[m];
    }
    if (std::abs(sum - 1.0) > 1e-12) throw Precondition("mixture weights must sum to 1");
    d.weights_ = std::move(weights);
    d.rates_ = std::move(rates);
    return d;
}

Discount Discount::generalized_hyperbolic(double k, double gamma) {
    Discount d;
    d.family_ = Family::GeneralizedHyperbolic;
    if (!(k > 1.0)) throw Precondition("generalized hyperbolic exponent must exceed 1 for a finite mass");
    if (!(gamma > 0.0)) throw Precondition("generalized hyperbolic gamma must be positive");
    d.a_ = k;
    d.b_ = gamma;
    return d;
}

Discount Discount::tabulated(std::vector<double> values, double tail_bound) {
    Discount d;
    d.family_ = Family::Tabulated;
    if (values.empty()) throw Precondition("tabulated discount needs at least one value");
    if (std::abs(values.front() - 1.0) > 1e-12)
        throw Precondition("tabulated discount must start at 1");
    for (std::size_t t = 0; t < values.size(); ++t) {
        if (!(values[t] >= 0.0 && values[t] <= 1.0 + 1e-12))
            throw Precondition("tabulated discount values must lie in [0,1]");
        if (t > 0 && values[t] > values[t - 1] + 1e-12)
            throw Precondition("tabulated discount must be nonincreasing");
    }
    if (!(tail_bound >= 0.0)) throw Precondition("tabulated tail bound must be nonnegative");
    d.values_ = std::move(values);
    d.tail_bound_ = tail_bound;
    return d;
}

Discount Discount::sampled(double step) const {
    if (!(step > 0.0)) throw Precondition("sampling step must be positive");
    if (family_ == Family::QuasiHyperbolic)
        throw Error("quasi-hyperbolic discounting is defined at integer times only");
    Discount d = *this;
    d.scale_ *= step;
    return d;
}

double Discount::operator()(double t) const {
    const double ts = scale_ * t;
    switch (family_) {
    case Family::Exponential:
        return std::exp(-a_ * ts);
    case Family::QuasiHyperbolic:
        return t < 0.5 ? 1.0 : a_ * std::pow(b_, t);
    case Family::ExponentialMixture: {
        double s = 0.0;
        for (std::size_t m = 0; m < weights_.size(); ++m)
            s += weights_[m] * std::exp(-rates_[m] * ts);
        return s;
    }
    case Family::GeneralizedHyperbolic:
        return std::pow(1.0 + b_ * ts, -a_);
    case Family::Tabulated:
        return table_interp(values_, ts);
    }
    return 0.0;
}

double Discount::tail_discrete(long long T) const {
    if (T < 0) T = -1;
    switch (family_) {
    case Family::Exponential: {
        const double q = std::exp(-a_ * scale_);
        return std::pow(q, static_cast<double>(T + 1)) / (1.0 - q);
    }
    case Family::QuasiHyperbolic: {
        // sum_{t > T} beta gamma^t, with delta(0) = 1 handled by the caller range.
        const long long t0 = std::max<long long>(T + 1, 1);
        return a_ * std::pow(b_, static_cast<double>(t0)) / (1.0 - b_);
    }
    case Family::ExponentialMixture: {
        double s = 0.0;
        for (std::size_t m = 0; m < weights_.size(); ++m) {
            const double q = std::exp(-rates_[m] * scale_);
            s += weights_[m] * std::pow(q, static_cast<double>(T + 1)) / (1.0 - q);
        }
        return s;
    }
    case Family::GeneralizedHyperbolic:
        // Nonincreasing, so the integral from T bounds the series beyond T.
        return tail_continuous(static_cast<double>(T));
    case Family::Tabulated: {
        const double last = static_cast<double>(values_.size() - 1);
        double sum = 0.0;
        long long t = T + 1;
        for (; scale_ * static_cast<double>(t) <= last; ++t)
            sum += table_interp(values_, scale_ * static_cast<double>(t));
        if (scale_ == 1.0) return sum + tail_bound_;
        return sum + values_.back() + tail_bound_ / scale_;
    }
    }
    return 0.0;
}

double Discount::tail_continuous(double T) const {
    if (T < 0.0) T = 0.0;
    const double ts = scale_ * T;
    switch (family_) {
    case Family::Exponential:
        return std::exp(-a_ * ts) / (a_ * scale_);
    case Family::QuasiHyperbolic:
        throw Error("quasi-hyperbolic discounting has no continuous-time tail");
    case Family::ExponentialMixture: {
        double s = 0.0;
        for (std::size_t m = 0; m < weights_.size(); ++m)
            s += weights_[m] * std::exp(-rates_[m] * ts) / (rates_[m] * scale_);
        return s;
    }
    case Family::GeneralizedHyperbolic:
        return std::pow(1.0 + b_ * ts, 1.0 - a_) / (b_ * scale_ * (a_ - 1.0));
    case Family::Tabulated:
        return (table_integral_tail(values_, ts) + tail_bound_) / scale_;
    }
    return 0.0;
}

void Discount::validate() const {
    if (std::abs((*this)(0.0) - 1.0) > 1e-12) throw Precondition("discount must satisfy delta(0) = 1");
    if (!std::isfinite(mass_discrete())) throw Precondition("discount series does not converge");
    if (!discrete_only() && !std::isfinite(mass_continuous()))
        throw Precondition("discount integral does not converge");
}

} // namespace tieq
