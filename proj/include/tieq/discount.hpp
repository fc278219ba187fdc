#pragma once

#include <vector>

namespace tieq {

// Discount function delta: [0,inf) -> [0,1] with delta(0) = 1, nonincreasing
// and with finite total mass. Evaluation supports both integer (series) and
// real (integral) time arguments. Each family carries analytic tails:
//   tail_discrete(T)   = sum_{t > T} delta(t)        (t integer)
//   tail_continuous(T) = int_T^inf delta(s) ds
// A time_scale s reinterprets the function as t -> delta_base(s * t); this is
// what step-size sampling of a continuous-time model produces.
class Discount {
public:
    enum class Family {
        Exponential,           // exp(-rate * t)
        QuasiHyperbolic,       // 1, beta*gamma^t for t >= 1 (integer times only)
        ExponentialMixture,    // sum_m c_m exp(-r_m t)
        GeneralizedHyperbolic, // (1 + gamma t)^(-k), k > 1
        Tabulated,             // values at t = 0..n-1, linear in between, bounded tail
    };

    static Discount exponential_factor(double factor); // delta(t) = factor^t
    static Discount exponential_rate(double rate);     // delta(t) = exp(-rate t)
    static Discount quasi_hyperbolic(double beta, double gamma);
    static Discount exponential_mixture(std::vector<double> weights, std::vector<double> rates);
    static Discount generalized_hyperbolic(double k, double gamma);
    // tail_bound must bound both sum_{t>=n} delta(t) and int_{n-1}^inf delta.
    static Discount tabulated(std::vector<double> values, double tail_bound);

    // delta(step * t); used by the time discretization.
    Discount sampled(double step) const;

    double operator()(double t) const;
    double tail_discrete(long long T) const;
    double tail_continuous(double T) const;
    double mass_discrete() const { return (*this)(0.0) + tail_discrete(0); }
    double mass_continuous() const { return tail_continuous(0.0); }

    // Quasi-hyperbolic is defined at integer times only.
    bool discrete_only() const { return family_ == Family::QuasiHyperbolic; }

    Family family() const { return family_; }
    double param_a() const { return a_; }
    double param_b() const { return b_; }
    double time_scale() const { return scale_; }
    const std::vector<double>& mixture_weights() const { return weights_; }
    const std::vector<double>& mixture_rates() const { return rates_; }
    const std::vector<double>& table() const { return values_; }
    double table_tail_bound() const { return tail_bound_; }

    // Throws on an invalid parameterization (mass not finite, delta(0) != 1, increase).
    void validate() const;

private:
    Discount() = default;

    Family family_ = Family::Exponential;
    double a_ = 0.0; // rate / beta / k
    double b_ = 0.0; // gamma
    double scale_ = 1.0;
    std::vector<double> weights_, rates_;
    std::vector<double> values_;
    double tail_bound_ = 0.0;
};

} // namespace tieq
