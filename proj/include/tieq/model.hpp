#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "tieq/discount.hpp"
#include "tieq/grid.hpp"

namespace tieq {

enum class Mode { dt, ct };

using ValueVector = std::vector<double>;

// Dense [node][from][to] tensor for transition probabilities or rates.
struct Tensor3 {
    int n_nodes = 0;
    int n_from = 0;
    int n_to = 0;
    std::vector<double> a;

    Tensor3() = default;
    Tensor3(int nodes, int from, int to)
        : n_nodes(nodes), n_from(from), n_to(to),
          a(static_cast<std::size_t>(nodes) * from * to, 0.0) {}

    double& operator()(int k, int i, int j) {
        return a[(static_cast<std::size_t>(k) * n_from + i) * n_to + j];
    }
    double operator()(int k, int i, int j) const {
        return a[(static_cast<std::size_t>(k) * n_from + i) * n_to + j];
    }
    std::span<const double> row(int k, int i) const {
        return {a.data() + (static_cast<std::size_t>(k) * n_from + i) * n_to,
                static_cast<std::size_t>(n_to)};
    }
};

// Running reward f(t, i, u_k). Either separable delta(t) * g[i][k], or a
// general table over integer times with a sup-norm bound on the rest. The
// discount is always present; the entropy weight in regularized values uses it.
class RewardSpec {
public:
    static RewardSpec separable(Discount discount, std::vector<std::vector<double>> g);
    // values[t][i][k] at t = 0..n-1 (linear in t in between for continuous
    // time); tail_bound must bound both sum_{t>=n} env(t) and int_{n-1}^inf env.
    static RewardSpec general(Discount discount, std::vector<std::vector<std::vector<double>>> values,
                              double tail_bound);

    bool separable_form() const { return separable_; }
    const Discount& discount() const { return discount_; }
    const std::vector<std::vector<double>>& g() const { return g_; }
    const std::vector<std::vector<std::vector<double>>>& table() const { return values_; }
    double table_tail_bound() const { return tail_bound_; }

    double value(double t, int i, int k) const;   // f(t, i, u_k)
    double envelope(double t) const;              // sup_{i,k} |f(t, i, u_k)|
    double envelope_tail_discrete(long long T) const;
    double envelope_tail_continuous(double T) const;
    double max_abs() const;                       // sup_t envelope
    double big_m(Mode mode) const;                // sum/int of envelope + delta

    // f_h(k, i, u) = h * f(k h, i, u) with the discount sampled at the same step.
    RewardSpec sampled(double h) const;

private:
    RewardSpec() = default;

    bool separable_ = true;
    Discount discount_ = Discount::exponential_factor(0.5);
    std::vector<std::vector<double>> g_;                 // [state][node]
    double max_abs_g_ = 0.0;
    std::vector<std::vector<std::vector<double>>> values_; // [t][state][node]
    std::vector<double> env_;                              // per-t envelope of values_
    double tail_bound_ = 0.0;
};

struct ConeParams {
    double iota;  // half-angle, (0, pi/2]
    double theta; // slant height, > 0
};

struct RelaxedPolicy {
    // rho[i][k]: density value at node k for state i; sum_k w_k rho[i][k] = 1.
    std::vector<std::vector<double>> rho;

    int states() const { return static_cast<int>(rho.size()); }
};

RelaxedPolicy uniform_policy(const ActionGrid& grid, int states);
// Dirac action as a one-hot density, rho[i][node[i]] = 1 / w_{node[i]}.
RelaxedPolicy one_hot_policy(const ActionGrid& grid, const std::vector<std::size_t>& node);

struct ModelSpec {
    int states = 0;
    ActionGrid grid;
    RewardSpec reward = RewardSpec::separable(Discount::exponential_factor(0.5), {});
    std::optional<Tensor3> transition; // discrete time
    std::optional<Tensor3> generator;  // continuous time
    std::optional<ConeParams> cone;
    std::optional<double> lipschitz;

    Mode mode() const;
    std::span<const double> kernel_row(int node, int state) const;
    const Tensor3& kernel() const;

    // Supplied constants or defaults derived from the grid geometry.
    double theta() const;
    ConeParams cone_params() const;
    double big_m() const { return reward.big_m(mode()); }

    double theta_estimate = -1.0; // filled by finalize_model
};

// Max finite-difference slope of f(0,i,.) plus kernel rows over adjacent grid nodes.
double lipschitz_estimate(const ModelSpec& model);

// Box defaults: iota = atan(1/sqrt(dims-1)) for dims > 1 (pi/2 in 1D),
// slant = half the shortest edge.
ConeParams default_cone(const ActionGrid& grid);

// Fills cached derived quantities; call after assembling the struct by hand.
void finalize_model(ModelSpec& model);

struct Violation {
    std::string code;
    std::string where;
    double magnitude = 0.0;
};

struct ValidationReport {
    bool passed = true;
    std::vector<Violation> violations;
    double theta_estimate = 0.0;

    void add(std::string code, std::string where, double magnitude) {
        passed = false;
        violations.push_back({std::move(code), std::move(where), magnitude});
    }
};

ValidationReport validate_model(const ModelSpec& model);

// Smallest horizon T with
//   tail_env(T + offset) + lambda * lnLebBound * tail_delta(T + offset) <= tol,
// where lnLebBound = max(|ln Leb(U)|, entropy_cap). Discrete mode returns the
// last included integer index; continuous mode the integration endpoint.
// Throws NoFiniteHorizon if the tail bound cannot reach tol.
double truncation_horizon(const ModelSpec& model, double lambda, double tol, Mode mode,
                          double offset = 0.0, double entropy_cap = -1.0);

} // namespace tieq
