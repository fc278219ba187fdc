#include "tieq/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tieq/errors.hpp"
#include "tieq/numeric.hpp"

namespace tieq {

RewardSpec RewardSpec::separable(Discount discount, std::vector<std::vector<double>> g) {
    RewardSpec r;
    r.separable_ = true;
    r.discount_ = std::move(discount);
    r.g_ = std::move(g);
    r.max_abs_g_ = 0.0;
    for (const auto& row : r.g_)
        for (double v : row) r.max_abs_g_ = std::max(r.max_abs_g_, std::abs(v));
    return r;
}

RewardSpec RewardSpec::general(Discount discount,
                               std::vector<std::vector<std::vector<double>>> values,
                               double tail_bound) {
    if (values.empty()) throw Precondition("general reward table must not be empty");
    if (!(tail_bound >= 0.0)) throw Precondition("reward tail bound must be nonnegative");
    RewardSpec r;
    r.separable_ = false;
    r.discount_ = std::move(discount);
    r.values_ = std::move(values);
    r.tail_bound_ = tail_bound;
    r.env_.reserve(r.values_.size());
    for (const auto& slice : r.values_) {
        double e = 0.0;
        for (const auto& row : slice)
            for (double v : row) e = std::max(e, std::abs(v));
        r.env_.push_back(e);
    }
    return r;
}

double RewardSpec::value(double t, int i, int k) const {
    if (separable_) return discount_(t) * g_[i][k];
    const double last = static_cast<double>(values_.size() - 1);
    if (t <= 0.0) return values_.front()[i][k];
    if (t >= last) return t == last ? values_.back()[i][k] : 0.0;
    const auto lo = static_cast<std::size_t>(std::floor(t));
    const double frac = t - static_cast<double>(lo);
    return values_[lo][i][k] * (1.0 - frac) + values_[lo + 1][i][k] * frac;
}

double RewardSpec::envelope(double t) const {
    if (separable_) return discount_(t) * max_abs_g_;
    const double last = static_cast<double>(env_.size() - 1);
    if (t <= 0.0) return env_.front();
    if (t >= last) return t == last ? env_.back() : 0.0;
    const auto lo = static_cast<std::size_t>(std::floor(t));
    const double frac = t - static_cast<double>(lo);
    return env_[lo] * (1.0 - frac) + env_[lo + 1] * frac;
}

double RewardSpec::envelope_tail_discrete(long long T) const {
    if (separable_) return max_abs_g_ * discount_.tail_discrete(T);
    double s = 0.0;
    for (std::size_t t = static_cast<std::size_t>(std::max<long long>(T + 1, 0)); t < env_.size(); ++t)
        s += env_[t];
    return s + tail_bound_;
}

double RewardSpec::envelope_tail_continuous(double T) const {
    if (separable_) return max_abs_g_ * discount_.tail_continuous(T);
    // Exact integral of the piecewise-linear envelope beyond T, plus the bound.
    const double last = static_cast<double>(env_.size() - 1);
    double acc = tail_bound_;
    if (T < last) {
        double t0 = std::max(T, 0.0);
        std::size_t seg = static_cast<std::size_t>(std::floor(t0));
        const double hi = std::min(last, static_cast<double>(seg + 1));
        acc += 0.5 * (envelope(t0) + envelope(hi)) * (hi - t0);
        for (std::size_t s = seg + 1; s + 1 < env_.size(); ++s)
            acc += 0.5 * (env_[s] + env_[s + 1]);
    }
    return acc;
}

double RewardSpec::max_abs() const {
    if (separable_) return max_abs_g_;
    double e = tail_bound_ > 0.0 ? tail_bound_ : 0.0;
    for (double v : env_) e = std::max(e, v);
    return e;
}

double RewardSpec::big_m(Mode mode) const {
    if (mode == Mode::dt)
        return envelope_tail_discrete(-1) + discount_.mass_discrete();
    return envelope_tail_continuous(0.0) + discount_.mass_continuous();
}

RewardSpec RewardSpec::sampled(double h) const {
    if (!(h > 0.0)) throw Precondition("sampling step must be positive");
    if (separable_) {
        auto gh = g_;
        for (auto& row : gh)
            for (double& v : row) v *= h;
        return separable(discount_.sampled(h), std::move(gh));
    }
    // Resample the table at t = k h up to its end.
    const double last = static_cast<double>(values_.size() - 1);
    const auto steps = static_cast<std::size_t>(std::floor(last / h)) + 1;
    std::vector<std::vector<std::vector<double>>> out(steps);
    const int ni = static_cast<int>(values_.front().size());
    const int nk = static_cast<int>(values_.front().front().size());
    for (std::size_t s = 0; s < steps; ++s) {
        out[s].assign(ni, std::vector<double>(nk, 0.0));
        for (int i = 0; i < ni; ++i)
            for (int k = 0; k < nk; ++k) out[s][i][k] = h * value(h * static_cast<double>(s), i, k);
    }
    // Mass beyond the resampled range: one step of the last envelope plus the
    // integral bound, both conservative for a nonincreasing-in-practice tail.
    const double bound = tail_bound_ + h * env_.back();
    return general(discount_.sampled(h), std::move(out), bound);
}

RelaxedPolicy uniform_policy(const ActionGrid& grid, int states) {
    RelaxedPolicy pi;
    pi.rho.assign(states, std::vector<double>(grid.size(), 1.0 / grid.volume));
    return pi;
}

RelaxedPolicy one_hot_policy(const ActionGrid& grid, const std::vector<std::size_t>& node) {
    RelaxedPolicy pi;
    pi.rho.assign(node.size(), std::vector<double>(grid.size(), 0.0));
    for (std::size_t i = 0; i < node.size(); ++i) {
        if (node[i] >= grid.size()) throw Precondition("one-hot node index out of range");
        pi.rho[i][node[i]] = 1.0 / grid.weights[node[i]];
    }
    return pi;
}

Mode ModelSpec::mode() const {
    if (transition && !generator) return Mode::dt;
    if (generator && !transition) return Mode::ct;
    throw Precondition("model must carry exactly one of a transition or a generator tensor");
}

std::span<const double> ModelSpec::kernel_row(int node, int state) const {
    return kernel().row(node, state);
}

const Tensor3& ModelSpec::kernel() const {
    if (transition) return *transition;
    if (generator) return *generator;
    throw Precondition("model has no kernel");
}

double ModelSpec::theta() const {
    if (lipschitz) return *lipschitz;
    if (theta_estimate >= 0.0) return theta_estimate;
    return lipschitz_estimate(*this);
}

ConeParams ModelSpec::cone_params() const {
    if (cone) return *cone;
    return default_cone(grid);
}

double lipschitz_estimate(const ModelSpec& model) {
    // Tensor grid in row-major order, last dimension fastest: the neighbor of
    // node k along dimension m sits at k + stride_m.
    const auto& grid = model.grid;
    const std::size_t n = grid.size();
    double theta = 0.0;
    std::vector<std::size_t> stride(grid.dims, 1);
    for (int m = grid.dims - 2; m >= 0; --m)
        stride[m] = stride[m + 1] * static_cast<std::size_t>(grid.per_dim);
    for (std::size_t k = 0; k < n; ++k) {
        for (int m = 0; m < grid.dims; ++m) {
            const std::size_t pos = (k / stride[m]) % static_cast<std::size_t>(grid.per_dim);
            if (pos + 1 >= static_cast<std::size_t>(grid.per_dim)) continue;
            const std::size_t k2 = k + stride[m];
            const double du = std::abs(grid.nodes[k2][m] - grid.nodes[k][m]);
            double df = 0.0;
            for (int i = 0; i < model.states; ++i)
                df = std::max(df, std::abs(model.reward.value(0.0, i, static_cast<int>(k)) -
                                           model.reward.value(0.0, i, static_cast<int>(k2))));
            double dk = 0.0;
            for (int i = 0; i < model.states; ++i) {
                const auto r1 = model.kernel_row(static_cast<int>(k), i);
                const auto r2 = model.kernel_row(static_cast<int>(k2), i);
                double s = 0.0;
                for (std::size_t j = 0; j < r1.size(); ++j) s += (r1[j] - r2[j]) * (r1[j] - r2[j]);
                dk = std::max(dk, std::sqrt(s));
            }
            theta = std::max(theta, (df + dk) / du);
        }
    }
    return theta;
}

ConeParams default_cone(const ActionGrid& grid) {
    ConeParams c{};
    c.iota = grid.dims > 1 ? std::atan(1.0 / std::sqrt(static_cast<double>(grid.dims - 1)))
                           : std::asin(1.0); // pi/2
    double shortest = std::numeric_limits<double>::infinity();
    for (const auto& [a, b] : grid.bounds) shortest = std::min(shortest, b - a);
    c.theta = shortest / 2.0;
    return c;
}

void finalize_model(ModelSpec& model) {
    if (!model.lipschitz) model.theta_estimate = lipschitz_estimate(model);
}

ValidationReport validate_model(const ModelSpec& model) {
    ValidationReport rep;
    const auto& grid = model.grid;

    // Grid invariants.
    const double wsum = stable_sum(grid.weights);
    if (std::abs(wsum - grid.volume) > 1e-12 * std::max(1.0, grid.volume))
        rep.add("WeightSumMismatch", "grid", wsum - grid.volume);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        for (int m = 0; m < grid.dims; ++m) {
            const double u = grid.nodes[k][m];
            const bool inside = grid.includes_vertices
                                    ? (u >= grid.bounds[m].first && u <= grid.bounds[m].second)
                                    : (u > grid.bounds[m].first && u < grid.bounds[m].second);
            if (!inside) rep.add("NodeOutOfBox", "node " + std::to_string(k), u);
        }
        if (!(grid.weights[k] > 0.0)) rep.add("NonpositiveWeight", "node " + std::to_string(k), grid.weights[k]);
    }

    // Kernel structure.
    const bool has_t = model.transition.has_value();
    const bool has_g = model.generator.has_value();
    if (has_t == has_g) {
        rep.add("KernelAmbiguous", "model", 0.0);
        return rep;
    }
    const Tensor3& ker = model.kernel();
    if (ker.n_from != model.states || ker.n_to != model.states ||
        ker.n_nodes != static_cast<int>(grid.size())) {
        rep.add("KernelShapeMismatch", "kernel", 0.0);
        return rep;
    }
    for (int k = 0; k < ker.n_nodes; ++k) {
        for (int i = 0; i < ker.n_from; ++i) {
            const auto row = ker.row(k, i);
            const double rs = stable_sum(row);
            if (has_t) {
                for (int j = 0; j < ker.n_to; ++j)
                    if (row[j] < -1e-15)
                        rep.add("NegativeTransition",
                                "(" + std::to_string(k) + "," + std::to_string(i) + "," +
                                    std::to_string(j) + ")",
                                row[j]);
                if (std::abs(rs - 1.0) > 1e-10)
                    rep.add("RowNotStochastic",
                            "(" + std::to_string(k) + "," + std::to_string(i) + ")", rs - 1.0);
            } else {
                for (int j = 0; j < ker.n_to; ++j)
                    if (j != i && row[j] < -1e-12)
                        rep.add("NegativeOffDiagonal",
                                "(" + std::to_string(k) + "," + std::to_string(i) + "," +
                                    std::to_string(j) + ")",
                                row[j]);
                if (std::abs(rs) > 1e-10)
                    rep.add("RowSumNonzero",
                            "(" + std::to_string(k) + "," + std::to_string(i) + ")", rs);
            }
        }
    }

    // Discount and summability.
    try {
        model.reward.discount().validate();
        if (model.mode() == Mode::ct && model.reward.discount().discrete_only())
            rep.add("DiscountDiscreteOnly", "discount", 0.0);
        const double m = model.big_m();
        if (!std::isfinite(m)) rep.add("EnvelopeNotSummable", "reward", m);
    } catch (const Error& e) {
        rep.add("DiscountInvalid", e.what(), 0.0);
    }

    // Reward table shape, when tabulated.
    if (!model.reward.separable_form()) {
        for (std::size_t t = 0; t < model.reward.table().size(); ++t) {
            const auto& slice = model.reward.table()[t];
            if (static_cast<int>(slice.size()) != model.states ||
                (model.states > 0 && slice.front().size() != grid.size()))
                rep.add("RewardShapeMismatch", "t=" + std::to_string(t), 0.0);
        }
    } else if (static_cast<int>(model.reward.g().size()) != model.states ||
               (model.states > 0 && model.reward.g().front().size() != grid.size())) {
        rep.add("RewardShapeMismatch", "g", 0.0);
    }

    rep.theta_estimate = model.lipschitz ? *model.lipschitz
                                         : (model.theta_estimate >= 0.0 ? model.theta_estimate
                                                                        : lipschitz_estimate(model));
    return rep;
}

double truncation_horizon(const ModelSpec& model, double lambda, double tol, Mode mode,
                          double offset, double entropy_cap) {
    if (!(tol > 0.0)) throw Precondition("tolerance must be positive");
    if (lambda < 0.0) throw Precondition("lambda must be nonnegative");
    const double ln_leb = std::abs(std::log(model.grid.volume));
    const double cap = std::max(ln_leb, entropy_cap);
    const auto& reward = model.reward;
    const auto& delta = reward.discount();

    if (mode == Mode::dt) {
        const auto ioffset = static_cast<long long>(std::llround(offset));
        auto tail = [&](long long T) {
            return reward.envelope_tail_discrete(T + ioffset) +
                   lambda * cap * delta.tail_discrete(T + ioffset);
        };
        const long long hard_cap = 1LL << 40;
        if (tail(0) <= tol) return 0.0;
        long long hi = 1;
        while (tail(hi) > tol) {
            hi *= 2;
            if (hi > hard_cap) throw NoFiniteHorizon("tail bound never falls below tolerance");
        }
        long long lo = hi / 2; // tail(lo) > tol, tail(hi) <= tol
        while (hi - lo > 1) {
            const long long mid = lo + (hi - lo) / 2;
            (tail(mid) <= tol ? hi : lo) = mid;
        }
        return static_cast<double>(hi);
    }

    auto tail = [&](double T) {
        return reward.envelope_tail_continuous(T + offset) +
               lambda * cap * delta.tail_continuous(T + offset);
    };
    const double hard_cap = std::ldexp(1.0, 40);
    if (tail(0.0) <= tol) return 0.0;
    double hi = 1.0;
    while (tail(hi) > tol) {
        hi *= 2.0;
        if (hi > hard_cap) throw NoFiniteHorizon("tail bound never falls below tolerance");
    }
    double lo = hi / 2.0;
    for (int it = 0; it < 60 && (hi - lo) > 1e-9 * (1.0 + hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        (tail(mid) <= tol ? hi : lo) = mid;
    }
    return hi;
}

} // namespace tieq
