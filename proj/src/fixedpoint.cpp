#include "tieq/fixedpoint.hpp"

#include <cmath>
#include <deque>
#include <random>

#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"
#include "tieq/eval_ct.hpp"
#include "tieq/eval_dt.hpp"
#include "tieq/numeric.hpp"

namespace tieq {

ValueVector psi(const ValueVector& y, double lambda, const ModelSpec& model, Mode mode,
                double tol) {
    if (!(lambda > 0.0)) throw NonpositiveLambda("psi requires lambda > 0");
    const RelaxedPolicy pi = gibbs_policy(y, lambda, model, mode);
    if (mode == Mode::dt) return value_dt(pi, lambda, 1, model, tol);
    return value_ct(pi, lambda, 0.0, model, tol);
}

namespace {

// Least squares min |rhs - cols * gamma| for a handful of columns, solved by
// plain elimination on the (ridged) normal equations.
std::vector<double> small_least_squares(const std::vector<std::vector<double>>& cols,
                                        const std::vector<double>& rhs) {
    const std::size_t m = cols.size();
    std::vector<std::vector<double>> a(m, std::vector<double>(m, 0.0));
    std::vector<double> b(m, 0.0);
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t q = 0; q < m; ++q)
            a[p][q] = stable_dot(cols[p], cols[q]);
        b[p] = stable_dot(cols[p], rhs);
        a[p][p] += 1e-12 * (1.0 + a[p][p]);
    }
    for (std::size_t p = 0; p < m; ++p) {
        for (std::size_t r = p + 1; r < m; ++r) {
            const double factor = a[r][p] / a[p][p];
            for (std::size_t q = p; q < m; ++q) a[r][q] -= factor * a[p][q];
            b[r] -= factor * b[p];
        }
    }
    std::vector<double> gamma(m, 0.0);
    for (std::size_t p = m; p-- > 0;) {
        double s = b[p];
        for (std::size_t q = p + 1; q < m; ++q) s -= a[p][q] * gamma[q];
        gamma[p] = s / a[p][p];
    }
    return gamma;
}

} // namespace

FixedPointReport solve_fixed_point(const ValueVector& y0, double lambda,
                                   const ModelSpec& model, Mode mode,
                                   const SolverConfig& cfg) {
    if (cfg.max_iter < 1) throw Precondition("max_iter must be at least 1");
    if (!(cfg.tol > 0.0)) throw Precondition("tolerance must be positive");
    if (!(cfg.theta > 0.0 && cfg.theta <= 1.0)) throw Precondition("damping must lie in (0,1]");
    if (static_cast<int>(y0.size()) != model.states)
        throw Precondition("start vector length does not match the state count");

    const double value_tol = cfg.tol * cfg.value_tol_factor;
    const double big_m = cfg.diagnostics ? model.big_m() : 0.0;
    const BoundConstants bounds = cfg.diagnostics ? bound_constants(model) : BoundConstants{};

    FixedPointReport rep;
    rep.y = y0;
    std::deque<ValueVector> hist_y, hist_g; // for the secant window
    double best_res = HUGE_VAL;
    double prev_res = HUGE_VAL;

    for (int it = 1; it <= cfg.max_iter; ++it) {
        const ValueVector z = psi(rep.y, lambda, model, mode, value_tol);
        const double res = inf_dist(z, rep.y);
        rep.iterations = it;
        rep.residual = res;
        rep.trace.emplace_back(it, res);
        if (cfg.diagnostics) {
            const double cap = (1.0 + lambda * bounds.phi(lambda, two_norm(rep.y))) * big_m;
            if (inf_norm(z) > cap * (1.0 + 1e-9) + 1e-12) rep.confinement_ok = false;
        }
        if (res <= cfg.tol) {
            rep.converged = true;
            return rep;
        }
        // A residual exploding past its best value will not come back at this
        // damping; stop burning iterations so callers can retry smaller theta.
        best_res = std::min(best_res, res);
        if (!std::isfinite(res) || (it > 8 && res > 100.0 * best_res)) return rep;
        if (cfg.anderson && res > 4.0 * prev_res) {
            hist_y.clear();
            hist_g.clear();
        }
        prev_res = res;

        ValueVector next(rep.y.size());
        bool accelerated = false;
        if (cfg.anderson) {
            hist_y.push_back(rep.y);
            hist_g.push_back(z);
            while (static_cast<int>(hist_y.size()) > cfg.anderson_window + 1) {
                hist_y.pop_front();
                hist_g.pop_front();
            }
            const std::size_t m = hist_y.size() - 1;
            if (m >= 1) {
                std::vector<double> fk(rep.y.size());
                for (std::size_t i = 0; i < fk.size(); ++i) fk[i] = z[i] - rep.y[i];
                std::vector<std::vector<double>> dF(m), dY(m);
                for (std::size_t c = 0; c < m; ++c) {
                    dF[c].resize(fk.size());
                    dY[c].resize(fk.size());
                    for (std::size_t i = 0; i < fk.size(); ++i) {
                        const double f1 = hist_g[c + 1][i] - hist_y[c + 1][i];
                        const double f0 = hist_g[c][i] - hist_y[c][i];
                        dF[c][i] = f1 - f0;
                        dY[c][i] = hist_y[c + 1][i] - hist_y[c][i];
                    }
                }
                const std::vector<double> gamma = small_least_squares(dF, fk);
                for (std::size_t i = 0; i < fk.size(); ++i) {
                    double corr = 0.0;
                    for (std::size_t c = 0; c < m; ++c)
                        corr += (dY[c][i] + cfg.theta * dF[c][i]) * gamma[c];
                    next[i] = rep.y[i] + cfg.theta * fk[i] - corr;
                }
                accelerated = true;
                for (double v : next)
                    if (!std::isfinite(v)) accelerated = false;
            }
        }
        if (!accelerated) {
            for (std::size_t i = 0; i < next.size(); ++i)
                next[i] = (1.0 - cfg.theta) * rep.y[i] + cfg.theta * z[i];
        }
        rep.y = std::move(next);
    }
    return rep; // converged stays false
}

std::vector<ValueVector> default_starts(const ModelSpec& model, double lambda,
                                        int random_count, std::uint64_t seed) {
    const int d = model.states;
    const double m = model.big_m();
    std::vector<ValueVector> starts;
    starts.push_back(ValueVector(d, 0.0));
    starts.push_back(ValueVector(d, m));
    starts.push_back(ValueVector(d, -m));
    if (random_count > 0) {
        const double radius = confinement_radius(model, lambda);
        std::mt19937_64 rng(seed);
        std::normal_distribution<double> gauss(0.0, 1.0);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        for (int r = 0; r < random_count; ++r) {
            ValueVector y(d);
            double norm = 0.0;
            for (double& v : y) {
                v = gauss(rng);
                norm += v * v;
            }
            norm = std::sqrt(norm);
            const double scale =
                radius * std::pow(unif(rng), 1.0 / static_cast<double>(d)) / std::max(norm, 1e-300);
            for (double& v : y) v *= scale;
            starts.push_back(std::move(y));
        }
    }
    return starts;
}

FixedPointReport solve_multistart(const std::vector<ValueVector>& starts, double lambda,
                                  const ModelSpec& model, Mode mode, const SolverConfig& cfg) {
    if (starts.empty()) throw Precondition("multi-start needs at least one start point");
    FixedPointReport best;
    bool have = false;
    for (const auto& y0 : starts) {
        FixedPointReport rep = solve_fixed_point(y0, lambda, model, mode, cfg);
        if (rep.converged) return rep;
        if (!have || rep.residual < best.residual) {
            best = std::move(rep);
            have = true;
        }
    }
    return best;
}

} // namespace tieq
