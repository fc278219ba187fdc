#include "tieq/eval_ct.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"
#include "tieq/eval_dt.hpp"

namespace tieq {

namespace {

void require_generator(const Matrix& q) {
    if (q.rows() != q.cols() || q.rows() == 0) throw InvalidGenerator("generator must be square");
    for (int i = 0; i < q.rows(); ++i) {
        double rs = 0.0;
        for (int j = 0; j < q.cols(); ++j) {
            const double v = q(i, j);
            if (!std::isfinite(v)) throw InvalidGenerator("generator entry is not finite");
            if (j != i && v < -1e-9) throw InvalidGenerator("negative off-diagonal rate");
            rs += v;
        }
        if (std::abs(rs) > 1e-9 * std::max(1.0, std::abs(q(i, i))))
            throw InvalidGenerator("generator row " + std::to_string(i) + " sums to " +
                                   std::to_string(rs));
    }
}

double max_exit_rate(const Matrix& q) {
    double g = 0.0;
    for (int i = 0; i < q.rows(); ++i) g = std::max(g, std::abs(q(i, i)));
    return g;
}

// Poisson weights by the multiplicative recurrence; falls back to the
// log-space pmf when exp(-mean) would underflow.
double poisson_first(double mean) {
    return mean < 600.0 ? std::exp(-mean) : 0.0;
}

double poisson_next(double w, long long n, double mean) {
    if (w > 0.0) return w * mean / static_cast<double>(n);
    return std::exp(static_cast<double>(n) * std::log(mean) - mean -
                    std::lgamma(static_cast<double>(n) + 1.0));
}

// exp(sQ) applied to a vector through the uniformized Poisson series.
std::vector<double> apply_exp(const Matrix& ptilde, double gamma, double s, double tol,
                              std::vector<double> x) {
    const double mean = gamma * s;
    if (mean == 0.0) return x;
    std::vector<double> acc(x.size(), 0.0);
    double w = poisson_first(mean);
    double cum = w;
    for (std::size_t i = 0; i < x.size(); ++i) acc[i] = w * x[i];
    const double n_guard = mean + 60.0 * std::sqrt(mean + 30.0) + 300.0;
    std::vector<double> next(x.size());
    for (long long n = 1; cum < 1.0 - tol; ++n) {
        for (std::size_t i = 0; i < x.size(); ++i) {
            double dot = 0.0;
            const auto row = ptilde.row(static_cast<int>(i));
            for (std::size_t j = 0; j < x.size(); ++j) dot += row[j] * x[j];
            next[i] = dot;
        }
        x.swap(next);
        w = poisson_next(w, n, mean);
        cum += w;
        for (std::size_t i = 0; i < x.size(); ++i) acc[i] += w * x[i];
        if (static_cast<double>(n) > n_guard) break;
    }
    return acc;
}

} // namespace

Matrix policy_generator(const RelaxedPolicy& pi, const ModelSpec& model) {
    if (model.mode() != Mode::ct)
        throw ModeMismatch("policy_generator needs a continuous-time model");
    check_policy(pi, model);
    const int d = model.states;
    Matrix q(d, d);
    for (int i = 0; i < d; ++i) {
        double off_sum = 0.0;
        for (int j = 0; j < d; ++j) {
            if (j == i) continue;
            Compensated acc;
            for (std::size_t k = 0; k < model.grid.size(); ++k)
                acc.add_product(model.grid.weights[k] * pi.rho[i][k],
                                (*model.generator)(static_cast<int>(k), i, j));
            double v = acc.value();
            if (v < 0.0) {
                if (v < -1e-12) throw InvalidGenerator("policy generator has a negative rate");
                v = 0.0;
            }
            q(i, j) = v;
            off_sum += v;
        }
        q(i, i) = -off_sum;
    }
    return q;
}

Matrix transition_matrix(const Matrix& q, double s, double tol) {
    if (!(s >= 0.0)) throw Precondition("time must be nonnegative");
    if (!(tol > 0.0)) throw Precondition("tolerance must be positive");
    require_generator(q);
    const int d = q.rows();
    const double gamma = max_exit_rate(q);
    const double mean = gamma * s;
    if (mean == 0.0) return Matrix::identity(d);

    Matrix ptilde = Matrix::identity(d);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) ptilde(i, j) += q(i, j) / gamma;

    Matrix acc(d, d);
    Matrix cur = Matrix::identity(d);
    double w = poisson_first(mean);
    double cum = w;
    for (int i = 0; i < d; ++i) acc(i, i) = w;
    const double n_guard = mean + 60.0 * std::sqrt(mean + 30.0) + 300.0;
    for (long long n = 1; cum < 1.0 - tol; ++n) {
        cur = cur * ptilde;
        w = poisson_next(w, n, mean);
        cum += w;
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) acc(i, j) += w * cur(i, j);
        if (static_cast<double>(n) > n_guard) break;
    }
    return acc;
}

ValueVector value_ct(const RelaxedPolicy& pi, double lambda, double t0,
                     const ModelSpec& model, double tol) {
    if (model.mode() != Mode::ct) throw ModeMismatch("value_ct needs a continuous-time model");
    if (!(tol > 0.0)) throw Precondition("tolerance must be positive");
    if (lambda < 0.0) throw Precondition("lambda must be nonnegative");
    if (!(t0 >= 0.0)) throw Precondition("t0 must be nonnegative");
    check_policy(pi, model);

    const int d = model.states;
    const auto& grid = model.grid;
    const auto& reward = model.reward;
    const auto& delta = reward.discount();

    std::vector<double> h(d, 0.0);
    double h_cap = 0.0;
    if (lambda > 0.0) {
        for (int i = 0; i < d; ++i) {
            h[i] = entropy(pi.rho[i], grid);
            h_cap = std::max(h_cap, std::abs(h[i]));
        }
    }

    const double horizon = truncation_horizon(model, lambda, tol / 2.0, Mode::ct, t0, h_cap);
    if (horizon == 0.0) return ValueVector(d, 0.0);

    const Matrix q = policy_generator(pi, model);
    const double gamma = max_exit_rate(q);
    Matrix ptilde;
    if (gamma > 0.0) {
        ptilde = Matrix::identity(d);
        for (int i = 0; i < d; ++i)
            for (int j = 0; j < d; ++j) ptilde(i, j) += q(i, j) / gamma;
    }

    std::vector<double> gbar(d, 0.0);
    if (reward.separable_form()) {
        for (int i = 0; i < d; ++i) {
            Compensated acc;
            for (std::size_t k = 0; k < grid.size(); ++k)
                acc.add_product(grid.weights[k] * pi.rho[i][k], reward.g()[i][k]);
            gbar[i] = acc.value();
        }
    }
    auto running = [&](double t) {
        std::vector<double> r(d, 0.0);
        const double dt = delta(t);
        for (int i = 0; i < d; ++i) {
            if (reward.separable_form()) {
                r[i] = dt * gbar[i];
            } else {
                Compensated acc;
                for (std::size_t m = 0; m < grid.size(); ++m)
                    acc.add_product(grid.weights[m] * pi.rho[i][m],
                                    reward.value(t, i, static_cast<int>(m)));
                r[i] = acc.value();
            }
            r[i] += lambda * dt * h[i];
        }
        return r;
    };

    const double exp_tol = std::max(1e-16, std::min(1e-15, tol * 1e-4));
    auto integrand = [&](double s) {
        std::vector<double> r = running(t0 + s);
        if (gamma == 0.0) return r;
        return apply_exp(ptilde, gamma, s, exp_tol, std::move(r));
    };

    // Composite Simpson with doubling; previously computed points are reused.
    const std::size_t max_panels = std::size_t(1) << 20;
    std::size_t panels = 8;
    std::vector<std::vector<double>> values(panels + 1);
    for (std::size_t j = 0; j <= panels; ++j)
        values[j] = integrand(horizon * static_cast<double>(j) / static_cast<double>(panels));

    auto simpson = [&](const std::vector<std::vector<double>>& v) {
        const std::size_t n = v.size() - 1;
        const double step = horizon / static_cast<double>(n);
        std::vector<double> out(d, 0.0);
        for (int i = 0; i < d; ++i) {
            Compensated acc;
            acc.add(v.front()[i]);
            acc.add(v.back()[i]);
            for (std::size_t j = 1; j < n; ++j) acc.add((j % 2 == 1 ? 4.0 : 2.0) * v[j][i]);
            out[i] = acc.value() * step / 3.0;
        }
        return out;
    };

    std::vector<double> estimate = simpson(values);
    while (panels < max_panels) {
        const std::size_t fine = panels * 2;
        std::vector<std::vector<double>> next(fine + 1);
        for (std::size_t j = 0; j <= fine; ++j) {
            if (j % 2 == 0)
                next[j] = std::move(values[j / 2]);
            else
                next[j] = integrand(horizon * static_cast<double>(j) / static_cast<double>(fine));
        }
        values = std::move(next);
        panels = fine;
        std::vector<double> refined = simpson(values);
        const double diff = inf_dist(refined, estimate);
        estimate = std::move(refined);
        if (diff <= tol / 2.0) break;
    }
    return estimate;
}

} // namespace tieq
