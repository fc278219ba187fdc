#include "tieq/verify.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>

#include "tieq/entropy_gibbs.hpp"
#include "tieq/errors.hpp"
#include "tieq/eval_ct.hpp"
#include "tieq/eval_dt.hpp"
#include "tieq/numeric.hpp"

namespace tieq {

DeviationResult deviation_test(const RelaxedPolicy& pi, const ValueVector& y, double lambda,
                               const ModelSpec& model, Mode mode) {
    check_policy(pi, model);
    DeviationResult res;
    res.per_state.resize(model.states);
    res.best_node.resize(model.states);
    res.sup_value.resize(model.states);
    for (int i = 0; i < model.states; ++i) {
        const ObjectiveRow row = one_step_objective(model, mode, y, i);
        Compensated value;
        for (std::size_t k = 0; k < row.size(); ++k)
            value.add_product(model.grid.weights[k] * pi.rho[i][k], row.value(k));
        double objective = value.value();
        double sup;
        if (lambda > 0.0) {
            objective += lambda * entropy(pi.rho[i], model.grid);
            sup = softmax_value(row, lambda, model.grid);
        } else {
            sup = row.max_value();
        }
        res.per_state[i] = sup - objective;
        res.best_node[i] = row.argmax;
        res.sup_value[i] = sup;
        res.max_gap = std::max(res.max_gap, res.per_state[i]);
    }
    return res;
}

namespace {

ValueVector candidate_value(const RelaxedPolicy& pi, const ModelSpec& model, Mode mode,
                            double value_tol) {
    return mode == Mode::dt ? value_dt(pi, 0.0, 1, model, value_tol)
                            : value_ct(pi, 0.0, 0.0, model, value_tol);
}

} // namespace

std::vector<StandardPolicy> standard_equilibrium_scan(const ModelSpec& model, Mode mode,
                                                      double tol, std::size_t cap,
                                                      double value_tol) {
    if (!(tol > 0.0)) throw Precondition("tolerance must be positive");
    const std::size_t n = model.grid.size();
    const int d = model.states;
    double total = 1.0;
    for (int i = 0; i < d; ++i) total *= static_cast<double>(n);
    if (total > static_cast<double>(cap))
        throw ScanTooLarge("scan would enumerate " + std::to_string(total) + " policies");
    const auto count = static_cast<std::size_t>(total);

    std::vector<char> keep(count, 0);
    parallel_for(count, [&](std::size_t idx) {
        StandardPolicy alpha(d);
        std::size_t rem = idx;
        for (int i = 0; i < d; ++i) {
            alpha[i] = rem % n;
            rem /= n;
        }
        const RelaxedPolicy pi = one_hot_policy(model.grid, alpha);
        const ValueVector y = candidate_value(pi, model, mode, value_tol);
        bool ok = true;
        for (int i = 0; i < d && ok; ++i) {
            const ObjectiveRow row = one_step_objective(model, mode, y, i);
            ok = row.gap_from_max(alpha[i]) >= -tol;
        }
        keep[idx] = ok ? 1 : 0;
    });

    std::vector<StandardPolicy> out;
    for (std::size_t idx = 0; idx < count; ++idx) {
        if (!keep[idx]) continue;
        StandardPolicy alpha(d);
        std::size_t rem = idx;
        for (int i = 0; i < d; ++i) {
            alpha[i] = rem % n;
            rem /= n;
        }
        out.push_back(std::move(alpha));
    }
    return out;
}

std::vector<std::vector<double>> mean_action_policy(const RelaxedPolicy& pi,
                                                    const ActionGrid& grid) {
    std::vector<std::vector<double>> mean(pi.states(), std::vector<double>(grid.dims, 0.0));
    for (int i = 0; i < pi.states(); ++i) {
        for (int m = 0; m < grid.dims; ++m) {
            Compensated acc;
            for (std::size_t k = 0; k < grid.size(); ++k)
                acc.add_product(grid.weights[k] * pi.rho[i][k], grid.nodes[k][m]);
            mean[i][m] = acc.value();
        }
    }
    return mean;
}

namespace {

void require_direct_choice(const ModelSpec& model) {
    if (model.mode() != Mode::dt)
        throw StructureMismatch("direct-choice check needs a discrete-time model");
    if (!model.reward.separable_form())
        throw StructureMismatch("direct-choice check needs a separable reward");
    const int d = model.states;
    const int dims = model.grid.dims;
    if (dims != d - 1 || d < 2)
        throw StructureMismatch("direct-choice models pick the first d-1 transition "
                                "probabilities as the action");
    const Tensor3& p = *model.transition;
    for (int k = 0; k < p.n_nodes; ++k) {
        for (int i = 0; i < d; ++i) {
            double sum = 0.0;
            for (int j = 0; j < d - 1; ++j) {
                const double u = model.grid.nodes[k][j];
                if (std::abs(p(k, i, j) - u) > 1e-12)
                    throw StructureMismatch("transition row is not the action vector");
                sum += u;
            }
            if (std::abs(p(k, i, d - 1) - (1.0 - sum)) > 1e-12)
                throw StructureMismatch("transition row remainder mismatch");
        }
    }
}

// Per-dimension two-node blend with the exact mean; the tensor product over
// dimensions keeps the mean coordinatewise.
RelaxedPolicy blend_at_means(const std::vector<std::vector<double>>& mean,
                             const ActionGrid& grid) {
    const int dims = grid.dims;
    std::vector<std::vector<double>> axis(dims);
    for (int m = 0; m < dims; ++m) {
        std::vector<double> coords;
        for (std::size_t k = 0; k < grid.size(); ++k) coords.push_back(grid.nodes[k][m]);
        std::sort(coords.begin(), coords.end());
        coords.erase(std::unique(coords.begin(), coords.end()), coords.end());
        axis[m] = std::move(coords);
    }
    std::vector<std::size_t> stride(dims, 1);
    for (int m = dims - 2; m >= 0; --m) stride[m] = stride[m + 1] * axis[m + 1].size();

    RelaxedPolicy pi;
    pi.rho.assign(mean.size(), std::vector<double>(grid.size(), 0.0));
    for (std::size_t i = 0; i < mean.size(); ++i) {
        // Bracketing index and weight per dimension.
        std::vector<std::pair<std::size_t, double>> lo(dims); // (index, weight of the upper node)
        for (int m = 0; m < dims; ++m) {
            const auto& c = axis[m];
            const double x = mean[i][m];
            auto it = std::lower_bound(c.begin(), c.end(), x);
            std::size_t hi_idx = it == c.end() ? c.size() - 1 : static_cast<std::size_t>(it - c.begin());
            if (hi_idx == 0) hi_idx = 1;
            const double a = c[hi_idx - 1], b = c[hi_idx];
            double t = (x - a) / (b - a);
            t = std::clamp(t, 0.0, 1.0);
            lo[m] = {hi_idx - 1, t};
        }
        for (std::size_t combo = 0; combo < (std::size_t(1) << dims); ++combo) {
            double massfrac = 1.0;
            std::size_t node = 0;
            for (int m = 0; m < dims; ++m) {
                const bool up = (combo >> m) & 1;
                massfrac *= up ? lo[m].second : 1.0 - lo[m].second;
                node += (lo[m].first + (up ? 1 : 0)) * stride[m];
            }
            if (massfrac > 0.0) pi.rho[i][node] += massfrac / grid.weights[node];
        }
    }
    return pi;
}

} // namespace

MeanActionCheck mean_action_value_check(const RelaxedPolicy& pi, const ModelSpec& model,
                                        double tol) {
    require_direct_choice(model);
    check_policy(pi, model);
    MeanActionCheck out;
    out.j_pi = value_dt(pi, 0.0, 0, model, 1e-10);
    const auto mean = mean_action_policy(pi, model.grid);
    const RelaxedPolicy snapped = blend_at_means(mean, model.grid);
    out.j_mean = value_dt(snapped, 0.0, 0, model, 1e-10);
    out.match = inf_dist(out.j_pi, out.j_mean) <= tol * (1.0 + inf_norm(out.j_pi));
    return out;
}

ValueVector optimal_value_exponential(const ModelSpec& model, double tol) {
    if (model.reward.discount().family() != Discount::Family::Exponential)
        throw NotExponential("optimal value needs exponential discounting");
    if (!model.reward.separable_form())
        throw NotExponential("optimal value needs a separable reward");
    const int d = model.states;
    const std::size_t n = model.grid.size();
    const auto& g = model.reward.g();
    ValueVector j(d, 0.0), next(d, 0.0);

    if (model.mode() == Mode::dt) {
        const double beta = model.reward.discount()(1.0);
        const double stop = tol * (1.0 - beta) / std::max(beta, 1e-12);
        for (int it = 0; it < 100000000; ++it) {
            for (int i = 0; i < d; ++i) {
                double best = -HUGE_VAL;
                for (std::size_t k = 0; k < n; ++k) {
                    const double v =
                        g[i][k] + beta * stable_dot(model.kernel_row(static_cast<int>(k), i), j);
                    best = std::max(best, v);
                }
                next[i] = best;
            }
            const double diff = inf_dist(next, j);
            j = next;
            if (diff <= stop) break;
        }
        return j;
    }

    // Uniformized max-operator, a gamma/(rate+gamma) contraction.
    const double rate = -std::log(model.reward.discount()(1.0));
    double gamma = 0.0;
    const Tensor3& q = *model.generator;
    for (int k = 0; k < q.n_nodes; ++k)
        for (int i = 0; i < d; ++i) gamma = std::max(gamma, std::abs(q(k, i, i)));
    const double contract = gamma / (rate + gamma);
    const double stop = gamma > 0.0 ? tol * (1.0 - contract) / contract : HUGE_VAL;
    for (int it = 0; it < 100000000; ++it) {
        for (int i = 0; i < d; ++i) {
            double best = -HUGE_VAL;
            for (std::size_t k = 0; k < n; ++k) {
                const double v = g[i][k] + stable_dot(model.kernel_row(static_cast<int>(k), i), j) +
                                 gamma * j[i];
                best = std::max(best, v);
            }
            next[i] = best / (rate + gamma);
        }
        const double diff = inf_dist(next, j);
        j = next;
        if (diff <= stop) break;
    }
    return j;
}

BellmanReport bellman_consistency(const ModelSpec& model, const AnnealReport& annealed,
                                  double tol) {
    BellmanReport rep;
    rep.optimal = optimal_value_exponential(model);
    rep.gap = inf_dist(annealed.final_value, rep.optimal);
    rep.within = rep.gap <= tol * (1.0 + inf_norm(rep.optimal));
    return rep;
}

namespace {

struct SupportChoice {
    std::vector<std::size_t> nodes; // one or two nodes
};

RelaxedPolicy assemble(const std::vector<SupportChoice>& support,
                       const std::vector<double>& mix, // mass on the second node, per state
                       const ActionGrid& grid) {
    RelaxedPolicy pi;
    pi.rho.assign(support.size(), std::vector<double>(grid.size(), 0.0));
    for (std::size_t i = 0; i < support.size(); ++i) {
        if (support[i].nodes.size() == 1) {
            const std::size_t k = support[i].nodes[0];
            pi.rho[i][k] = 1.0 / grid.weights[k];
        } else {
            const std::size_t k1 = support[i].nodes[0], k2 = support[i].nodes[1];
            pi.rho[i][k1] = (1.0 - mix[i]) / grid.weights[k1];
            pi.rho[i][k2] = mix[i] / grid.weights[k2];
        }
    }
    return pi;
}

struct CandidateCheck {
    bool ok = false;
    double deviation_gap = 0.0;
    ValueVector y;
};

CandidateCheck check_candidate(const std::vector<SupportChoice>& support,
                               const std::vector<double>& mix, const ModelSpec& model,
                               const OracleConfig& cfg) {
    CandidateCheck res;
    const RelaxedPolicy pi = assemble(support, mix, model.grid);
    res.y = value_dt(pi, 0.0, 1, model, cfg.value_tol);
    res.ok = true;
    for (int i = 0; i < model.states; ++i) {
        const ObjectiveRow row = one_step_objective(model, Mode::dt, res.y, i);
        Compensated value;
        for (std::size_t k = 0; k < row.size(); ++k)
            value.add_product(model.grid.weights[k] * pi.rho[i][k], row.value(k));
        res.deviation_gap = std::max(res.deviation_gap, row.max_value() - value.value());
        for (std::size_t k : support[i].nodes)
            if (row.gap_from_max(k) < -cfg.gap_tol) res.ok = false;
    }
    return res;
}

// Signed indifference a_{k2} - a_{k1} for a mixing state at the candidate's value.
double indifference(const std::vector<SupportChoice>& support, std::vector<double> mix,
                    std::size_t state, double p, const ModelSpec& model,
                    const OracleConfig& cfg) {
    mix[state] = p;
    const RelaxedPolicy pi = assemble(support, mix, model.grid);
    const ValueVector y = value_dt(pi, 0.0, 1, model, cfg.value_tol);
    const ObjectiveRow row = one_step_objective(model, Mode::dt, y, static_cast<int>(state));
    const auto& nodes = support[state].nodes;
    return row.value(nodes[1]) - row.value(nodes[0]);
}

} // namespace

std::vector<OraclePolicy> brute_force_oracle(const ModelSpec& model, const OracleConfig& cfg) {
    if (model.mode() != Mode::dt) throw ModeMismatch("the exhaustive oracle is discrete-time");
    if (model.grid.size() > cfg.max_nodes)
        throw ScanTooLarge("oracle grid cap is " + std::to_string(cfg.max_nodes) + " nodes");
    if (model.states > cfg.max_states)
        throw ScanTooLarge("oracle state cap is " + std::to_string(cfg.max_states));
    if (cfg.mixture_levels < 2 || cfg.mixture_levels > 11)
        throw Precondition("mixture levels must lie in [2, 11]");

    const std::size_t n = model.grid.size();
    const int d = model.states;

    // Per-state choices: every node alone, then every unordered pair.
    std::vector<SupportChoice> choices;
    for (std::size_t k = 0; k < n; ++k) choices.push_back({{k}});
    for (std::size_t k1 = 0; k1 < n; ++k1)
        for (std::size_t k2 = k1 + 1; k2 < n; ++k2) choices.push_back({{k1, k2}});

    std::vector<OraclePolicy> out;
    std::map<std::vector<long long>, bool> seen;
    auto signature = [&](const std::vector<SupportChoice>& support,
                         const std::vector<double>& mix) {
        std::vector<long long> sig;
        for (int i = 0; i < d; ++i) {
            sig.push_back(static_cast<long long>(support[i].nodes[0]));
            if (support[i].nodes.size() == 2) {
                sig.push_back(static_cast<long long>(support[i].nodes[1]));
                sig.push_back(std::llround(mix[i] * 1e7));
            } else {
                sig.push_back(-1);
                sig.push_back(0);
            }
        }
        return sig;
    };
    auto emit = [&](const std::vector<SupportChoice>& support, const std::vector<double>& mix,
                    const CandidateCheck& chk) {
        const auto sig = signature(support, mix);
        if (seen.count(sig)) return;
        seen[sig] = true;
        OraclePolicy op;
        op.policy = assemble(support, mix, model.grid);
        op.standard = true;
        for (int i = 0; i < d; ++i)
            if (support[i].nodes.size() != 1) op.standard = false;
        if (op.standard)
            for (int i = 0; i < d; ++i) op.nodes.push_back(support[i].nodes[0]);
        op.deviation_gap = chk.deviation_gap;
        out.push_back(std::move(op));
    };

    std::vector<std::size_t> profile(d, 0);
    const int levels = cfg.mixture_levels;
    while (true) {
        std::vector<SupportChoice> support(d);
        std::vector<std::size_t> mixing;
        for (int i = 0; i < d; ++i) {
            support[i] = choices[profile[i]];
            if (support[i].nodes.size() == 2) mixing.push_back(i);
        }

        if (mixing.empty()) {
            std::vector<double> mix(d, 0.0);
            const CandidateCheck chk = check_candidate(support, mix, model, cfg);
            if (chk.ok) emit(support, mix, chk);
        } else {
            // Seed sweep over the mixture grid; keep every seed that already
            // certifies, remember the least-violating one for refinement.
            std::vector<double> best_mix;
            double best_violation = HUGE_VAL;
            std::vector<std::size_t> seed(mixing.size(), 0);
            while (true) {
                std::vector<double> mix(d, 0.0);
                for (std::size_t s = 0; s < mixing.size(); ++s)
                    mix[mixing[s]] =
                        static_cast<double>(seed[s]) / static_cast<double>(levels - 1);
                const CandidateCheck chk = check_candidate(support, mix, model, cfg);
                if (chk.ok) {
                    emit(support, mix, chk);
                } else {
                    double viol = 0.0;
                    for (std::size_t s = 0; s < mixing.size(); ++s)
                        viol += std::abs(
                            indifference(support, mix, mixing[s], mix[mixing[s]], model, cfg));
                    if (viol < best_violation) {
                        best_violation = viol;
                        best_mix = mix;
                    }
                }
                std::size_t pos = 0;
                while (pos < seed.size() && ++seed[pos] >= static_cast<std::size_t>(levels)) {
                    seed[pos] = 0;
                    ++pos;
                }
                if (pos == seed.size()) break;
            }

            // Refine the best seed by cyclic bisection on each state's
            // support-indifference condition.
            if (!best_mix.empty()) {
                std::vector<double> mix = best_mix;
                bool feasible = true;
                for (int round = 0; round < 40 && feasible; ++round) {
                    double moved = 0.0;
                    for (std::size_t s = 0; s < mixing.size() && feasible; ++s) {
                        const std::size_t i = mixing[s];
                        double lo = 0.0, hi = 1.0;
                        double flo = indifference(support, mix, i, lo, model, cfg);
                        double fhi = indifference(support, mix, i, hi, model, cfg);
                        double target;
                        if (flo == 0.0 && fhi == 0.0) {
                            target = mix[i]; // flat: any weight balances
                        } else if (flo * fhi > 0.0) {
                            feasible = false; // cannot balance this pair
                            break;
                        } else {
                            for (int b = 0; b < 80; ++b) {
                                const double mid = 0.5 * (lo + hi);
                                const double fm = indifference(support, mix, i, mid, model, cfg);
                                if (fm == 0.0) {
                                    lo = hi = mid;
                                    break;
                                }
                                ((flo * fm < 0.0) ? hi : lo) = mid;
                                ((flo * fm < 0.0) ? fhi : flo) = fm;
                            }
                            target = 0.5 * (lo + hi);
                        }
                        moved = std::max(moved, std::abs(target - mix[i]));
                        mix[i] = target;
                    }
                    if (moved <= 1e-13) break;
                }
                if (feasible) {
                    bool interior = true;
                    for (std::size_t i_mix : mixing)
                        if (mix[i_mix] < 1e-6 || mix[i_mix] > 1.0 - 1e-6) interior = false;
                    if (interior) {
                        const CandidateCheck chk = check_candidate(support, mix, model, cfg);
                        if (chk.ok) emit(support, mix, chk);
                    }
                }
            }
        }

        int pos = 0;
        while (pos < d && ++profile[pos] >= choices.size()) {
            profile[pos] = 0;
            ++pos;
        }
        if (pos == d) break;
    }
    return out;
}

} // namespace tieq
