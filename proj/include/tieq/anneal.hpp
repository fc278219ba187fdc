#pragma once

#include <cstddef>
#include <vector>

#include "tieq/fixedpoint.hpp"
#include "tieq/model.hpp"

namespace tieq {

struct AnnealSchedule {
    double lambda0 = 1.0;
    double factor = 0.5;
    double lambda_min = 1e-3;
};

struct CertificateThresholds {
    double max_deviation_gap = 1e-3;
    double max_off_support_mass = 1e-2;
    double max_self_consistency = 1e-4;
    double support_gap_tol = 0.0; // <= 0 means automatic
};

// Evidence that (pi, y) is an approximate unregularized equilibrium:
//   deviation_gap      best one-step improvement over pi at lambda = 0,
//   off_support_mass   policy mass outside the gap-tolerance argmax set,
//   self_consistency   |value(pi, lambda=0, one-step-ahead) - y|_inf.
struct Certificate {
    double deviation_gap = 0.0;
    double off_support_mass = 0.0;
    double self_consistency = 0.0;
    double support_gap_tol = 0.0;
    // Any grid-supported deviation gains at most this much (gap plus the
    // Lipschitz slack of the off-support mass).
    double soundness_bound = 0.0;
    bool passed = false;
};

struct AnnealStage {
    double lambda = 0.0;
    FixedPointReport report;
    RelaxedPolicy policy;
    double deviation_gap = 0.0;     // at lambda = 0, against the stage value
    double off_support_mass = 0.0;  // at the stage's automatic gap tolerance
    int damping_retries = 0;
};

struct AnnealReport {
    std::vector<AnnealStage> stages;
    RelaxedPolicy final_policy;
    ValueVector final_value; // value of the final policy at lambda = 0
    ValueVector aux_value;   // one-step-ahead value used by the certificate
    Certificate certificate;
    bool all_converged = true;
};

// Nodes within gap_tol of the one-step argmax at y; never empty.
std::vector<std::size_t> extract_support(const ValueVector& y, int state,
                                         const ModelSpec& model, Mode mode, double gap_tol);

// Scale-aware default for the argmax tolerance. lambda_hint > 0 widens it to
// the resolution a lambda-regularized stage can actually deliver.
double default_support_gap_tol(const ValueVector& y, const ModelSpec& model,
                               double lambda_hint);

Certificate certify(const RelaxedPolicy& pi, const ValueVector& y, const ModelSpec& model,
                    Mode mode, const CertificateThresholds& thresholds,
                    double lambda_hint = 0.0);

// Decreasing-lambda sweep with warm starts. Stages that miss the residual
// target are retried with smaller damping and flagged, never dropped.
AnnealReport solve_annealed(const ModelSpec& model, Mode mode, const AnnealSchedule& schedule,
                            const SolverConfig& solver,
                            const CertificateThresholds& thresholds = {});

} // namespace tieq
