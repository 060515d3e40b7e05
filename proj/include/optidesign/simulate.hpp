#pragma once

#include "optidesign/fit.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace optidesign {

/// Protocol for one simulation study: simulate the response at the newly
/// designed point from the base fit, refit all n+1 points, record the
/// linear-approximation covariance summaries.
struct SimulationPlan {
    ModelSpec model;
    FitResult base_fit;
    Dataset base_dataset;
    Vector new_point;
    int n_sims = 2000;
    std::optional<NoiseModel> noise;  // default: sigma = sqrt(base_fit.s2)
    std::uint64_t seed = 0;
    std::string label;
};

struct SimRecord {
    Matrix correlation;  // k x k
    Vector std_errors;
    double logdet_vtv = 0.0;  // log |V'V| at this sim's estimates
    bool converged = false;
};

struct SummaryStats {
    double mean = 0.0;
    double median = 0.0;
    double q10 = 0.0;
    double q90 = 0.0;
};

struct SimulationReport {
    std::vector<SimRecord> per_sim;  // length n_sims, indexed by sim
    int n_failed = 0;
    int k = 0;
    double sigma = 0.0;
    std::uint64_t seed = 0;
    std::string label;
    // keyed "corr_i_j" (1-based, i<j) and "se_i"; over converged sims only
    std::map<std::string, SummaryStats> summaries;
};

/// Deterministic given (seed, plan): per-sim RNG streams are derived from
/// (seed, sim index), so results do not depend on execution order.
/// Aborts with ConvergenceError when more than 20% of refits fail.
SimulationReport run_simulation(const SimulationPlan& plan);

struct PairedComparison {
    Vector se_win_fraction;    // per parameter: fraction of sims with se_a < se_b
    Matrix corr_win_fraction;  // (i,j), i<j: fraction with |corr_a| < |corr_b|
    double mean_d_efficiency = 0.0;  // mean over sims of exp((ld_a - ld_b)/k) * 100
    int n_compared = 0;
};

/// Paired per-sim comparison of two reports from plans with equal n_sims
/// and model dimension. Ties count 1/2.
PairedComparison compare_reports(const SimulationReport& a, const SimulationReport& b);

}  // namespace optidesign
