#pragma once

#include "optidesign/criteria.hpp"
#include "optidesign/fit.hpp"

#include <functional>

namespace optidesign {

/// Box bounds for the design variables, in model units.
struct DesignRegion {
    Vector lower;
    Vector upper;

    DesignRegion(Vector lo, Vector hi) : lower(std::move(lo)), upper(std::move(hi)) {
        require(lower.size() == upper.size(), "DesignRegion: bound dimensions differ");
        require((lower.array() < upper.array()).all(), "DesignRegion: lower must be < upper");
    }

    int dims() const { return static_cast<int>(lower.size()); }
    Vector clamp(const Vector& x) const;
    bool contains(const Vector& x, double tol = 0.0) const;

    /// Region for a joint search over `count` support points.
    DesignRegion repeated(int count) const;
};

/// Objective convention throughout: maximize (log-determinant values).
using DesignObjective = std::function<double(const Vector&)>;

struct GridResult {
    Vector point;
    double value = 0.0;
    long evaluations = 0;
};

/// Exhaustive evaluation over the Cartesian grid (endpoints included),
/// deterministic lexicographic tie-break. Total size is guarded at 1e6.
GridResult grid_search(const DesignObjective& objective, const DesignRegion& region,
                       int points_per_dim);

struct NelderMeadOptions {
    double reflection = 1.0;
    double expansion = 2.0;
    double contraction = 0.5;
    double shrink = 0.5;
    int max_iterations = 500;
    double diameter_tol = 1e-6;  // relative to 1 + |x|
};

struct OptimizeResult {
    Vector point;  // clamped into the region
    double value = 0.0;
    bool converged = false;
    int iterations = 0;
};

/// Derivative-free simplex ascent on the objective with box constraints
/// enforced by clamping plus a quadratic penalty on the pre-clamp excursion.
OptimizeResult optimize_design(const DesignObjective& objective, const Vector& start,
                               const DesignRegion& region, const NelderMeadOptions& opts = {});

/// Re-grids the region; when some grid value beats `current` by more than
/// 1e-9 relative, restarts the optimizer from that point.
OptimizeResult interior_recheck(const DesignObjective& objective, const DesignRegion& region,
                                const OptimizeResult& current, int points_per_dim,
                                const NelderMeadOptions& opts = {});

struct SearchTrace {
    Vector grid_best;
    double grid_best_value = 0.0;
    double optimizer_value = 0.0;
    bool optimizer_converged = false;
    int optimizer_iterations = 0;
    bool recheck_improved = false;
    double final_value = 0.0;
};

struct DesignOutcome {
    std::vector<Vector> support_points;
    CriterionValue criterion;
    CriterionKind kind = CriterionKind::D;
    SearchTrace trace;
};

struct SearchOptions {
    int grid_points_per_dim = 50;
    NelderMeadOptions simplex;
};

/// Initial k-support-point design: joint grid-then-simplex search over
/// n_support * m coordinates, zero-residual sensitivities at theta0.
DesignOutcome design_initial(const ModelSpec& model, const Vector& theta0, int n_support,
                             const DesignRegion& region, CriterionKind kind,
                             const SearchOptions& opts = {});

/// One-point sequential augmentation: maximizes the determinant of the
/// (n+1)-row information matrix over the new point, sensitivities evaluated
/// at the existing fit's estimates; D_P uses the observed residuals plus a
/// zero residual for the candidate row.
DesignOutcome design_sequential(const ModelSpec& model, const FitResult& fit, const Dataset& data,
                                const DesignRegion& region, CriterionKind kind,
                                const SearchOptions& opts = {});

}  // namespace optidesign
