#pragma once

#include "optidesign/model.hpp"

#include <functional>
#include <vector>

namespace optidesign {

struct FitResult {
    Vector theta;       // least-squares estimate
    Vector residuals;   // y - eta(theta)
    double sse = 0.0;   // S(theta)
    double s2 = 0.0;    // S(theta) / (n - k)
    Matrix covariance;  // s2 * (V'V)^-1, empty when unavailable
    Matrix correlation;
    Vector std_errors;
    bool covariance_ok = false;
    bool converged = false;
    int iterations = 0;

    int n() const { return static_cast<int>(residuals.size()); }
    int k() const { return static_cast<int>(theta.size()); }
};

struct ConditionalFit {
    int index = 0;       // fixed-parameter index (0-based)
    double theta_i = 0;  // fixed value
    Vector theta_minus;  // conditional estimate of the remaining parameters
    double sse = 0.0;
    bool converged = false;
};

struct LmOptions {
    int max_iterations = 200;
    double sse_rel_tol = 1e-10;
    double step_tol = 1e-8;       // relative to 1 + |theta|
    double gradient_tol = 1e-9;   // |J'r| relative to 1 + sse
};

/// Damped Gauss-Newton (Levenberg-Marquardt) on a generic residual vector.
/// Both the unconditional and the conditional fits run through here.
struct LmProblem {
    std::function<Vector(const Vector&)> residual;
    std::function<Matrix(const Vector&)> jacobian;
};

struct LmOutcome {
    Vector theta;
    double sse = 0.0;
    bool converged = false;
    int iterations = 0;
};

LmOutcome levenberg_marquardt(const LmProblem& problem, const Vector& theta0,
                              const LmOptions& opts = {});

double sum_of_squares(const ModelSpec& model, const Dataset& data, const Vector& theta);

FitResult fit_ls(const ModelSpec& model, const Dataset& data, const Vector& theta0,
                 const LmOptions& opts = {});

ConditionalFit fit_conditional(const ModelSpec& model, const Dataset& data, int index,
                               double theta_i, const Vector& start, const LmOptions& opts = {});

/// One conditional fit per grid value, warm-starting each solve from the
/// previous one. Per-point failures are recorded, not fatal. The optional
/// hint seeds the first solve; without it an unconditional fit is run first.
std::vector<ConditionalFit> profile_trace(const ModelSpec& model, const Dataset& data, int index,
                                          const std::vector<double>& grid,
                                          std::optional<Vector> start_hint = std::nullopt);

enum class SseGridMode { UnconditionalPairs, ConditionalTrace };

/// S over a Cartesian (theta1, theta2) grid (k = 2 only). Entry (i, j)
/// corresponds to (grid1[i], grid2[j]). In conditional-trace mode the
/// evaluation points are the composite conditional pairs
/// (theta1_tilde(grid2[j]), theta2_tilde(grid1[i])).
Matrix sse_grid(const ModelSpec& model, const Dataset& data, const std::vector<double>& grid1,
                const std::vector<double>& grid2, SseGridMode mode);

/// F-based likelihood-region cutoff: S(theta_hat) * (1 + k/(n-k) * F_level(k, n-k)).
double likelihood_region_level(double sse_hat, int n, int k, double level);

struct EllipseDescriptor {
    Vector center;
    Vector semi_axes;  // lengths, descending
    Matrix axes;       // unit axis directions in columns, matching semi_axes
    double level = 0.0;
    double area() const;  // k = 2 only
};

/// Linear-approximation joint confidence region
/// { theta : (theta - theta_hat)' cov^-1 (theta - theta_hat) <= k F_level(k, n-k) }.
EllipseDescriptor confidence_ellipse(const FitResult& fit, double level);

}  // namespace optidesign
