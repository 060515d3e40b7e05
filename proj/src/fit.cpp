#include "optidesign/fit.hpp"

#include <boost/math/distributions/fisher_f.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace optidesign {

LmOutcome levenberg_marquardt(const LmProblem& problem, const Vector& theta0,
                              const LmOptions& opts) {
    Vector theta = theta0;
    Vector r = problem.residual(theta);
    double sse = r.squaredNorm();
    double mu = 1e-3;
    const double mu_min = 1e-14, mu_max = 1e14;

    LmOutcome out;
    out.iterations = 0;
    int plateau = 0;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        out.iterations = it;
        Matrix J = problem.jacobian(theta);
        Matrix JtJ = J.transpose() * J;
        Vector g = J.transpose() * r;

        // primary exit: stationarity of the normal equations
        if (g.norm() <= opts.gradient_tol * (1.0 + sse)) {
            out.converged = true;
            break;
        }

        // Marquardt scaling keeps the step sane when parameters differ by
        // orders of magnitude.
        Vector d = JtJ.diagonal().cwiseMax(1e-30);

        bool stepped = false;
        for (int tries = 0; tries < 40; ++tries) {
            Matrix A = JtJ + mu * Matrix(d.asDiagonal());
            Eigen::LDLT<Matrix> ldlt(A);
            if (ldlt.info() != Eigen::Success) {
                mu = std::min(mu * 10.0, mu_max);
                continue;
            }
            Vector step = ldlt.solve(-g);
            Vector theta_new = theta + step;
            Vector r_new;
            try {
                r_new = problem.residual(theta_new);
            } catch (const EvaluationError&) {
                mu = std::min(mu * 10.0, mu_max);
                continue;
            }
            double new_sse = r_new.squaredNorm();
            if (std::isfinite(new_sse) && new_sse <= sse) {
                double step_norm = step.norm();
                double sse_drop = sse - new_sse;
                double old_sse = sse;
                theta = std::move(theta_new);
                r = std::move(r_new);
                sse = new_sse;
                mu = std::max(mu * 0.25, mu_min);
                stepped = true;
                // secondary exits: a genuinely tiny step, or a sustained
                // relative-change plateau (two accepted steps in a row)
                if (step_norm <= opts.step_tol * (1.0 + theta.norm())) {
                    out.converged = true;
                } else if (sse_drop <= opts.sse_rel_tol * (1.0 + old_sse)) {
                    // several near-Gauss-Newton steps give the gradient exit
                    // above a chance to fire first
                    if (++plateau >= 4) out.converged = true;
                } else {
                    plateau = 0;
                }
                break;
            }
            mu = std::min(mu * 10.0, mu_max);
        }
        if (!stepped) {
            // damping saturated without an acceptable step; stationary only
            // if the gradient agrees at a looser scale
            out.converged = g.norm() <= 1e-6 * (1.0 + sse);
            break;
        }
        if (out.converged) break;
    }
    out.theta = theta;
    out.sse = sse;
    return out;
}

double sum_of_squares(const ModelSpec& model, const Dataset& data, const Vector& theta) {
    require(data.has_y(), "sum_of_squares: dataset has no observed responses");
    Vector eta = eval_predictions(model, data, theta);
    return (*data.y - eta).squaredNorm();
}

namespace {

LmProblem make_full_problem(const ModelSpec& model, const Dataset& data) {
    return LmProblem{
        [&model, &data](const Vector& theta) -> Vector {
            return *data.y - eval_predictions(model, data, theta);
        },
        [&model, &data](const Vector& theta) -> Matrix {
            return -build_jacobian(model, data, theta);
        }};
}

}  // namespace

FitResult fit_ls(const ModelSpec& model, const Dataset& data, const Vector& theta0,
                 const LmOptions& opts) {
    require(data.has_y(), "fit_ls: dataset has no observed responses");
    require(data.n() > model.k, "fit_ls: need n > k");
    require(theta0.size() == model.k, "fit_ls: theta0 dimension mismatch");
    data.validate();

    LmOutcome lm = levenberg_marquardt(make_full_problem(model, data), theta0, opts);
    if (!lm.converged) {
        std::ostringstream os;
        os << "fit_ls: no convergence after " << lm.iterations << " iterations (model '"
           << model.name << "', sse=" << lm.sse << ", theta=[" << lm.theta.transpose() << "])";
        throw ConvergenceError(os.str());
    }

    FitResult fit;
    fit.theta = lm.theta;
    fit.converged = lm.converged;
    fit.iterations = lm.iterations;
    fit.residuals = *data.y - eval_predictions(model, data, fit.theta);
    fit.sse = fit.residuals.squaredNorm();
    fit.s2 = fit.sse / static_cast<double>(data.n() - model.k);

    Matrix V = build_jacobian(model, data, fit.theta);
    Matrix VtV = V.transpose() * V;
    Eigen::FullPivLU<Matrix> lu(VtV);
    if (lu.isInvertible()) {
        fit.covariance = fit.s2 * lu.inverse();
        fit.std_errors = fit.covariance.diagonal().cwiseSqrt();
        Vector dinv = fit.std_errors.cwiseInverse();
        fit.correlation = dinv.asDiagonal() * fit.covariance * dinv.asDiagonal();
        fit.correlation.diagonal().setOnes();
        fit.covariance_ok = true;
    } else {
        // estimates are still returned; covariance flagged unavailable
        fit.covariance_ok = false;
    }
    return fit;
}

ConditionalFit fit_conditional(const ModelSpec& model, const Dataset& data, int index,
                               double theta_i, const Vector& start, const LmOptions& opts) {
    require(data.has_y(), "fit_conditional: dataset has no observed responses");
    require(index >= 0 && index < model.k, "fit_conditional: index out of range");
    require(start.size() == model.k - 1, "fit_conditional: start dimension mismatch");
    ParamPartition part(model.k, index);

    ConditionalFit cf;
    cf.index = index;
    cf.theta_i = theta_i;
    if (model.k == 1) {
        cf.theta_minus = Vector(0);
        cf.sse = sum_of_squares(model, data, part.merge(theta_i, cf.theta_minus));
        cf.converged = true;
        return cf;
    }

    LmProblem reduced{
        [&](const Vector& tm) -> Vector {
            return *data.y - eval_predictions(model, data, part.merge(theta_i, tm));
        },
        [&](const Vector& tm) -> Matrix {
            Matrix V = build_jacobian(model, data, part.merge(theta_i, tm));
            Matrix Vm(V.rows(), model.k - 1);
            int at = 0;
            for (int a = 0; a < model.k; ++a)
                if (a != index) Vm.col(at++) = V.col(a);
            return -Vm;
        }};
    LmOutcome lm = levenberg_marquardt(reduced, start, opts);
    cf.theta_minus = lm.theta;
    cf.sse = lm.sse;
    cf.converged = lm.converged;
    return cf;
}

std::vector<ConditionalFit> profile_trace(const ModelSpec& model, const Dataset& data, int index,
                                          const std::vector<double>& grid,
                                          std::optional<Vector> start_hint) {
    require(!grid.empty(), "profile_trace: empty grid");
    std::vector<ConditionalFit> trace;
    trace.reserve(grid.size());

    Vector start(model.k - 1);
    if (start_hint) {
        require(start_hint->size() == model.k - 1, "profile_trace: start hint dimension mismatch");
        start = *start_hint;
    } else {
        // no hint: seed the first conditional solve from an unconditional fit
        Vector ones = Vector::Ones(model.k);
        try {
            FitResult f = fit_ls(model, data, ones);
            ParamPartition part(model.k, index);
            start = part.split(f.theta).second;
        } catch (const std::exception&) {
            start.setOnes();
        }
    }

    for (double ti : grid) {
        try {
            ConditionalFit cf = fit_conditional(model, data, index, ti, start);
            if (cf.converged && cf.theta_minus.size() > 0) start = cf.theta_minus;
            trace.push_back(std::move(cf));
        } catch (const std::exception&) {
            ConditionalFit failed;
            failed.index = index;
            failed.theta_i = ti;
            failed.theta_minus = start;
            failed.sse = std::numeric_limits<double>::quiet_NaN();
            failed.converged = false;
            trace.push_back(std::move(failed));
        }
    }
    return trace;
}

Matrix sse_grid(const ModelSpec& model, const Dataset& data, const std::vector<double>& grid1,
                const std::vector<double>& grid2, SseGridMode mode) {
    require(model.k == 2, "sse_grid: contour mode supports k = 2 only");
    require(data.has_y(), "sse_grid: dataset has no observed responses");
    require(!grid1.empty() && !grid2.empty(), "sse_grid: empty grid");

    Matrix S(grid1.size(), grid2.size());
    if (mode == SseGridMode::UnconditionalPairs) {
        Vector theta(2);
        for (std::size_t i = 0; i < grid1.size(); ++i)
            for (std::size_t j = 0; j < grid2.size(); ++j) {
                theta << grid1[i], grid2[j];
                S(i, j) = sum_of_squares(model, data, theta);
            }
        return S;
    }

    // conditional-trace mode: evaluate at the composite conditional pairs
    // (theta1_tilde(grid2[j]), theta2_tilde(grid1[i])); traces are seeded
    // from the best cell of the unconditional grid
    Vector seed(2);
    {
        double best = std::numeric_limits<double>::infinity();
        Vector theta(2);
        for (double t1v : grid1)
            for (double t2v : grid2) {
                theta << t1v, t2v;
                double s = sum_of_squares(model, data, theta);
                if (s < best) {
                    best = s;
                    seed = theta;
                }
            }
    }
    Vector hint1(1), hint2(1);
    hint1 << seed(0);
    hint2 << seed(1);
    std::vector<ConditionalFit> t1 = profile_trace(model, data, 1, grid2, hint1);  // theta1~(theta2)
    std::vector<ConditionalFit> t2 = profile_trace(model, data, 0, grid1, hint2);  // theta2~(theta1)
    Vector theta(2);
    for (std::size_t i = 0; i < grid1.size(); ++i)
        for (std::size_t j = 0; j < grid2.size(); ++j) {
            theta << t1[j].theta_minus(0), t2[i].theta_minus(0);
            S(i, j) = sum_of_squares(model, data, theta);
        }
    return S;
}

double likelihood_region_level(double sse_hat, int n, int k, double level) {
    require(n > k, "likelihood_region_level: need n > k");
    require(level > 0.0 && level < 1.0, "likelihood_region_level: level in (0,1)");
    boost::math::fisher_f_distribution<double> F(k, n - k);
    double q = boost::math::quantile(F, level);
    return sse_hat * (1.0 + static_cast<double>(k) / (n - k) * q);
}

double EllipseDescriptor::area() const {
    require(semi_axes.size() == 2, "EllipseDescriptor::area: defined for k = 2");
    return M_PI * semi_axes(0) * semi_axes(1);
}

EllipseDescriptor confidence_ellipse(const FitResult& fit, double level) {
    require(fit.covariance_ok, "confidence_ellipse: covariance unavailable");
    require(level > 0.0 && level < 1.0, "confidence_ellipse: level in (0,1)");
    const int k = fit.k();
    const int n = fit.n();
    require(n > k, "confidence_ellipse: need n > k");

    Eigen::SelfAdjointEigenSolver<Matrix> eig(fit.covariance);
    if (eig.eigenvalues().minCoeff() <= 0.0)
        throw SingularityError("confidence_ellipse: singular covariance");

    boost::math::fisher_f_distribution<double> F(k, n - k);
    double scale = k * boost::math::quantile(F, level);

    EllipseDescriptor e;
    e.center = fit.theta;
    e.level = level;
    // eigenvalues ascending; flip to descending
    e.semi_axes = Vector(k);
    e.axes = Matrix(k, k);
    for (int a = 0; a < k; ++a) {
        e.semi_axes(a) = std::sqrt(scale * eig.eigenvalues()(k - 1 - a));
        e.axes.col(a) = eig.eigenvectors().col(k - 1 - a);
    }
    return e;
}

}  // namespace optidesign
