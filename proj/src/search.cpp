#include "optidesign/search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace optidesign {

Vector DesignRegion::clamp(const Vector& x) const {
    require(x.size() == dims(), "DesignRegion::clamp: dimension mismatch");
    return x.cwiseMax(lower).cwiseMin(upper);
}

bool DesignRegion::contains(const Vector& x, double tol) const {
    if (x.size() != dims()) return false;
    return ((x.array() >= lower.array() - tol) && (x.array() <= upper.array() + tol)).all();
}

DesignRegion DesignRegion::repeated(int count) const {
    require(count >= 1, "DesignRegion::repeated: count must be >= 1");
    Vector lo(dims() * count), hi(dims() * count);
    for (int c = 0; c < count; ++c) {
        lo.segment(c * dims(), dims()) = lower;
        hi.segment(c * dims(), dims()) = upper;
    }
    return DesignRegion(lo, hi);
}

GridResult grid_search(const DesignObjective& objective, const DesignRegion& region,
                       int points_per_dim) {
    require(points_per_dim >= 2, "grid_search: need at least 2 points per dimension");
    const int d = region.dims();
    double total = std::pow(static_cast<double>(points_per_dim), d);
    require(total <= 1e6, "grid_search: grid size exceeds the 1e6 guard");

    GridResult best;
    best.value = -std::numeric_limits<double>::infinity();

    std::vector<int> idx(d, 0);
    Vector x(d);
    bool done = false;
    while (!done) {
        for (int a = 0; a < d; ++a) {
            double t = static_cast<double>(idx[a]) / (points_per_dim - 1);
            x(a) = region.lower(a) + t * (region.upper(a) - region.lower(a));
        }
        double v = objective(x);
        ++best.evaluations;
        // lexicographic iteration order + strict improvement = smallest
        // candidate wins ties
        if (v > best.value) {
            best.value = v;
            best.point = x;
        }
        // advance the odometer, last coordinate fastest
        int a = d - 1;
        while (a >= 0 && ++idx[a] == points_per_dim) {
            idx[a] = 0;
            --a;
        }
        done = (a < 0);
    }
    return best;
}

namespace {

struct PenalizedObjective {
    const DesignObjective& f;
    const DesignRegion& region;
    double weight;

    // maximize f(clamp(x)) minus a quadratic penalty on the excursion
    double operator()(const Vector& x) const {
        Vector c = region.clamp(x);
        double pen = weight * (x - c).squaredNorm();
        return f(c) - pen;
    }
};

double simplex_diameter(const std::vector<Vector>& pts) {
    double d = 0.0;
    for (std::size_t a = 0; a + 1 < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b)
            d = std::max(d, (pts[a] - pts[b]).norm());
    return d;
}

}  // namespace

OptimizeResult optimize_design(const DesignObjective& objective, const Vector& start,
                               const DesignRegion& region, const NelderMeadOptions& opts) {
    require(region.contains(start, 1e-12), "optimize_design: start outside region");
    const int d = region.dims();

    Vector widths = region.upper - region.lower;
    double fscale = std::max(1.0, std::abs(objective(region.clamp(start))));
    PenalizedObjective pf{objective, region, 1e6 * fscale / widths.squaredNorm()};

    // simplex vertices: start plus 5% of the box width along each axis
    std::vector<Vector> pts(d + 1, start);
    for (int a = 0; a < d; ++a) {
        double step = 0.05 * widths(a);
        if (start(a) + step > region.upper(a)) step = -step;
        pts[a + 1](a) += step;
    }
    std::vector<double> fv(d + 1);
    for (int a = 0; a <= d; ++a) fv[a] = pf(pts[a]);

    // track the best clamped point ever evaluated so boundary optima are
    // returned exactly
    OptimizeResult best;
    best.value = -std::numeric_limits<double>::infinity();
    auto consider = [&](const Vector& x, double fpen) {
        if (fpen > best.value) {
            Vector c = region.clamp(x);
            double v = objective(c);
            if (v >= best.value) {
                best.value = v;
                best.point = c;
            }
        }
    };
    for (int a = 0; a <= d; ++a) consider(pts[a], fv[a]);

    std::vector<int> order(d + 1);
    int it = 0;
    for (; it < opts.max_iterations; ++it) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fv[a] > fv[b]; });
        {
            std::vector<Vector> p2(d + 1);
            std::vector<double> f2(d + 1);
            for (int a = 0; a <= d; ++a) {
                p2[a] = pts[order[a]];
                f2[a] = fv[order[a]];
            }
            pts.swap(p2);
            fv.swap(f2);
        }

        if (simplex_diameter(pts) <= opts.diameter_tol * (1.0 + pts[0].norm())) {
            ++it;
            break;
        }

        Vector centroid = Vector::Zero(d);
        for (int a = 0; a < d; ++a) centroid += pts[a];
        centroid /= d;

        const Vector& worst = pts[d];
        Vector xr = centroid + opts.reflection * (centroid - worst);
        double fr = pf(xr);
        consider(xr, fr);

        if (fr > fv[0]) {
            Vector xe = centroid + opts.expansion * (xr - centroid);
            double fe = pf(xe);
            consider(xe, fe);
            if (fe > fr) {
                pts[d] = xe;
                fv[d] = fe;
            } else {
                pts[d] = xr;
                fv[d] = fr;
            }
        } else if (fr > fv[d - 1]) {
            pts[d] = xr;
            fv[d] = fr;
        } else {
            bool outside = fr > fv[d];
            Vector xc = outside ? centroid + opts.contraction * (xr - centroid)
                                : centroid + opts.contraction * (worst - centroid);
            double fc = pf(xc);
            consider(xc, fc);
            if (fc > (outside ? fr : fv[d])) {
                pts[d] = xc;
                fv[d] = fc;
            } else {
                for (int a = 1; a <= d; ++a) {
                    pts[a] = pts[0] + opts.shrink * (pts[a] - pts[0]);
                    fv[a] = pf(pts[a]);
                    consider(pts[a], fv[a]);
                }
            }
        }
    }

    best.converged = it < opts.max_iterations;
    best.iterations = it;
    return best;
}

OptimizeResult interior_recheck(const DesignObjective& objective, const DesignRegion& region,
                                const OptimizeResult& current, int points_per_dim,
                                const NelderMeadOptions& opts) {
    GridResult g = grid_search(objective, region, points_per_dim);
    double margin = 1e-9 * (1.0 + std::abs(current.value));
    if (g.value > current.value + margin) {
        OptimizeResult improved = optimize_design(objective, g.point, region, opts);
        if (improved.value >= g.value) return improved;
        OptimizeResult out;
        out.point = g.point;
        out.value = g.value;
        out.converged = improved.converged;
        out.iterations = improved.iterations;
        return out;
    }
    return current;
}

namespace {

DesignOutcome run_search(const DesignObjective& objective, const DesignRegion& region,
                         CriterionKind kind, int m, const SearchOptions& opts) {
    GridResult grid = grid_search(objective, region, opts.grid_points_per_dim);
    OptimizeResult local = optimize_design(objective, grid.point, region, opts.simplex);
    if (local.value < grid.value) {
        local.point = grid.point;
        local.value = grid.value;
    }
    // second, shifted grid pass over the interior to catch missed modes
    OptimizeResult final_res = interior_recheck(objective, region, local,
                                                opts.grid_points_per_dim + 7, opts.simplex);

    DesignOutcome out;
    out.kind = kind;
    const int n_support = static_cast<int>(final_res.point.size()) / m;
    out.support_points.reserve(n_support);
    for (int c = 0; c < n_support; ++c)
        out.support_points.push_back(final_res.point.segment(c * m, m));
    // canonical order: descending lexicographic, replication-invariant
    std::sort(out.support_points.begin(), out.support_points.end(),
              [](const Vector& a, const Vector& b) {
                  for (int i = 0; i < a.size(); ++i)
                      if (a(i) != b(i)) return a(i) > b(i);
                  return false;
              });

    out.trace.grid_best = grid.point;
    out.trace.grid_best_value = grid.value;
    out.trace.optimizer_value = local.value;
    out.trace.optimizer_converged = local.converged;
    out.trace.optimizer_iterations = local.iterations;
    out.trace.recheck_improved = final_res.value > local.value;
    out.trace.final_value = final_res.value;
    return out;
}

}  // namespace

DesignOutcome design_initial(const ModelSpec& model, const Vector& theta0, int n_support,
                             const DesignRegion& region, CriterionKind kind,
                             const SearchOptions& opts) {
    require(theta0.size() == model.k, "design_initial: theta0 dimension mismatch");
    require(region.dims() == model.m, "design_initial: region dimension mismatch");
    require(n_support >= 1, "design_initial: need at least one support point");

    DesignRegion joint = region.repeated(n_support);
    const int m = model.m;

    DesignObjective objective = [&model, &theta0, n_support, m, kind](const Vector& z) -> double {
        Matrix X(n_support, m);
        for (int c = 0; c < n_support; ++c) X.row(c) = z.segment(c * m, m).transpose();
        try {
            if (kind == CriterionKind::D) {
                Dataset d{X, std::nullopt};
                return d_criterion(build_jacobian(model, d, theta0)).logdet;
            }
            SensitivityBundle s =
                profile_matrix_with_residuals(model, X, theta0, Vector::Zero(n_support));
            return dp_criterion(s.P).logdet;
        } catch (const SingularityError&) {
            return -std::numeric_limits<double>::infinity();
        } catch (const EvaluationError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    DesignOutcome out = run_search(objective, joint, kind, m, opts);

    Matrix X(n_support, m);
    for (int c = 0; c < n_support; ++c) X.row(c) = out.support_points[c].transpose();
    if (kind == CriterionKind::D) {
        Dataset d{X, std::nullopt};
        out.criterion = d_criterion(build_jacobian(model, d, theta0));
    } else {
        out.criterion = dp_criterion(
            profile_matrix_with_residuals(model, X, theta0, Vector::Zero(n_support)).P);
    }
    return out;
}

DesignOutcome design_sequential(const ModelSpec& model, const FitResult& fit, const Dataset& data,
                                const DesignRegion& region, CriterionKind kind,
                                const SearchOptions& opts) {
    require(fit.converged, "design_sequential: base fit did not converge");
    require(region.dims() == model.m, "design_sequential: region dimension mismatch");
    require(fit.theta.size() == model.k, "design_sequential: fit dimension mismatch");
    data.validate();

    const Vector& theta = fit.theta;
    Matrix Vn = build_jacobian(model, data, theta);
    Vector e_aug(data.n() + 1);
    e_aug.head(data.n()) = fit.residuals;
    e_aug(data.n()) = 0.0;  // expected residual of the unobserved candidate

    DesignObjective objective = [&, kind](const Vector& x) -> double {
        try {
            if (kind == CriterionKind::D) {
                Matrix V = augment(Vn, eval_jacobian_row(model, x, theta));
                return d_criterion(V).logdet;
            }
            Matrix X = Matrix(data.n() + 1, model.m);
            X.topRows(data.n()) = data.X;
            X.row(data.n()) = x.transpose();
            SensitivityBundle s = profile_matrix_with_residuals(model, X, theta, e_aug);
            return dp_criterion(s.P).logdet;
        } catch (const SingularityError&) {
            return -std::numeric_limits<double>::infinity();
        } catch (const EvaluationError&) {
            return -std::numeric_limits<double>::infinity();
        }
    };

    DesignOutcome out = run_search(objective, region, kind, model.m, opts);

    const Vector& xbest = out.support_points.front();
    if (kind == CriterionKind::D) {
        out.criterion = d_criterion(augment(Vn, eval_jacobian_row(model, xbest, theta)));
    } else {
        Matrix X = Matrix(data.n() + 1, model.m);
        X.topRows(data.n()) = data.X;
        X.row(data.n()) = xbest.transpose();
        out.criterion = dp_criterion(profile_matrix_with_residuals(model, X, theta, e_aug).P);
    }
    return out;
}

}  // namespace optidesign
