#include "optidesign/search.hpp"

#include "optidesign/zoo.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace optidesign;

namespace {

DesignRegion unit_box(int d) {
    return DesignRegion(Vector::Zero(d), Vector::Ones(d));
}

Vector vec1(double a) {
    Vector v(1);
    v << a;
    return v;
}

Vector vec2(double a, double b) {
    Vector v(2);
    v << a, b;
    return v;
}

}  // namespace

TEST_CASE("grid search contracts") {
    // constant objective: lexicographically first grid point wins
    DesignObjective constant = [](const Vector&) { return 1.0; };
    GridResult g = grid_search(constant, unit_box(2), 5);
    CHECK(g.point(0) == 0.0);
    CHECK(g.point(1) == 0.0);
    CHECK(g.evaluations == 25);

    // concave 1-D objective: grid argmax within one cell of the true max
    DesignObjective bump = [](const Vector& x) { return -(x(0) - 0.643) * (x(0) - 0.643); };
    GridResult b = grid_search(bump, unit_box(1), 101);
    CHECK(std::abs(b.point(0) - 0.643) <= 0.01);

    // guard on total size
    CHECK_THROWS_AS(grid_search(constant, unit_box(4), 100), std::invalid_argument);
}

TEST_CASE("simplex optimizer recovers interior and boundary optima") {
    // quadratic bowl, interior optimum
    Vector target = vec2(0.37, 0.81);
    DesignObjective bowl = [&](const Vector& x) { return -(x - target).squaredNorm(); };
    OptimizeResult r = optimize_design(bowl, vec2(0.5, 0.5), unit_box(2));
    CHECK(r.converged);
    CHECK((r.point - target).norm() <= 1e-4);

    // optimum on the boundary: increasing in x0, point must land on it
    DesignObjective ramp = [](const Vector& x) { return x(0) + 0.1 * x(1); };
    OptimizeResult rb = optimize_design(ramp, vec2(0.2, 0.3), unit_box(2));
    CHECK(rb.point(0) >= 1.0 - 1e-6);
    CHECK(unit_box(2).contains(rb.point));

    // start outside the region is an argument error
    CHECK_THROWS_AS(optimize_design(bowl, vec2(2.0, 0.0), unit_box(2)), std::invalid_argument);
}

TEST_CASE("interior recheck finds a missed higher mode") {
    // two Gaussian modes; the optimizer is started near the lower one
    auto two_modes = [](const Vector& x) {
        double m1 = 0.8 * std::exp(-std::pow((x(0) - 0.2) / 0.05, 2));
        double m2 = 1.0 * std::exp(-std::pow((x(0) - 0.85) / 0.05, 2));
        return m1 + m2;
    };
    DesignObjective f = two_modes;
    OptimizeResult local = optimize_design(f, vec1(0.2), unit_box(1));
    CHECK(std::abs(local.point(0) - 0.2) < 0.01);  // stuck on the low mode

    OptimizeResult better = interior_recheck(f, unit_box(1), local, 41);
    CHECK(std::abs(better.point(0) - 0.85) < 0.01);
    CHECK(better.value > local.value);

    // unimodal objective: recheck confirms the optimizer result
    Vector target = vec1(0.55);
    DesignObjective bowl = [&](const Vector& x) { return -(x - target).squaredNorm(); };
    OptimizeResult opt = optimize_design(bowl, vec1(0.5), unit_box(1));
    OptimizeResult conf = interior_recheck(bowl, unit_box(1), opt, 41);
    CHECK((conf.point - opt.point).norm() == 0.0);

    // equal values: confirmation, not restart
    DesignObjective constant = [](const Vector&) { return 2.0; };
    OptimizeResult c0;
    c0.point = vec1(0.3);
    c0.value = 2.0;
    OptimizeResult conf2 = interior_recheck(constant, unit_box(1), c0, 11);
    CHECK((conf2.point - c0.point).norm() == 0.0);
}

TEST_CASE("michaelis-menten starting designs reproduce the published optima") {
    ZooEntry mm = michaelis_menten();
    Vector theta0 = vec2(1.0, 0.1);

    DesignOutcome d = design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::D);
    REQUIRE(d.support_points.size() == 2);
    CHECK(d.support_points[0](0) == doctest::Approx(1.1).epsilon(1e-6));
    CHECK(std::abs(d.support_points[1](0) - 0.085) <= 0.005);

    DesignOutcome dp = design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::DP);
    CHECK(dp.support_points[0](0) == doctest::Approx(1.1).epsilon(1e-6));
    CHECK(std::abs(dp.support_points[1](0) - 0.056) <= 0.005);

    // monotone improvement and bounds contracts
    for (const DesignOutcome* o : {&d, &dp}) {
        CHECK(o->criterion.logdet >= o->trace.grid_best_value - 1e-12);
        for (const Vector& p : o->support_points) CHECK(mm.default_region.contains(p));
    }
}

TEST_CASE("starting-design argmax does not depend on the conditionally linear parameter") {
    ZooEntry mm = michaelis_menten();
    SearchOptions opts;
    opts.grid_points_per_dim = 40;

    std::vector<double> interior_d, interior_dp;
    for (double t1 : {0.5, 1.0, 10.0, 212.68}) {
        Vector theta0 = vec2(t1, 0.1);
        DesignOutcome d =
            design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::D, opts);
        DesignOutcome dp =
            design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::DP, opts);
        interior_d.push_back(d.support_points[1](0));
        interior_dp.push_back(dp.support_points[1](0));
    }
    for (std::size_t a = 1; a < interior_d.size(); ++a) {
        CHECK(interior_d[a] == doctest::Approx(interior_d[0]).epsilon(1e-5));
        CHECK(interior_dp[a] == doctest::Approx(interior_dp[0]).epsilon(1e-5));
    }
}

TEST_CASE("determinism: identical inputs produce identical outcomes") {
    ZooEntry mm = michaelis_menten();
    Vector theta0 = vec2(1.0, 0.1);
    SearchOptions opts;
    opts.grid_points_per_dim = 30;

    DesignOutcome a = design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::DP, opts);
    DesignOutcome b = design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::DP, opts);
    REQUIRE(a.support_points.size() == b.support_points.size());
    for (std::size_t p = 0; p < a.support_points.size(); ++p)
        CHECK((a.support_points[p] - b.support_points[p]).norm() == 0.0);
    CHECK(a.criterion.logdet == b.criterion.logdet);
}

TEST_CASE("sequential design on the puromycin data") {
    ZooEntry mm = michaelis_menten();
    Dataset data = *mm.fixture;
    FitResult fit = fit_ls(mm.model, data, vec2(205.0, 0.08));

    // the honest global optimum of the augmented determinant sits at the
    // upper concentration bound for both criteria (see the acceptance suite
    // for the comparison against the published interior values)
    DesignOutcome d = design_sequential(mm.model, fit, data, mm.default_region, CriterionKind::D);
    REQUIRE(d.support_points.size() == 1);
    CHECK(mm.default_region.contains(d.support_points[0]));
    CHECK(d.criterion.logdet >= d.trace.grid_best_value - 1e-12);

    // augmenting must beat the base design information
    Matrix Vn = build_jacobian(mm.model, data, fit.theta);
    CHECK(d.criterion.logdet > d_criterion(Vn).logdet);

    DesignOutcome dp = design_sequential(mm.model, fit, data, mm.default_region, CriterionKind::DP);
    CHECK(mm.default_region.contains(dp.support_points[0]));
    CHECK(dp.criterion.criterion == CriterionKind::DP);
}

TEST_CASE("hougen-watson sequential D recommends the published corner") {
    ZooEntry hw = hougen_watson();
    FitResult fit = fit_ls(hw.model, *hw.fixture, hw.default_start);
    SearchOptions opts;
    opts.grid_points_per_dim = 21;

    DesignOutcome d =
        design_sequential(hw.model, fit, *hw.fixture, hw.default_region, CriterionKind::D, opts);
    REQUIRE(d.support_points.size() == 1);
    const Vector& p = d.support_points[0];
    CHECK(p(0) == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(p(1) == doctest::Approx(350.0).epsilon(1e-9));
    CHECK(p(2) == doctest::Approx(30.0).epsilon(1e-9));
}

TEST_CASE("design region validation") {
    CHECK_THROWS_AS(DesignRegion(Vector::Ones(2), Vector::Ones(2)), std::invalid_argument);
    DesignRegion r = unit_box(2);
    CHECK(r.contains(vec2(0.5, 0.5)));
    CHECK(!r.contains(vec2(1.5, 0.5)));
    Vector c = r.clamp(vec2(1.5, -0.2));
    CHECK(c(0) == 1.0);
    CHECK(c(1) == 0.0);
}
