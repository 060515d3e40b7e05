// Acceptance suite: runs every published-result criterion end to end and
// prints one pass/fail line per criterion. Exit status is the number of
// failed criteria. Known irreproducible published values are asserted as
// stated and allowed to fail loudly; see README "Known deviations".

#include "optidesign/csv.hpp"
#include "optidesign/rng.hpp"
#include "optidesign/simulate.hpp"
#include "optidesign/zoo.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

using namespace optidesign;

namespace {

struct CriterionResult {
    int id = 0;
    std::string title;
    bool pass = false;
    bool skipped = false;
    bool converted = false;
    double seconds = 0.0;
    std::vector<std::string> details;
};

struct Suite {
    std::vector<CriterionResult> results;

    CriterionResult& run(int id, const std::string& title,
                         const std::function<void(CriterionResult&)>& body) {
        CriterionResult r;
        r.id = id;
        r.title = title;
        r.pass = true;
        auto t0 = std::chrono::steady_clock::now();
        try {
            body(r);
        } catch (const std::exception& err) {
            r.pass = false;
            r.details.push_back(std::string("exception: ") + err.what());
        }
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        results.push_back(std::move(r));
        return results.back();
    }
};

std::string fmt(double v, int prec = 5) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    return buf;
}

void check(CriterionResult& r, bool ok, const std::string& what) {
    if (!ok) {
        r.pass = false;
        r.details.push_back("FAILED: " + what);
    }
}

void note(CriterionResult& r, const std::string& what) { r.details.push_back(what); }

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

Vector vec3(double a, double b, double c) {
    Vector v(3);
    v << a, b, c;
    return v;
}

Dataset design_1d(const std::vector<double>& xs) {
    Dataset d;
    d.X.resize(static_cast<int>(xs.size()), 1);
    for (std::size_t j = 0; j < xs.size(); ++j) d.X(static_cast<int>(j), 0) = xs[j];
    return d;
}

double design_correlation(const ModelSpec& model, const Dataset& d, const Vector& theta) {
    Matrix V = build_jacobian(model, d, theta);
    Matrix cov = (V.transpose() * V).inverse();
    return cov(0, 1) / std::sqrt(cov(0, 0) * cov(1, 1));
}

// ---------------------------------------------------------------------------

void criterion_1_puromycin_fit(CriterionResult& r) {
    ZooEntry mm = michaelis_menten();
    FitResult fit = fit_ls(mm.model, *mm.fixture, vec2(205.0, 0.08));
    note(r, "theta = (" + fmt(fit.theta(0), 6) + ", " + fmt(fit.theta(1), 5) + ")");
    check(r, fit.converged, "fit converged");
    check(r, std::abs(fit.theta(0) - 212.68) <= 0.5, "theta1 within 212.68 +- 0.5");
    check(r, std::abs(fit.theta(1) - 0.064) <= 0.001, "theta2 within 0.064 +- 0.001");
}

void criterion_2_hougen_watson_fit(CriterionResult& r) {
    ZooEntry hw = hougen_watson();  // validation happens on load
    FitResult fit = fit_ls(hw.model, *hw.fixture, hw.default_start);

    const double est[4] = {35.92, 0.071, 0.038, 0.167};
    const int est_dec[4] = {2, 3, 3, 3};
    const double se[4] = {8.21, 0.178, 0.099, 0.415};
    const int se_dec[4] = {2, 3, 3, 3};
    for (int a = 0; a < 4; ++a) {
        check(r, matches_printed(fit.theta(a), est[a], est_dec[a]),
              "estimate " + std::to_string(a + 1) + " = " + fmt(fit.theta(a), 6) + " vs " +
                  fmt(est[a], 4));
        check(r, matches_printed(fit.std_errors(a), se[a], se_dec[a]),
              "std error " + std::to_string(a + 1) + " = " + fmt(fit.std_errors(a), 6) + " vs " +
                  fmt(se[a], 4));
    }
    const double corr[6] = {-0.805, -0.840, 0.998, -0.790, 0.998, 0.995};
    int c = 0;
    for (int i = 1; i < 4; ++i)
        for (int j = 0; j < i; ++j, ++c)
            check(r, std::abs(fit.correlation(i, j) - corr[c]) <= 0.005,
                  "corr(" + std::to_string(i + 1) + "," + std::to_string(j + 1) + ") = " +
                      fmt(fit.correlation(i, j), 5) + " vs " + fmt(corr[c], 4));
    note(r, "estimates (" + fmt(fit.theta(0), 6) + ", " + fmt(fit.theta(1), 4) + ", " +
                fmt(fit.theta(2), 4) + ", " + fmt(fit.theta(3), 4) + "), se (" +
                fmt(fit.std_errors(0), 5) + ", " + fmt(fit.std_errors(1), 4) + ", " +
                fmt(fit.std_errors(2), 4) + ", " + fmt(fit.std_errors(3), 4) + ")");
}

void criterion_3_starting_designs(CriterionResult& r) {
    ZooEntry mm = michaelis_menten();
    Vector theta0 = vec2(1.0, 0.1);

    DesignOutcome d = design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::D);
    note(r, "D-optimal support: {" + fmt(d.support_points[0](0), 6) + ", " +
                fmt(d.support_points[1](0), 6) + "}");
    check(r, std::abs(d.support_points[0](0) - 1.1) <= 1e-6, "D boundary point at 1.1");
    check(r, std::abs(d.support_points[1](0) - 0.085) <= 0.005, "D interior point 0.085 +- 0.005");

    DesignOutcome dp = design_initial(mm.model, theta0, 2, mm.default_region, CriterionKind::DP);
    note(r, "DP-optimal support: {" + fmt(dp.support_points[0](0), 6) + ", " +
                fmt(dp.support_points[1](0), 6) + "}");
    check(r, std::abs(dp.support_points[0](0) - 1.1) <= 1e-6, "DP boundary point at 1.1");
    check(r, std::abs(dp.support_points[1](0) - 0.056) <= 0.005,
          "DP interior point 0.056 +- 0.005");
}

void criterion_4_sequential_designs(CriterionResult& r) {
    ZooEntry mm = michaelis_menten();
    Dataset data = *mm.fixture;
    FitResult fit = fit_ls(mm.model, data, vec2(205.0, 0.08));

    DesignOutcome d = design_sequential(mm.model, fit, data, mm.default_region, CriterionKind::D);
    double xd = d.support_points[0](0);
    note(r, "MM 13th point, D: got " + fmt(xd, 6) + " (published 0.0747)");
    check(r, std::abs(xd - 0.0747) <= 0.003, "MM 13th point (D) = 0.0747 +- 0.003");

    DesignOutcome dp = design_sequential(mm.model, fit, data, mm.default_region, CriterionKind::DP);
    double xdp = dp.support_points[0](0);
    note(r, "MM 13th point, DP: got " + fmt(xdp, 6) + " (published 0.05116)");
    check(r, std::abs(xdp - 0.05116) <= 0.003, "MM 13th point (DP) = 0.05116 +- 0.003");

    ZooEntry hw = hougen_watson();
    FitResult hw_fit = fit_ls(hw.model, *hw.fixture, hw.default_start);
    SearchOptions hw_opts;
    hw_opts.grid_points_per_dim = 21;

    DesignOutcome hd = design_sequential(hw.model, hw_fit, *hw.fixture, hw.default_region,
                                         CriterionKind::D, hw_opts);
    const Vector& pd = hd.support_points[0];
    note(r, "HW 25th point, D: got (" + fmt(pd(0), 6) + ", " + fmt(pd(1), 6) + ", " +
                fmt(pd(2), 6) + ")");
    check(r,
          std::abs(pd(0) - 100.0) <= 1e-9 && std::abs(pd(1) - 350.0) <= 1e-9 &&
              std::abs(pd(2) - 30.0) <= 1e-9,
          "HW 25th point (D) exactly the corner (100, 350, 30)");

    DesignOutcome hdp = design_sequential(hw.model, hw_fit, *hw.fixture, hw.default_region,
                                          CriterionKind::DP, hw_opts);
    const Vector& pp = hdp.support_points[0];
    note(r, "HW 25th point, DP: got (" + fmt(pp(0), 6) + ", " + fmt(pp(1), 6) + ", " +
                fmt(pp(2), 6) + ") (published (245, 300, 40))");
    check(r,
          std::abs(pp(0) - 245.0) <= 5.0 && std::abs(pp(1) - 300.0) <= 5.0 &&
              std::abs(pp(2) - 40.0) <= 2.0,
          "HW 25th point (DP) = (245, 300, 40) +- (5, 5, 2)");
    if (!r.pass)
        note(r, "the published interior points are not optima of the stated criterion at the "
                "fitted estimates; see README 'Known deviations'");
}

void criterion_5_defficiency(CriterionResult& r, bool property_suite_passed) {
    ZooEntry mm = michaelis_menten();

    // starting designs at the design-stage parameters, zero residuals
    Vector theta0 = vec2(1.0, 0.1);
    Dataset dd = design_1d({1.1, 0.085});
    Dataset dp = design_1d({1.1, 0.056});

    double ld_v_d = d_criterion(build_jacobian(mm.model, dd, theta0)).logdet;
    double ld_v_dp = d_criterion(build_jacobian(mm.model, dp, theta0)).logdet;
    double ld_p_dp =
        dp_criterion(profile_matrix_with_residuals(mm.model, dp.X, theta0, Vector::Zero(2)).P)
            .logdet;

    EfficiencyReport lit_start = d_efficiency(ld_v_d, ld_p_dp, 2, EfficiencyMode::Literal);
    EfficiencyReport sm_start = d_efficiency(ld_v_dp, ld_v_d, 2, EfficiencyMode::SameMatrix);
    note(r, "starting designs: literal = " + fmt(lit_start.d_eff, 5) +
                "%, same-matrix = " + fmt(sm_start.d_eff, 5) + "% (published 95%)");

    // sequential 13-point designs at theta_hat, observed residuals
    Dataset data = *mm.fixture;
    FitResult fit = fit_ls(mm.model, data, vec2(205.0, 0.08));
    Dataset seq_d = data.with_row(vec1(0.0747), eval_model(mm.model, vec1(0.0747), fit.theta));
    Dataset seq_dp = data.with_row(vec1(0.05116), eval_model(mm.model, vec1(0.05116), fit.theta));
    Vector e_aug(13);
    e_aug.head(12) = fit.residuals;
    e_aug(12) = 0.0;

    double ld_v_seq_d = d_criterion(build_jacobian(mm.model, seq_d, fit.theta)).logdet;
    double ld_v_seq_dp = d_criterion(build_jacobian(mm.model, seq_dp, fit.theta)).logdet;
    double ld_p_seq_dp =
        dp_criterion(profile_matrix_with_residuals(mm.model, seq_dp.X, fit.theta, e_aug).P).logdet;

    EfficiencyReport lit_seq = d_efficiency(ld_v_seq_d, ld_p_seq_dp, 2, EfficiencyMode::Literal);
    EfficiencyReport sm_seq = d_efficiency(ld_v_seq_dp, ld_v_seq_d, 2, EfficiencyMode::SameMatrix);
    note(r, "sequential designs: literal = " + fmt(lit_seq.d_eff, 5) +
                "%, same-matrix = " + fmt(sm_seq.d_eff, 5) + "% (published 98%)");

    bool literal_ok = std::abs(lit_start.d_eff - 95.0) <= 2.0 &&
                      std::abs(lit_seq.d_eff - 98.0) <= 1.5;
    if (literal_ok) {
        note(r, "literal Eq. 15 mode reproduces the published figures");
        return;
    }

    // conversion clause: literal mode cannot reproduce the published values;
    // report both modes and convert to the property suite
    r.converted = true;
    note(r, "literal mode does NOT reproduce the published figures; criterion converts to the "
            "property suite (criterion 9), both modes reported above");
    note(r, std::string("same-matrix starting-design value ") +
                (std::abs(sm_start.d_eff - 95.0) <= 2.0 ? "matches" : "does not match") +
                " the published 95%");
    check(r, property_suite_passed, "property suite green under conversion");
}

void criterion_6_correlation_ordering(CriterionResult& r) {
    ZooEntry mm = michaelis_menten();
    FitResult fit = fit_ls(mm.model, *mm.fixture, vec2(205.0, 0.08));

    double c_orig = design_correlation(mm.model, *mm.fixture, fit.theta);
    double c_d = design_correlation(
        mm.model, design_1d({1.1, 1.1, 1.1, 1.1, 1.1, 1.1, 0.085, 0.085, 0.085, 0.085, 0.085, 0.085}),
        fit.theta);
    double c_dp = design_correlation(
        mm.model, design_1d({1.1, 1.1, 1.1, 1.1, 1.1, 1.1, 0.056, 0.056, 0.056, 0.056, 0.056, 0.056}),
        fit.theta);
    note(r, "correlations at shared estimates: original " + fmt(c_orig, 4) + ", D " +
                fmt(c_d, 4) + ", DP " + fmt(c_dp, 4) + " (published 0.76, 0.68, 0.65)");

    check(r, c_dp < c_d && c_d < c_orig, "ordering DP < D < original");
    check(r, std::abs(c_orig - 0.76) <= 0.02, "original = 0.76 +- 0.02");
    check(r, std::abs(c_d - 0.68) <= 0.02, "D = 0.68 +- 0.02");
    check(r, std::abs(c_dp - 0.65) <= 0.02, "DP = 0.65 +- 0.02");
    if (!r.pass)
        note(r, "no linear-approximation construction reproduces the published 0.65; see README "
                "'Known deviations'");
}

void criterion_7_mm_simulation(CriterionResult& r) {
    ZooEntry mm = michaelis_menten();
    SimulationPlan base;
    base.model = mm.model;
    base.base_dataset = *mm.fixture;
    base.base_fit = fit_ls(mm.model, base.base_dataset, vec2(205.0, 0.08));
    base.n_sims = 2000;

    double baseline = base.base_fit.correlation(0, 1);
    note(r, "12-point baseline correlation " + fmt(baseline, 4) + " (published 0.77)");
    check(r, std::abs(baseline - 0.77) <= 0.01, "baseline correlation 0.77 +- 0.01");

    // common random numbers across the two plans: compare_reports pairs the
    // sims index by index, so both designs must see the same noise draws
    SimulationPlan plan_d = base;
    plan_d.new_point = vec1(0.0747);
    plan_d.seed = 20210;
    plan_d.label = "d";
    SimulationPlan plan_dp = base;
    plan_dp.new_point = vec1(0.05116);
    plan_dp.seed = 20210;
    plan_dp.label = "dp";

    SimulationReport rep_d = run_simulation(plan_d);
    SimulationReport rep_dp = run_simulation(plan_dp);
    double med_d = rep_d.summaries.at("corr_1_2").median;
    double med_dp = rep_dp.summaries.at("corr_1_2").median;
    note(r, "median corr: D " + fmt(med_d, 4) + ", DP " + fmt(med_dp, 4));
    check(r, med_dp < med_d, "median correlation under DP < under D");

    // simulated D-efficiency in the published Eq. 15 order: D-design
    // determinant over DP-design determinant, each at its own estimates
    PairedComparison cmp = compare_reports(rep_d, rep_dp);
    note(r, "mean simulated D-efficiency " + fmt(cmp.mean_d_efficiency, 5) +
                "% (published 97.6%)");
    check(r, std::abs(cmp.mean_d_efficiency - 97.6) <= 2.0,
          "mean simulated D-efficiency 97.6 +- 2 points");
    check(r, rep_d.n_failed == 0 && rep_dp.n_failed == 0, "all refits converged");
}

void criterion_8_hw_simulation(CriterionResult& r) {
    ZooEntry hw = hougen_watson();
    SimulationPlan base;
    base.model = hw.model;
    base.base_dataset = *hw.fixture;
    base.base_fit = fit_ls(hw.model, base.base_dataset, hw.default_start);
    base.n_sims = 2000;

    SimulationPlan plan_d = base;
    plan_d.new_point = vec3(100.0, 350.0, 30.0);
    plan_d.seed = 77001;
    plan_d.label = "d";
    SimulationPlan plan_dp = base;
    plan_dp.new_point = vec3(245.0, 300.0, 40.0);
    plan_dp.seed = 77001;  // paired comparison shares the noise stream
    plan_dp.label = "dp";

    SimulationReport rep_d = run_simulation(plan_d);
    SimulationReport rep_dp = run_simulation(plan_dp);
    PairedComparison cmp = compare_reports(rep_dp, rep_d);  // DP wins counted

    std::ostringstream fr;
    fr << "|corr| win fractions (DP beats D):";
    for (int j = 1; j < 4; ++j) fr << " th1-th" << j + 1 << " " << fmt(cmp.corr_win_fraction(0, j), 3);
    note(r, fr.str());
    for (int j = 1; j < 4; ++j)
        check(r, cmp.corr_win_fraction(0, j) > 0.6,
              "majority (>60%) lower |corr(th1, th" + std::to_string(j + 1) + ")| under DP");

    std::ostringstream se;
    se << "se win fractions (DP beats D):";
    for (int i = 0; i < 4; ++i) se << " th" << i + 1 << " " << fmt(cmp.se_win_fraction(i), 3);
    note(r, se.str());
    for (int i = 0; i < 4; ++i)
        check(r, cmp.se_win_fraction(i) > 0.5,
              "majority of sims with lower se(th" + std::to_string(i + 1) + ") under DP");
    if (!r.pass)
        note(r, "the D design's corner point targets exactly se(th1); the published claim does "
                "not hold for that parameter; see README 'Known deviations'");
}

void criterion_9_property_suite(CriterionResult& r) {
    auto g = SplitMix64(99);
    auto uni = [&g](double lo, double hi) { return lo + (hi - lo) * g.next_unit(); };

    // random instance used across several properties
    const int n = 8, k = 3;
    Matrix V(n, k);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < k; ++b) V(a, b) = uni(-1.5, 1.5);
    SecondDerivs W;
    for (int j = 0; j < n; ++j) {
        Matrix A(k, k);
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) A(a, b) = uni(-0.7, 0.7);
        W.push_back(0.5 * (A + A.transpose()));
    }
    Vector e = Vector::Zero(n);
    for (int j = 0; j < n; ++j) e(j) = 0.4 * uni(-1.0, 1.0);

    // full form reduces to the projection form at e = 0 (1e-10)
    for (int i = 0; i < k; ++i) {
        Vector pf = profile_vector_full(i, V, W, Vector::Zero(n));
        Vector pr = profile_vector_reduced(i, V);
        check(r, (pf - pr).cwiseAbs().maxCoeff() <= 1e-10,
              "full/projection agreement at e = 0, column " + std::to_string(i));
    }

    // projection orthogonality and decomposition (1e-8)
    for (int i = 0; i < k; ++i) {
        Vector p = profile_vector_reduced(i, V);
        for (int j = 0; j < k; ++j) {
            if (j == i) continue;
            check(r, std::abs(p.dot(V.col(j))) <= 1e-8 * p.norm() * V.col(j).norm(),
                  "orthogonality of p_" + std::to_string(i) + " to v_" + std::to_string(j));
        }
        Vector proj = V.col(i) - p;
        check(r, (proj + p - V.col(i)).cwiseAbs().maxCoeff() <= 1e-8, "decomposition identity");
    }

    // element-wise P'P assembly vs direct inner products (1e-10)
    Matrix P(n, k);
    for (int i = 0; i < k; ++i) P.col(i) = profile_vector_full(i, V, W, e);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
            double direct = P.col(i).dot(P.col(j));
            double assembled = ptp_element(i, j, V, W, e);
            check(r,
                  std::abs(assembled - direct) <=
                      1e-10 * (1.0 + std::max(std::abs(assembled), std::abs(direct))),
                  "ptp_element(" + std::to_string(i) + "," + std::to_string(j) + ")");
        }

    // bracket contraction vs brute force (1e-12)
    {
        std::vector<int> rows{0, 2}, cols{1, 2};
        Matrix got = bracket_contract(e, W, rows, cols);
        Matrix want = Matrix::Zero(2, 2);
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < cols.size(); ++b)
                for (int j = 0; j < n; ++j) want(a, b) += e(j) * W[j](rows[a], cols[b]);
        check(r, (got - want).cwiseAbs().maxCoeff() <= 1e-12, "bracket contraction brute force");
    }

    // total-derivative finite-difference oracle for p_i (1e-3 relative)
    {
        ZooEntry mm = michaelis_menten();
        Dataset data = *mm.fixture;
        FitResult fit = fit_ls(mm.model, data, vec2(205.0, 0.08));
        SensitivityBundle b = profile_matrix(mm.model, data, fit.theta, ResidualMode::Observed);
        for (int i = 0; i < 2; ++i) {
            ParamPartition part(2, i);
            double delta = 1e-4 * std::abs(fit.theta(i));
            auto conditional = [&](double ti) {
                ConditionalFit cf = fit_conditional(mm.model, data, i, ti,
                                                    part.split(fit.theta).second,
                                                    LmOptions{400, 1e-14, 1e-12});
                return part.merge(ti, cf.theta_minus);
            };
            Vector tp = conditional(fit.theta(i) + delta);
            Vector tm = conditional(fit.theta(i) - delta);
            for (int j = 0; j < data.n(); ++j) {
                double d = (eval_model(mm.model, data.X.row(j), tp) -
                            eval_model(mm.model, data.X.row(j), tm)) /
                           (2.0 * delta);
                check(r,
                      std::abs(b.P(j, i) - d) <=
                          1e-3 * (1.0 + std::max(std::abs(b.P(j, i)), std::abs(d))),
                      "total-derivative oracle, column " + std::to_string(i) + " row " +
                          std::to_string(j));
            }
        }
    }

    // analytic vs finite-difference derivatives (1e-5 / 1e-4)
    for (const char* name : {"michaelis-menten", "hougen-watson"}) {
        ZooEntry entry = find_model(name);
        Vector ref = entry.reference_fit->estimates;
        for (int probe = 0; probe < 25; ++probe) {
            Vector x(entry.model.m);
            for (int a = 0; a < entry.model.m; ++a)
                x(a) = uni(entry.default_region.lower(a), entry.default_region.upper(a));
            Vector theta(entry.model.k);
            for (int a = 0; a < entry.model.k; ++a) theta(a) = ref(a) * uni(0.5, 1.5);
            Vector ga = eval_jacobian_row(entry.model, x, theta);
            Vector gn = fd_gradient(entry.model.f, x, theta);
            Matrix ha = eval_hessian_point(entry.model, x, theta);
            Matrix hn = fd_hessian(entry.model.f, x, theta);
            bool g_ok = true, h_ok = true;
            for (int a = 0; a < entry.model.k; ++a) {
                g_ok = g_ok && std::abs(ga(a) - gn(a)) <=
                                   1e-5 * (1.0 + std::max(std::abs(ga(a)), std::abs(gn(a))));
                for (int bcol = 0; bcol < entry.model.k; ++bcol)
                    h_ok = h_ok && std::abs(ha(a, bcol) - hn(a, bcol)) <=
                                       1e-4 * (1.0 + std::max(std::abs(ha(a, bcol)),
                                                              std::abs(hn(a, bcol))));
            }
            check(r, g_ok, std::string("gradient FD agreement for ") + name);
            check(r, h_ok, std::string("hessian FD agreement for ") + name);
        }
    }

    // rank-one augment determinant identity (1e-8)
    {
        Vector row = V.row(1).transpose();
        Matrix Vd = augment(V, row);
        Matrix VtV = V.transpose() * V;
        double expected = d_criterion(V).logdet + std::log1p(row.dot(VtV.inverse() * row));
        check(r,
              std::abs(d_criterion(Vd).logdet - expected) <=
                  1e-8 * (1.0 + std::abs(expected)),
              "rank-one augment identity");
    }

    // theta1-argmax invariance on a fixed grid (exact equality)
    {
        ZooEntry mm = michaelis_menten();
        std::vector<double> grid;
        for (int a = 1; a <= 60; ++a) grid.push_back(1.1 * a / 60.0);
        auto argmax_for = [&](double theta1) {
            int best = -1;
            double bv = -1e300;
            for (std::size_t c = 0; c < grid.size(); ++c) {
                Dataset d = design_1d({1.1, grid[c]});
                SensitivityBundle s = profile_matrix_with_residuals(
                    mm.model, d.X, vec2(theta1, 0.1), Vector::Zero(2));
                double v = dp_criterion(s.P).logdet;
                if (v > bv) {
                    bv = v;
                    best = static_cast<int>(c);
                }
            }
            return best;
        };
        int ref_arg = argmax_for(1.0);
        for (double t1 : {0.5, 10.0, 212.68})
            check(r, argmax_for(t1) == ref_arg,
                  "DP argmax free of theta1 (theta1 = " + fmt(t1, 6) + ")");
    }

    // diagonal-reparametrization argmax invariance on a fixed grid (exact)
    {
        ZooEntry mm = michaelis_menten();
        Vector theta0 = vec2(1.0, 0.1);
        Matrix S = vec2(3.0, 0.5).asDiagonal();
        Matrix Sinv = S.inverse();
        int bd = -1, btd = -1, bp = -1, btp = -1;
        double vd = -1e300, vtd = -1e300, vp = -1e300, vtp = -1e300;
        for (int c = 0; c < 40; ++c) {
            Dataset d = design_1d({1.1, 0.01 + c * 0.012});
            Matrix Vc = build_jacobian(mm.model, d, theta0);
            Matrix Vt = Vc * Sinv;
            double a1 = d_criterion(Vc).logdet, a2 = d_criterion(Vt).logdet;
            Matrix Pc(2, 2), Pt(2, 2);
            for (int i = 0; i < 2; ++i) {
                Pc.col(i) = profile_vector_reduced(i, Vc);
                Pt.col(i) = profile_vector_reduced(i, Vt);
            }
            double a3 = dp_criterion(Pc).logdet, a4 = dp_criterion(Pt).logdet;
            if (a1 > vd) { vd = a1; bd = c; }
            if (a2 > vtd) { vtd = a2; btd = c; }
            if (a3 > vp) { vp = a3; bp = c; }
            if (a4 > vtp) { vtp = a4; btp = c; }
        }
        check(r, bd == btd, "D argmax invariant under reparametrization");
        check(r, bp == btp, "DP argmax invariant under diagonal reparametrization");
    }

    // seed determinism of simulations (bit-identical)
    {
        ZooEntry mm = michaelis_menten();
        SimulationPlan plan;
        plan.model = mm.model;
        plan.base_dataset = *mm.fixture;
        plan.base_fit = fit_ls(mm.model, plan.base_dataset, vec2(205.0, 0.08));
        plan.new_point = vec1(0.0747);
        plan.n_sims = 32;
        plan.seed = 4242;
        SimulationReport a = run_simulation(plan);
        SimulationReport b = run_simulation(plan);
        bool identical = a.per_sim.size() == b.per_sim.size();
        for (std::size_t s = 0; identical && s < a.per_sim.size(); ++s) {
            identical = a.per_sim[s].converged == b.per_sim[s].converged &&
                        (a.per_sim[s].std_errors - b.per_sim[s].std_errors).norm() == 0.0 &&
                        a.per_sim[s].logdet_vtv == b.per_sim[s].logdet_vtv;
        }
        check(r, identical, "seed determinism of simulations");
    }
}

}  // namespace

int main() {
    Suite suite;
    bool hw_available = true;
    std::string hw_reason;
    try {
        hougen_watson();
    } catch (const std::exception& err) {
        hw_available = false;
        hw_reason = err.what();
    }

    suite.run(1, "Puromycin fit reproduces the published estimates",
              criterion_1_puromycin_fit);

    if (hw_available) {
        suite.run(2, "Hougen-Watson fixture fit matches the published table",
                  criterion_2_hougen_watson_fit);
    } else {
        CriterionResult r;
        r.id = 2;
        r.title = "Hougen-Watson fixture fit matches the published table";
        r.pass = true;
        r.skipped = true;
        r.details.push_back("SKIPPED: fixture absent (" + hw_reason + ")");
        suite.results.push_back(r);
    }

    suite.run(3, "Starting designs reproduce the published optima",
              criterion_3_starting_designs);

    if (hw_available) {
        suite.run(4, "Sequential designs reproduce the published points",
                  criterion_4_sequential_designs);
    } else {
        suite.run(4, "Sequential designs reproduce the published points (MM only)",
                  [](CriterionResult& r) {
                      ZooEntry mm = michaelis_menten();
                      Dataset data = *mm.fixture;
                      FitResult fit = fit_ls(mm.model, data, vec2(205.0, 0.08));
                      DesignOutcome d = design_sequential(mm.model, fit, data, mm.default_region,
                                                          CriterionKind::D);
                      double xd = d.support_points[0](0);
                      note(r, "MM 13th point, D: got " + fmt(xd, 6));
                      check(r, std::abs(xd - 0.0747) <= 0.003, "MM 13th point (D)");
                      DesignOutcome dp = design_sequential(mm.model, fit, data, mm.default_region,
                                                           CriterionKind::DP);
                      double xdp = dp.support_points[0](0);
                      note(r, "MM 13th point, DP: got " + fmt(xdp, 6));
                      check(r, std::abs(xdp - 0.05116) <= 0.003, "MM 13th point (DP)");
                  });
    }

    // criterion 9 runs before 5 so the conversion clause can consult it
    CriterionResult& c9 = suite.run(9, "Property suite", criterion_9_property_suite);
    bool property_ok = c9.pass;

    suite.run(5, "D-efficiency figures (literal Eq. 15 mode, conversion clause applies)",
              [property_ok](CriterionResult& r) { criterion_5_defficiency(r, property_ok); });

    suite.run(6, "Correlation ordering of the three starting designs",
              criterion_6_correlation_ordering);

    suite.run(7, "Michaelis-Menten simulation study (2000 sims)", criterion_7_mm_simulation);

    if (hw_available) {
        suite.run(8, "Hougen-Watson simulation study (2000 sims)", criterion_8_hw_simulation);
    } else {
        CriterionResult r;
        r.id = 8;
        r.title = "Hougen-Watson simulation study";
        r.pass = true;
        r.skipped = true;
        r.details.push_back("SKIPPED: fixture absent");
        suite.results.push_back(r);
    }

    // runtime limits per criterion
    const double limits[10] = {0, 1.0, 5.0, 20.0, 60.0, 10.0, 10.0, 180.0, 300.0, 120.0};

    std::sort(suite.results.begin(), suite.results.end(),
              [](const CriterionResult& a, const CriterionResult& b) { return a.id < b.id; });

    int failures = 0;
    for (CriterionResult& r : suite.results) {
        if (!r.skipped && r.id < 10 && limits[r.id] > 0 && r.seconds > limits[r.id]) {
            r.pass = false;
            r.details.push_back("FAILED: runtime " + fmt(r.seconds, 3) + "s exceeds " +
                                fmt(limits[r.id], 3) + "s");
        }
        const char* tag = r.skipped ? "SKIP" : (r.pass ? (r.converted ? "CONV" : "PASS") : "FAIL");
        std::printf("[%s] criterion %d: %s (%.2fs)\n", tag, r.id, r.title.c_str(), r.seconds);
        for (const std::string& d : r.details) std::printf("       - %s\n", d.c_str());
        if (!r.pass && !r.skipped) ++failures;
    }
    std::printf("%d of %zu criteria failed\n", failures, suite.results.size());
    return failures;
}
