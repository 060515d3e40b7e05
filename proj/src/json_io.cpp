#include "optidesign/json_io.hpp"

namespace optidesign {

namespace {

nlohmann::json vec(const Vector& v) {
    nlohmann::json a = nlohmann::json::array();
    for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
    return a;
}

nlohmann::json lower_triangle(const Matrix& M) {
    nlohmann::json rows = nlohmann::json::array();
    for (int i = 0; i < M.rows(); ++i) {
        nlohmann::json r = nlohmann::json::array();
        for (int j = 0; j <= i; ++j) r.push_back(M(i, j));
        rows.push_back(r);
    }
    return rows;
}

const char* kind_name(CriterionKind k) { return k == CriterionKind::D ? "d" : "dp"; }

}  // namespace

nlohmann::json to_json(const FitResult& fit) {
    nlohmann::json j{{"estimates", vec(fit.theta)},
                     {"sse", fit.sse},
                     {"s2", fit.s2},
                     {"converged", fit.converged},
                     {"iterations", fit.iterations},
                     {"n", fit.n()},
                     {"covariance_available", fit.covariance_ok}};
    if (fit.covariance_ok) {
        j["std_errors"] = vec(fit.std_errors);
        j["correlation_lower"] = lower_triangle(fit.correlation);
    }
    return j;
}

nlohmann::json to_json(const ConditionalFit& cf) {
    return {{"index", cf.index + 1},
            {"theta_i", cf.theta_i},
            {"theta_minus", vec(cf.theta_minus)},
            {"sse", cf.sse},
            {"converged", cf.converged}};
}

nlohmann::json to_json(const CriterionValue& cv) {
    return {{"criterion", kind_name(cv.criterion)},
            {"logdet", cv.logdet},
            {"det", cv.det},
            {"k", cv.k}};
}

nlohmann::json to_json(const EfficiencyReport& er) {
    return {{"d_eff_percent", er.d_eff},
            {"numerator_logdet", er.numerator_logdet},
            {"denominator_logdet", er.denominator_logdet},
            {"mode", er.mode == EfficiencyMode::Literal ? "literal" : "same-matrix"},
            {"k", er.k}};
}

nlohmann::json to_json(const EllipseDescriptor& e) {
    nlohmann::json axes = nlohmann::json::array();
    for (int c = 0; c < e.axes.cols(); ++c) axes.push_back(vec(e.axes.col(c)));
    nlohmann::json j{{"center", vec(e.center)},
                     {"semi_axes", vec(e.semi_axes)},
                     {"axis_directions", axes},
                     {"level", e.level}};
    if (e.center.size() == 2) j["area"] = e.area();
    return j;
}

nlohmann::json to_json(const DesignOutcome& outcome) {
    nlohmann::json pts = nlohmann::json::array();
    for (const Vector& p : outcome.support_points) pts.push_back(vec(p));
    return {{"criterion_kind", kind_name(outcome.kind)},
            {"support_points", pts},
            {"criterion", to_json(outcome.criterion)},
            {"search_trace",
             {{"grid_best", vec(outcome.trace.grid_best)},
              {"grid_best_logdet", outcome.trace.grid_best_value},
              {"optimizer_logdet", outcome.trace.optimizer_value},
              {"optimizer_converged", outcome.trace.optimizer_converged},
              {"optimizer_iterations", outcome.trace.optimizer_iterations},
              {"recheck_improved", outcome.trace.recheck_improved},
              {"final_logdet", outcome.trace.final_value}}}};
}

nlohmann::json to_json(const SimulationReport& report, bool include_per_sim) {
    nlohmann::json sums;
    for (const auto& [name, s] : report.summaries)
        sums[name] = {{"mean", s.mean}, {"median", s.median}, {"q10", s.q10}, {"q90", s.q90}};
    nlohmann::json j{{"label", report.label},
                     {"n_sims", report.per_sim.size()},
                     {"n_failed", report.n_failed},
                     {"k", report.k},
                     {"sigma", report.sigma},
                     {"seed", report.seed},
                     {"summaries", sums}};
    if (include_per_sim) {
        nlohmann::json sims = nlohmann::json::array();
        for (const SimRecord& r : report.per_sim) {
            nlohmann::json s{{"converged", r.converged}};
            if (r.converged) {
                s["std_errors"] = vec(r.std_errors);
                s["correlation_lower"] = lower_triangle(r.correlation);
                s["logdet_vtv"] = r.logdet_vtv;
            }
            sims.push_back(s);
        }
        j["per_sim"] = sims;
    }
    return j;
}

nlohmann::json to_json(const PairedComparison& cmp) {
    nlohmann::json corr;
    for (int i = 0; i < cmp.corr_win_fraction.rows(); ++i)
        for (int j = i + 1; j < cmp.corr_win_fraction.cols(); ++j)
            corr["corr_" + std::to_string(i + 1) + "_" + std::to_string(j + 1)] =
                cmp.corr_win_fraction(i, j);
    return {{"se_win_fraction", vec(cmp.se_win_fraction)},
            {"corr_abs_win_fraction", corr},
            {"mean_d_efficiency_percent", cmp.mean_d_efficiency},
            {"n_compared", cmp.n_compared}};
}

}  // namespace optidesign
