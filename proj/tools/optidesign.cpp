// Command-line front end: wires CSV datasets and the built-in models into
// fitting, sensitivity, design-search, efficiency, simulation and contour
// operations, emitting JSON/CSV results.

#include "optidesign/csv.hpp"
#include "optidesign/json_io.hpp"
#include "optidesign/zoo.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace od = optidesign;

namespace {

od::Vector parse_vector(const std::string& csv) {
    std::vector<double> vals;
    std::stringstream ss(csv);
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    od::Vector v(vals.size());
    for (std::size_t i = 0; i < vals.size(); ++i) v(i) = vals[i];
    return v;
}

// "lo1:hi1,lo2:hi2,..."
od::DesignRegion parse_region(const std::string& spec) {
    std::vector<double> lo, hi;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ',')) {
        auto colon = tok.find(':');
        if (colon == std::string::npos)
            throw std::invalid_argument("region ranges look like lo:hi, got '" + tok + "'");
        lo.push_back(std::stod(tok.substr(0, colon)));
        hi.push_back(std::stod(tok.substr(colon + 1)));
    }
    od::Vector l(lo.size()), h(hi.size());
    for (std::size_t i = 0; i < lo.size(); ++i) {
        l(i) = lo[i];
        h(i) = hi[i];
    }
    return od::DesignRegion(l, h);
}

// ";"-separated support points, each "c1,c2,..."
std::vector<od::Vector> parse_points(const std::string& spec) {
    std::vector<od::Vector> pts;
    std::stringstream ss(spec);
    std::string tok;
    while (std::getline(ss, tok, ';'))
        if (!tok.empty()) pts.push_back(parse_vector(tok));
    return pts;
}

void emit(const nlohmann::json& j, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream out(out_path);
    if (!out) throw std::invalid_argument("cannot open output file '" + out_path + "'");
    out << j.dump(2) << "\n";
}

std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = lo + (hi - lo) * i / (n - 1);
    return v;
}

od::CriterionKind parse_kind(const std::string& s) {
    if (s == "d") return od::CriterionKind::D;
    if (s == "dp") return od::CriterionKind::DP;
    throw std::invalid_argument("criterion must be 'd' or 'dp'");
}

struct GridSpec {
    double lo = 0, hi = 0;
    int n = 0;
};

GridSpec parse_grid_spec(const std::string& s) {
    GridSpec g;
    std::stringstream ss(s);
    std::string a, b, c;
    if (!std::getline(ss, a, ':') || !std::getline(ss, b, ':') || !std::getline(ss, c, ':'))
        throw std::invalid_argument("grid spec looks like lo:hi:n, got '" + s + "'");
    g.lo = std::stod(a);
    g.hi = std::stod(b);
    g.n = std::stoi(c);
    if (g.n < 2) throw std::invalid_argument("grid spec needs n >= 2");
    return g;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Profile-based D-optimal experimental design for nonlinear regression"};
    app.require_subcommand(1);

    std::string model_name, data_path, out_path, csv_path;
    std::string theta_csv, region_spec, criterion = "d";
    int grid_points = 50;

    // --- fit ---
    auto* fit_cmd = app.add_subcommand("fit", "Nonlinear least-squares fit");
    fit_cmd->add_option("--model", model_name, "model name")->required();
    fit_cmd->add_option("--data", data_path, "dataset CSV")->required();
    fit_cmd->add_option("--theta0", theta_csv, "starting values v1,v2,...");
    fit_cmd->add_option("--out", out_path, "output JSON path (default: stdout)");

    // --- sens ---
    auto* sens_cmd = app.add_subcommand("sens", "Local and profile-based sensitivities");
    std::string sens_theta, residual_mode = "observed";
    sens_cmd->add_option("--model", model_name, "model name")->required();
    sens_cmd->add_option("--data", data_path, "dataset CSV")->required();
    sens_cmd->add_option("--theta", sens_theta, "evaluation point v1,v2,... (default: fit)");
    sens_cmd->add_option("--residual-mode", residual_mode, "observed|zero");
    sens_cmd->add_option("--csv", csv_path, "sensitivity CSV output path")->required();
    sens_cmd->add_option("--out", out_path, "metadata JSON path (default: stdout)");

    // --- design-init ---
    auto* di_cmd = app.add_subcommand("design-init", "Initial k-support-point design");
    int n_support = 0;
    di_cmd->add_option("--model", model_name, "model name")->required();
    di_cmd->add_option("--criterion", criterion, "d|dp")->required();
    di_cmd->add_option("--theta0", theta_csv, "initial parameter values")->required();
    di_cmd->add_option("--region", region_spec, "search region lo1:hi1,...");
    di_cmd->add_option("--support", n_support, "support points (default: k)");
    di_cmd->add_option("--grid", grid_points, "grid points per dimension");
    di_cmd->add_option("--out", out_path, "output JSON path (default: stdout)");

    // --- design-seq ---
    auto* ds_cmd = app.add_subcommand("design-seq", "Sequential one-point augmentation");
    ds_cmd->add_option("--model", model_name, "model name")->required();
    ds_cmd->add_option("--criterion", criterion, "d|dp")->required();
    ds_cmd->add_option("--data", data_path, "existing dataset CSV")->required();
    ds_cmd->add_option("--theta0", theta_csv, "fit starting values (default: model default)");
    ds_cmd->add_option("--region", region_spec, "search region lo1:hi1,...");
    ds_cmd->add_option("--grid", grid_points, "grid points per dimension");
    ds_cmd->add_option("--out", out_path, "output JSON path (default: stdout)");

    // --- efficiency ---
    auto* eff_cmd = app.add_subcommand("efficiency", "D-efficiency of two designs");
    std::string points_a, points_b, eff_mode = "literal";
    eff_cmd->add_option("--model", model_name, "model name")->required();
    eff_cmd->add_option("--theta", theta_csv, "evaluation point v1,v2,...")->required();
    eff_cmd->add_option("--design-a", points_a, "support points 'x1,..;x1,..' (numerator design)")
        ->required();
    eff_cmd->add_option("--design-b", points_b, "support points (denominator design)")->required();
    eff_cmd->add_option("--mode", eff_mode, "literal|same-matrix");
    eff_cmd->add_option("--out", out_path, "output JSON path (default: stdout)");

    // --- simulate ---
    auto* sim_cmd = app.add_subcommand("simulate", "Monte-Carlo design evaluation");
    std::string plan_path, plan_b_path;
    std::optional<std::uint64_t> seed_opt;
    std::optional<int> sims_opt;
    sim_cmd->add_option("--plan", plan_path, "plan JSON")->required();
    sim_cmd->add_option("--plan-b", plan_b_path, "second plan JSON for a paired comparison");
    sim_cmd->add_option("--seed", seed_opt, "override plan seed");
    sim_cmd->add_option("--sims", sims_opt, "override plan n_sims");
    sim_cmd->add_option("--csv", csv_path, "per-sim CSV output path");
    sim_cmd->add_option("--out", out_path, "report JSON path (default: stdout)");

    // --- contour ---
    auto* con_cmd = app.add_subcommand("contour", "SSE grid for likelihood contours (k = 2)");
    std::string grid1_spec, grid2_spec, grid_mode = "unconditional";
    double level = 0.90;
    con_cmd->add_option("--model", model_name, "model name")->required();
    con_cmd->add_option("--data", data_path, "dataset CSV")->required();
    con_cmd->add_option("--grid1", grid1_spec, "theta1 grid lo:hi:n")->required();
    con_cmd->add_option("--grid2", grid2_spec, "theta2 grid lo:hi:n")->required();
    con_cmd->add_option("--mode", grid_mode, "unconditional|conditional");
    con_cmd->add_option("--level", level, "likelihood-region level (metadata)");
    con_cmd->add_option("--csv", csv_path, "grid CSV output path")->required();
    con_cmd->add_option("--out", out_path, "metadata JSON path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints the diagnostic
        return 2;
    }

    auto fit_from_data = [&](const od::ZooEntry& entry, const od::Dataset& data) {
        od::Vector theta0 =
            theta_csv.empty() ? entry.default_start : parse_vector(theta_csv);
        return od::fit_ls(entry.model, data, theta0);
    };

    if (fit_cmd->parsed()) {
        od::ZooEntry entry = od::find_model(model_name);
        od::Dataset data = od::read_dataset_csv(data_path);
        od::FitResult fit = fit_from_data(entry, data);
        emit(od::to_json(fit), out_path);
        return 0;
    }

    if (sens_cmd->parsed()) {
        od::ZooEntry entry = od::find_model(model_name);
        od::Dataset data = od::read_dataset_csv(data_path);
        od::Vector theta = sens_theta.empty() ? fit_from_data(entry, data).theta
                                              : parse_vector(sens_theta);
        od::ResidualMode mode;
        if (residual_mode == "observed")
            mode = od::ResidualMode::Observed;
        else if (residual_mode == "zero")
            mode = od::ResidualMode::Zero;
        else
            throw std::invalid_argument("--residual-mode must be observed or zero");
        od::SensitivityBundle s = od::profile_matrix(entry.model, data, theta, mode);

        std::vector<std::string> header{"row"};
        for (int a = 1; a <= entry.model.k; ++a) header.push_back("v_" + std::to_string(a));
        for (int a = 1; a <= entry.model.k; ++a) header.push_back("p_" + std::to_string(a));
        std::vector<std::vector<double>> rows;
        for (int j = 0; j < s.V.rows(); ++j) {
            std::vector<double> row{static_cast<double>(j + 1)};
            for (int a = 0; a < entry.model.k; ++a) row.push_back(s.V(j, a));
            for (int a = 0; a < entry.model.k; ++a) row.push_back(s.P(j, a));
            rows.push_back(std::move(row));
        }
        od::write_csv(csv_path, header, rows);

        nlohmann::json meta{{"residual_mode", residual_mode},
                            {"eval_point", std::vector<double>(theta.data(), theta.data() + theta.size())},
                            {"csv", csv_path},
                            {"condition_warnings", s.condition_warnings}};
        emit(meta, out_path);
        return 0;
    }

    if (di_cmd->parsed()) {
        od::ZooEntry entry = od::find_model(model_name);
        od::DesignRegion region =
            region_spec.empty() ? entry.default_region : parse_region(region_spec);
        od::Vector theta0 = parse_vector(theta_csv);
        int ns = n_support > 0 ? n_support : entry.model.k;
        od::SearchOptions opts;
        opts.grid_points_per_dim = grid_points;
        od::DesignOutcome outcome =
            od::design_initial(entry.model, theta0, ns, region, parse_kind(criterion), opts);
        emit(od::to_json(outcome), out_path);
        return 0;
    }

    if (ds_cmd->parsed()) {
        od::ZooEntry entry = od::find_model(model_name);
        od::Dataset data = od::read_dataset_csv(data_path);
        od::DesignRegion region =
            region_spec.empty() ? entry.default_region : parse_region(region_spec);
        od::FitResult fit = fit_from_data(entry, data);
        od::SearchOptions opts;
        opts.grid_points_per_dim = grid_points;
        od::DesignOutcome outcome =
            od::design_sequential(entry.model, fit, data, region, parse_kind(criterion), opts);
        nlohmann::json j = od::to_json(outcome);
        j["base_fit"] = od::to_json(fit);
        emit(j, out_path);
        return 0;
    }

    if (eff_cmd->parsed()) {
        od::ZooEntry entry = od::find_model(model_name);
        od::Vector theta = parse_vector(theta_csv);
        auto pts_a = parse_points(points_a);
        auto pts_b = parse_points(points_b);
        auto design_matrix = [&](const std::vector<od::Vector>& pts) {
            od::Matrix X(pts.size(), entry.model.m);
            for (std::size_t j = 0; j < pts.size(); ++j) X.row(j) = pts[j].transpose();
            return X;
        };
        od::Matrix Xa = design_matrix(pts_a), Xb = design_matrix(pts_b);
        od::Dataset da{Xa, std::nullopt}, db{Xb, std::nullopt};

        od::EfficiencyMode mode;
        if (eff_mode == "literal")
            mode = od::EfficiencyMode::Literal;
        else if (eff_mode == "same-matrix")
            mode = od::EfficiencyMode::SameMatrix;
        else
            throw std::invalid_argument("--mode must be literal or same-matrix");

        double num = od::d_criterion(od::build_jacobian(entry.model, da, theta)).logdet;
        double den;
        if (mode == od::EfficiencyMode::Literal) {
            od::Vector zero = od::Vector::Zero(Xb.rows());
            den = od::dp_criterion(
                      od::profile_matrix_with_residuals(entry.model, Xb, theta, zero).P)
                      .logdet;
        } else {
            den = od::d_criterion(od::build_jacobian(entry.model, db, theta)).logdet;
        }
        od::EfficiencyReport er = od::d_efficiency(num, den, entry.model.k, mode);
        emit(od::to_json(er), out_path);
        return 0;
    }

    if (sim_cmd->parsed()) {
        auto load_plan = [&](const std::string& path) {
            std::ifstream in(path);
            if (!in) throw std::invalid_argument("cannot open plan file '" + path + "'");
            nlohmann::json pj = nlohmann::json::parse(in);

            od::ZooEntry entry = od::find_model(pj.at("model").get<std::string>());
            od::Dataset data = od::read_dataset_csv(pj.at("data").get<std::string>());
            od::Vector theta0 = entry.default_start;
            if (pj.contains("theta0")) {
                auto t = pj["theta0"].get<std::vector<double>>();
                theta0 = Eigen::Map<od::Vector>(t.data(), t.size());
            }
            od::SimulationPlan plan;
            plan.model = entry.model;
            plan.base_dataset = data;
            plan.base_fit = od::fit_ls(entry.model, data, theta0);
            auto np = pj.at("new_point").get<std::vector<double>>();
            plan.new_point = Eigen::Map<od::Vector>(np.data(), np.size());
            plan.n_sims = pj.value("sims", 2000);
            if (pj.contains("sigma")) plan.noise = od::NoiseModel(pj["sigma"].get<double>());
            plan.seed = pj.value("seed", 0ULL);
            plan.label = pj.value("label", std::string{});
            if (seed_opt) plan.seed = *seed_opt;
            if (sims_opt) plan.n_sims = *sims_opt;
            return plan;
        };

        od::SimulationPlan plan = load_plan(plan_path);
        od::SimulationReport report = od::run_simulation(plan);
        nlohmann::json j{{"report", od::to_json(report)}};

        if (!plan_b_path.empty()) {
            od::SimulationPlan plan_b = load_plan(plan_b_path);
            od::SimulationReport report_b = od::run_simulation(plan_b);
            j["report_b"] = od::to_json(report_b);
            j["comparison_a_vs_b"] = od::to_json(od::compare_reports(report, report_b));
        }

        if (!csv_path.empty()) {
            const int k = report.k;
            std::vector<std::string> header{"sim"};
            for (int i = 1; i <= k; ++i)
                for (int jx = i + 1; jx <= k; ++jx)
                    header.push_back("corr_" + std::to_string(i) + "_" + std::to_string(jx));
            for (int i = 1; i <= k; ++i) header.push_back("se_" + std::to_string(i));
            header.push_back("converged");
            std::vector<std::vector<double>> rows;
            for (std::size_t s = 0; s < report.per_sim.size(); ++s) {
                const od::SimRecord& r = report.per_sim[s];
                std::vector<double> row{static_cast<double>(s + 1)};
                if (r.converged) {
                    for (int i = 0; i < k; ++i)
                        for (int jx = i + 1; jx < k; ++jx) row.push_back(r.correlation(i, jx));
                    for (int i = 0; i < k; ++i) row.push_back(r.std_errors(i));
                    row.push_back(1.0);
                } else {
                    for (int c = 0; c < k * (k - 1) / 2 + k; ++c)
                        row.push_back(std::numeric_limits<double>::quiet_NaN());
                    row.push_back(0.0);
                }
                rows.push_back(std::move(row));
            }
            od::write_csv(csv_path, header, rows);
        }
        emit(j, out_path);
        return 0;
    }

    if (con_cmd->parsed()) {
        od::ZooEntry entry = od::find_model(model_name);
        if (entry.model.k != 2) throw std::invalid_argument("contour requires a 2-parameter model");
        od::Dataset data = od::read_dataset_csv(data_path);
        GridSpec g1 = parse_grid_spec(grid1_spec), g2 = parse_grid_spec(grid2_spec);
        std::vector<double> grid1 = linspace(g1.lo, g1.hi, g1.n);
        std::vector<double> grid2 = linspace(g2.lo, g2.hi, g2.n);
        od::SseGridMode mode;
        if (grid_mode == "unconditional")
            mode = od::SseGridMode::UnconditionalPairs;
        else if (grid_mode == "conditional")
            mode = od::SseGridMode::ConditionalTrace;
        else
            throw std::invalid_argument("--mode must be unconditional or conditional");

        od::Matrix S = od::sse_grid(entry.model, data, grid1, grid2, mode);
        std::vector<std::vector<double>> rows;
        for (std::size_t i = 0; i < grid1.size(); ++i)
            for (std::size_t j = 0; j < grid2.size(); ++j)
                rows.push_back({grid1[i], grid2[j], S(i, j)});
        od::write_csv(csv_path, {"theta1", "theta2", "sse"}, rows);

        od::FitResult fit = fit_from_data(entry, data);
        nlohmann::json meta{{"csv", csv_path},
                            {"mode", grid_mode},
                            {"sse_min_grid", S.minCoeff()},
                            {"sse_hat", fit.sse},
                            {"level", level},
                            {"level_cutoff",
                             od::likelihood_region_level(fit.sse, data.n(), entry.model.k, level)}};
        emit(meta, out_path);
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const std::invalid_argument& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& err) {
        std::cerr << "usage error: " << err.what() << "\n";
        return 2;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 1;
    }
}
