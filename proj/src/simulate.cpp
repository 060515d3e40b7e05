#include "optidesign/simulate.hpp"

#include "optidesign/criteria.hpp"
#include "optidesign/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace optidesign {

double NormalSampler::next(double mean, double stddev) {
    if (has_spare_) {
        has_spare_ = false;
        return mean + stddev * spare_;
    }
    double u1 = stream_.next_unit();
    double u2 = stream_.next_unit();
    double r = std::sqrt(-2.0 * std::log(u1));
    double a = 2.0 * M_PI * u2;
    spare_ = r * std::sin(a);
    has_spare_ = true;
    return mean + stddev * r * std::cos(a);
}

namespace {

SummaryStats summarize(std::vector<double> v) {
    SummaryStats s;
    if (v.empty()) return s;
    s.mean = std::accumulate(v.begin(), v.end(), 0.0) / v.size();
    std::sort(v.begin(), v.end());
    auto quantile = [&](double q) {
        double pos = q * (v.size() - 1);
        std::size_t lo = static_cast<std::size_t>(pos);
        std::size_t hi = std::min(lo + 1, v.size() - 1);
        double w = pos - lo;
        return (1.0 - w) * v[lo] + w * v[hi];
    };
    s.median = quantile(0.5);
    s.q10 = quantile(0.10);
    s.q90 = quantile(0.90);
    return s;
}

}  // namespace

SimulationReport run_simulation(const SimulationPlan& plan) {
    require(plan.n_sims >= 1, "run_simulation: n_sims must be >= 1");
    require(plan.base_fit.converged, "run_simulation: base fit did not converge");
    require(plan.base_dataset.has_y(), "run_simulation: base dataset has no responses");
    require(plan.new_point.size() == plan.model.m, "run_simulation: new point dimension mismatch");

    const ModelSpec& model = plan.model;
    const Vector& theta_base = plan.base_fit.theta;
    const double sigma = plan.noise ? plan.noise->sigma : std::sqrt(plan.base_fit.s2);
    const double mu_new = eval_model(model, plan.new_point, theta_base);

    SimulationReport rep;
    rep.k = model.k;
    rep.sigma = sigma;
    rep.seed = plan.seed;
    rep.label = plan.label;
    rep.per_sim.resize(plan.n_sims);

    Dataset augmented = plan.base_dataset.with_row(plan.new_point, mu_new);
    Vector& y_aug = *augmented.y;
    const int slot = augmented.n() - 1;

    for (int s = 0; s < plan.n_sims; ++s) {
        NormalSampler noise(substream_seed(plan.seed, static_cast<std::uint64_t>(s)));
        y_aug(slot) = mu_new + noise.next(0.0, sigma);

        SimRecord& rec = rep.per_sim[s];
        rec.converged = false;
        try {
            FitResult f = fit_ls(model, augmented, theta_base);
            if (f.covariance_ok) {
                rec.correlation = f.correlation;
                rec.std_errors = f.std_errors;
                rec.logdet_vtv = d_criterion(build_jacobian(model, augmented, f.theta)).logdet;
                rec.converged = true;
            }
        } catch (const std::exception&) {
            // recorded as failed below
        }
        if (!rec.converged) ++rep.n_failed;
    }

    if (rep.n_failed > plan.n_sims / 5) {
        std::ostringstream os;
        os << "run_simulation: " << rep.n_failed << " of " << plan.n_sims
           << " refits failed (> 20%); sigma=" << sigma << ", new point=["
           << plan.new_point.transpose() << "]";
        throw ConvergenceError(os.str());
    }

    const int k = model.k;
    for (int i = 0; i < k; ++i) {
        std::vector<double> se;
        for (const SimRecord& r : rep.per_sim)
            if (r.converged) se.push_back(r.std_errors(i));
        rep.summaries["se_" + std::to_string(i + 1)] = summarize(std::move(se));
    }
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) {
            std::vector<double> c;
            for (const SimRecord& r : rep.per_sim)
                if (r.converged) c.push_back(r.correlation(i, j));
            rep.summaries["corr_" + std::to_string(i + 1) + "_" + std::to_string(j + 1)] =
                summarize(std::move(c));
        }
    return rep;
}

PairedComparison compare_reports(const SimulationReport& a, const SimulationReport& b) {
    require(a.per_sim.size() == b.per_sim.size(), "compare_reports: sim counts differ");
    require(a.k == b.k, "compare_reports: parameter dimensions differ");
    const int k = a.k;

    PairedComparison cmp;
    cmp.se_win_fraction = Vector::Zero(k);
    cmp.corr_win_fraction = Matrix::Zero(k, k);
    double eff_sum = 0.0;
    int n = 0;

    for (std::size_t s = 0; s < a.per_sim.size(); ++s) {
        const SimRecord& ra = a.per_sim[s];
        const SimRecord& rb = b.per_sim[s];
        if (!ra.converged || !rb.converged) continue;
        ++n;
        for (int i = 0; i < k; ++i) {
            if (ra.std_errors(i) < rb.std_errors(i))
                cmp.se_win_fraction(i) += 1.0;
            else if (ra.std_errors(i) == rb.std_errors(i))
                cmp.se_win_fraction(i) += 0.5;
        }
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) {
                double ca = std::abs(ra.correlation(i, j));
                double cb = std::abs(rb.correlation(i, j));
                if (ca < cb)
                    cmp.corr_win_fraction(i, j) += 1.0;
                else if (ca == cb)
                    cmp.corr_win_fraction(i, j) += 0.5;
            }
        eff_sum += std::exp((ra.logdet_vtv - rb.logdet_vtv) / k) * 100.0;
    }
    require(n > 0, "compare_reports: no sims converged in both reports");
    cmp.se_win_fraction /= n;
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j) cmp.corr_win_fraction(i, j) /= n;
    cmp.mean_d_efficiency = eff_sum / n;
    cmp.n_compared = n;
    return cmp;
}

}  // namespace optidesign
