#pragma once

#include "optidesign/fit.hpp"
#include "optidesign/search.hpp"

#include <filesystem>
#include <optional>

namespace optidesign {

/// Published reference values a bundled fixture must reproduce before the
/// model is used. `*_decimals` give the printed precision of each value;
/// a computed value matches when, rounded to that precision, it is within
/// one unit in the last printed digit.
struct ReferenceFit {
    Vector estimates;
    Vector estimate_decimals;
    Vector std_errors;
    Vector se_decimals;
    Matrix correlation;  // lower triangle meaningful
    double correlation_tol = 0.005;
};

struct ZooEntry {
    ModelSpec model;
    DesignRegion default_region;
    Vector default_start;
    std::optional<Dataset> fixture;
    std::optional<ReferenceFit> reference_fit;
    bool fixture_validated = false;
};

/// |computed - printed| <= unit after rounding computed to the printed grid.
bool matches_printed(double computed, double printed, int decimals);

/// Michaelis-Menten f = th1*x/(th2+x), analytic derivatives, bundled
/// 12-run Puromycin fixture, region [1e-3, 1.1].
ZooEntry michaelis_menten();

/// Hougen-Watson rate model, analytic derivatives, 24-run isomerization
/// fixture loaded from `fixture_csv` and validated against the published
/// estimate/std-error/correlation table before use. Throws
/// std::runtime_error naming the file when it is absent, SingularityError
/// never; validation failure raises std::runtime_error.
ZooEntry hougen_watson(const std::filesystem::path& fixture_csv);
ZooEntry hougen_watson();  // fixture at fixture_dir()/"isomerization.csv"

/// Fixture directory: $OPTIDESIGN_FIXTURES when set, else "data".
std::filesystem::path fixture_dir();

/// Lookup by name: "michaelis-menten" or "hougen-watson".
ZooEntry find_model(const std::string& name);

}  // namespace optidesign
