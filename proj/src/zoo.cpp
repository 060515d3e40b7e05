#include "optidesign/zoo.hpp"

#include "optidesign/csv.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace optidesign {

bool matches_printed(double computed, double printed, int decimals) {
    double unit = std::pow(10.0, -decimals);
    double rounded = std::round(computed / unit) * unit;
    return std::abs(rounded - printed) <= unit * (1.0 + 1e-9);
}

namespace {

ModelSpec michaelis_menten_model() {
    auto f = [](const Vector& x, const Vector& th) {
        return th(0) * x(0) / (th(1) + x(0));
    };
    auto grad = [](const Vector& x, const Vector& th) {
        double u = th(1) + x(0);
        Vector g(2);
        g << x(0) / u, -th(0) * x(0) / (u * u);
        return g;
    };
    auto hess = [](const Vector& x, const Vector& th) {
        double u = th(1) + x(0);
        Matrix h(2, 2);
        double d12 = -x(0) / (u * u);
        h << 0.0, d12, d12, 2.0 * th(0) * x(0) / (u * u * u);
        return h;
    };
    return analytic_model("michaelis-menten", 2, 1, f, grad, hess);
}

// f = th1*th3*(x2 - x3/1.632) / (1 + th2*x1 + th3*x2 + th4*x3)
ModelSpec hougen_watson_model() {
    auto parts = [](const Vector& x, const Vector& th) {
        double num = x(1) - x(2) / 1.632;
        double den = 1.0 + th(1) * x(0) + th(2) * x(1) + th(3) * x(2);
        return std::pair<double, double>(num, den);
    };
    auto f = [parts](const Vector& x, const Vector& th) {
        auto [num, den] = parts(x, th);
        return th(0) * th(2) * num / den;
    };
    auto grad = [parts](const Vector& x, const Vector& th) {
        auto [num, den] = parts(x, th);
        double fv = th(0) * th(2) * num / den;
        Vector g(4);
        g(0) = th(2) * num / den;
        g(1) = -fv * x(0) / den;
        g(2) = th(0) * num / den - fv * x(1) / den;
        g(3) = -fv * x(2) / den;
        return g;
    };
    auto hess = [parts](const Vector& x, const Vector& th) {
        auto [num, den] = parts(x, th);
        // f = A/den with A = th1*th3*num; den linear in theta
        double A = th(0) * th(2) * num;
        Vector dA = Vector::Zero(4);
        dA(0) = th(2) * num;
        dA(2) = th(0) * num;
        Vector dden(4);
        dden << 0.0, x(0), x(1), x(2);
        Matrix h(4, 4);
        for (int a = 0; a < 4; ++a)
            for (int b = a; b < 4; ++b) {
                double d2A = ((a == 0 && b == 2) || (a == 2 && b == 0)) ? num : 0.0;
                double v = d2A / den - dA(a) * dden(b) / (den * den) -
                           dA(b) * dden(a) / (den * den) +
                           2.0 * A * dden(a) * dden(b) / (den * den * den);
                h(a, b) = h(b, a) = v;
            }
        return h;
    };
    return analytic_model("hougen-watson", 4, 3, f, grad, hess);
}

Dataset puromycin_fixture() {
    // Treated-enzyme Puromycin runs: six concentrations, two replicates each
    const double xs[12] = {0.02, 0.02, 0.06, 0.06, 0.11, 0.11,
                           0.22, 0.22, 0.56, 0.56, 1.10, 1.10};
    const double ys[12] = {76, 47, 97, 107, 123, 139, 159, 152, 191, 201, 207, 200};
    Dataset d;
    d.X.resize(12, 1);
    Vector y(12);
    for (int j = 0; j < 12; ++j) {
        d.X(j, 0) = xs[j];
        y(j) = ys[j];
    }
    d.y = y;
    return d;
}

void validate_reference(ZooEntry& entry, const std::string& what) {
    const ReferenceFit& ref = *entry.reference_fit;
    FitResult fit;
    try {
        fit = fit_ls(entry.model, *entry.fixture, entry.default_start);
    } catch (const std::exception& err) {
        throw std::runtime_error(what + ": fixture failed reference validation: fit failed (" +
                                 err.what() + ")");
    }
    if (!fit.covariance_ok)
        throw std::runtime_error(what +
                                 ": fixture failed reference validation: covariance unavailable");

    std::ostringstream bad;
    for (int a = 0; a < entry.model.k; ++a) {
        if (!matches_printed(fit.theta(a), ref.estimates(a),
                             static_cast<int>(ref.estimate_decimals(a))))
            bad << " estimate[" << a + 1 << "]=" << fit.theta(a) << " vs " << ref.estimates(a);
        if (!matches_printed(fit.std_errors(a), ref.std_errors(a),
                             static_cast<int>(ref.se_decimals(a))))
            bad << " se[" << a + 1 << "]=" << fit.std_errors(a) << " vs " << ref.std_errors(a);
    }
    for (int i = 0; i < entry.model.k; ++i)
        for (int j = 0; j < i; ++j)
            if (std::abs(fit.correlation(i, j) - ref.correlation(i, j)) > ref.correlation_tol)
                bad << " corr[" << i + 1 << "," << j + 1 << "]=" << fit.correlation(i, j) << " vs "
                    << ref.correlation(i, j);

    if (!bad.str().empty())
        throw std::runtime_error(what + ": fixture failed reference validation:" + bad.str());
    entry.fixture_validated = true;
}

}  // namespace

ZooEntry michaelis_menten() {
    ZooEntry entry{michaelis_menten_model(),
                   DesignRegion(Vector::Constant(1, 1e-3), Vector::Constant(1, 1.1)),
                   Vector(2)};
    entry.default_start << 205.0, 0.08;
    entry.fixture = puromycin_fixture();

    ReferenceFit ref;
    ref.estimates = Vector(2);
    ref.estimates << 212.68, 0.064;
    ref.estimate_decimals = Vector(2);
    ref.estimate_decimals << 2, 3;
    ref.std_errors = Vector(2);
    ref.std_errors << 6.95, 0.00828;
    ref.se_decimals = Vector(2);
    ref.se_decimals << 2, 5;
    ref.correlation = Matrix::Identity(2, 2);
    ref.correlation(1, 0) = ref.correlation(0, 1) = 0.765;
    entry.reference_fit = ref;
    validate_reference(entry, "michaelis-menten");
    return entry;
}

ZooEntry hougen_watson(const std::filesystem::path& fixture_csv) {
    Vector lo(3), hi(3);
    lo << 100.0, 75.0, 30.0;
    hi << 400.0, 350.0, 150.0;
    ZooEntry entry{hougen_watson_model(), DesignRegion(lo, hi), Vector(4)};
    entry.default_start << 35.92, 0.071, 0.038, 0.167;

    if (!std::filesystem::exists(fixture_csv)) {
        throw std::runtime_error(
            "hougen-watson: fixture required: expected 24-run isomerization dataset at '" +
            fixture_csv.string() + "' (x1,x2,x3,y)");
    }
    entry.fixture = read_dataset_csv(fixture_csv);
    if (entry.fixture->m() != 3 || !entry.fixture->has_y())
        throw std::runtime_error("hougen-watson: fixture must have columns x1,x2,x3,y");

    ReferenceFit ref;
    ref.estimates = Vector(4);
    ref.estimates << 35.92, 0.071, 0.038, 0.167;
    ref.estimate_decimals = Vector(4);
    ref.estimate_decimals << 2, 3, 3, 3;
    ref.std_errors = Vector(4);
    ref.std_errors << 8.21, 0.178, 0.099, 0.415;
    ref.se_decimals = Vector(4);
    ref.se_decimals << 2, 3, 3, 3;
    ref.correlation = Matrix::Identity(4, 4);
    auto setc = [&](int i, int j, double v) { ref.correlation(i, j) = ref.correlation(j, i) = v; };
    setc(1, 0, -0.805);
    setc(2, 0, -0.840);
    setc(2, 1, 0.998);
    setc(3, 0, -0.790);
    setc(3, 1, 0.998);
    setc(3, 2, 0.995);
    entry.reference_fit = ref;
    validate_reference(entry, "hougen-watson");
    return entry;
}

ZooEntry hougen_watson() { return hougen_watson(fixture_dir() / "isomerization.csv"); }

std::filesystem::path fixture_dir() {
    if (const char* env = std::getenv("OPTIDESIGN_FIXTURES")) return env;
    return "data";
}

ZooEntry find_model(const std::string& name) {
    if (name == "michaelis-menten") return michaelis_menten();
    if (name == "hougen-watson") return hougen_watson();
    throw std::invalid_argument("unknown model '" + name +
                                "' (available: michaelis-menten, hougen-watson)");
}

}  // namespace optidesign
