#include "optidesign/model.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace optidesign {

namespace {

void check_dims(const ModelSpec& model, const Vector& x, const Vector& theta) {
    if (x.size() != model.m || theta.size() != model.k) {
        std::ostringstream os;
        os << "model '" << model.name << "' expects m=" << model.m << ", k=" << model.k
           << " but got x:" << x.size() << ", theta:" << theta.size();
        throw std::invalid_argument(os.str());
    }
}

[[noreturn]] void throw_nonfinite(const ModelSpec& model, const Vector& x, const Vector& theta,
                                  const char* what) {
    std::ostringstream os;
    os << "model '" << model.name << "': non-finite " << what << " at x=[" << x.transpose()
       << "], theta=[" << theta.transpose() << "]";
    throw EvaluationError(os.str(), x, theta);
}

}  // namespace

ModelSpec analytic_model(std::string name, int k, int m,
                         std::function<double(const Vector&, const Vector&)> f,
                         std::function<Vector(const Vector&, const Vector&)> grad,
                         std::function<Matrix(const Vector&, const Vector&)> hess) {
    require(k >= 1 && m >= 1, "analytic_model: k and m must be >= 1");
    ModelSpec spec;
    spec.name = std::move(name);
    spec.k = k;
    spec.m = m;
    spec.f = std::move(f);
    spec.grad = std::move(grad);
    spec.hess = std::move(hess);
    spec.derivative_source = DerivativeSource::Analytic;
    return spec;
}

ModelSpec fd_model(std::string name, int k, int m,
                   std::function<double(const Vector&, const Vector&)> f) {
    require(k >= 1 && m >= 1, "fd_model: k and m must be >= 1");
    ModelSpec spec;
    spec.name = std::move(name);
    spec.k = k;
    spec.m = m;
    spec.f = f;
    spec.grad = [f](const Vector& x, const Vector& theta) { return fd_gradient(f, x, theta); };
    spec.hess = [f](const Vector& x, const Vector& theta) { return fd_hessian(f, x, theta); };
    spec.derivative_source = DerivativeSource::FiniteDifference;
    return spec;
}

void Dataset::validate() const {
    require(X.rows() >= 1, "Dataset: needs at least one row");
    if (y) require(y->size() == X.rows(), "Dataset: y length must equal row count");
}

Dataset Dataset::with_row(const Vector& x, std::optional<double> yval) const {
    require(x.size() == X.cols(), "Dataset::with_row: dimension mismatch");
    Dataset out;
    out.X.resize(X.rows() + 1, X.cols());
    out.X.topRows(X.rows()) = X;
    out.X.row(X.rows()) = x.transpose();
    if (y) {
        require(yval.has_value(), "Dataset::with_row: y present, new row needs a response");
        Vector ny(y->size() + 1);
        ny.head(y->size()) = *y;
        ny(y->size()) = *yval;
        out.y = std::move(ny);
    } else {
        require(!yval.has_value(), "Dataset::with_row: dataset has no responses");
    }
    return out;
}

std::pair<double, Vector> ParamPartition::split(const Vector& theta) const {
    require(theta.size() == k, "ParamPartition::split: dimension mismatch");
    Vector rest(k - 1);
    int at = 0;
    for (int a = 0; a < k; ++a)
        if (a != index) rest(at++) = theta(a);
    return {theta(index), rest};
}

Vector ParamPartition::merge(double theta_i, const Vector& theta_minus) const {
    require(theta_minus.size() == k - 1, "ParamPartition::merge: dimension mismatch");
    Vector theta(k);
    int at = 0;
    for (int a = 0; a < k; ++a)
        theta(a) = (a == index) ? theta_i : theta_minus(at++);
    return theta;
}

double eval_model(const ModelSpec& model, const Vector& x, const Vector& theta) {
    check_dims(model, x, theta);
    double v = model.f(x, theta);
    if (!std::isfinite(v)) throw_nonfinite(model, x, theta, "response");
    return v;
}

Vector eval_jacobian_row(const ModelSpec& model, const Vector& x, const Vector& theta) {
    check_dims(model, x, theta);
    Vector g = model.grad(x, theta);
    if (!g.allFinite()) throw_nonfinite(model, x, theta, "gradient");
    return g;
}

Matrix eval_hessian_point(const ModelSpec& model, const Vector& x, const Vector& theta) {
    check_dims(model, x, theta);
    Matrix h = model.hess(x, theta);
    if (!h.allFinite()) throw_nonfinite(model, x, theta, "hessian");
    return h;
}

Vector eval_predictions(const ModelSpec& model, const Dataset& data, const Vector& theta) {
    data.validate();
    Vector eta(data.n());
    for (int j = 0; j < data.n(); ++j) eta(j) = eval_model(model, data.X.row(j), theta);
    return eta;
}

Matrix build_jacobian(const ModelSpec& model, const Dataset& data, const Vector& theta) {
    data.validate();
    Matrix V(data.n(), model.k);
    for (int j = 0; j < data.n(); ++j) {
        try {
            V.row(j) = eval_jacobian_row(model, data.X.row(j), theta).transpose();
        } catch (const EvaluationError& err) {
            throw EvaluationError(std::string(err.what()) + " (dataset row " + std::to_string(j) + ")",
                                  err.x(), err.theta());
        }
    }
    return V;
}

SecondDerivs build_second_derivatives(const ModelSpec& model, const Dataset& data,
                                      const Vector& theta) {
    data.validate();
    SecondDerivs W;
    W.reserve(data.n());
    for (int j = 0; j < data.n(); ++j) {
        try {
            W.push_back(eval_hessian_point(model, data.X.row(j), theta));
        } catch (const EvaluationError& err) {
            throw EvaluationError(std::string(err.what()) + " (dataset row " + std::to_string(j) + ")",
                                  err.x(), err.theta());
        }
    }
    return W;
}

Vector fd_gradient(const std::function<double(const Vector&, const Vector&)>& f, const Vector& x,
                   const Vector& theta) {
    const double root_eps = std::sqrt(std::numeric_limits<double>::epsilon());
    Vector g(theta.size());
    Vector tp = theta, tm = theta;
    for (int a = 0; a < theta.size(); ++a) {
        double h = root_eps * (1.0 + std::abs(theta(a)));
        tp(a) = theta(a) + h;
        tm(a) = theta(a) - h;
        g(a) = (f(x, tp) - f(x, tm)) / (2.0 * h);
        tp(a) = theta(a);
        tm(a) = theta(a);
    }
    return g;
}

Matrix fd_hessian(const std::function<double(const Vector&, const Vector&)>& f, const Vector& x,
                  const Vector& theta) {
    const double quarter_eps = std::pow(std::numeric_limits<double>::epsilon(), 0.25);
    const int k = static_cast<int>(theta.size());
    Matrix H(k, k);
    Vector t = theta;
    for (int a = 0; a < k; ++a) {
        double ha = quarter_eps * (1.0 + std::abs(theta(a)));
        for (int b = a; b < k; ++b) {
            double hb = quarter_eps * (1.0 + std::abs(theta(b)));
            if (a == b) {
                t(a) = theta(a) + ha;
                double fp = f(x, t);
                t(a) = theta(a) - ha;
                double fm = f(x, t);
                t(a) = theta(a);
                H(a, a) = (fp - 2.0 * f(x, t) + fm) / (ha * ha);
            } else {
                t(a) = theta(a) + ha; t(b) = theta(b) + hb;
                double fpp = f(x, t);
                t(b) = theta(b) - hb;
                double fpm = f(x, t);
                t(a) = theta(a) - ha; t(b) = theta(b) + hb;
                double fmp = f(x, t);
                t(b) = theta(b) - hb;
                double fmm = f(x, t);
                t(a) = theta(a); t(b) = theta(b);
                H(a, b) = H(b, a) = (fpp - fpm - fmp + fmm) / (4.0 * ha * hb);
            }
        }
    }
    return H;
}

}  // namespace optidesign
