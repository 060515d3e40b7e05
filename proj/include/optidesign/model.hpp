#pragma once

#include "optidesign/types.hpp"

#include <functional>
#include <optional>
#include <string>

namespace optidesign {

enum class DerivativeSource { Analytic, FiniteDifference };

/// A single-response nonlinear regression model: predicted response
/// f(x, theta) for an m-vector of design variables and a k-vector of
/// parameters, plus first and second parameter derivatives.
///
/// Models built with analytic_model() carry closed-form derivatives;
/// fd_model() backs grad/hess by central finite differences so any
/// user-supplied response function can participate.
struct ModelSpec {
    std::string name;
    int k = 0;  // parameter count
    int m = 0;  // design-variable count
    std::function<double(const Vector& x, const Vector& theta)> f;
    std::function<Vector(const Vector& x, const Vector& theta)> grad;
    std::function<Matrix(const Vector& x, const Vector& theta)> hess;
    DerivativeSource derivative_source = DerivativeSource::Analytic;
};

ModelSpec analytic_model(std::string name, int k, int m,
                         std::function<double(const Vector&, const Vector&)> f,
                         std::function<Vector(const Vector&, const Vector&)> grad,
                         std::function<Matrix(const Vector&, const Vector&)> hess);

/// Wraps a bare response function with central-difference derivatives.
ModelSpec fd_model(std::string name, int k, int m,
                   std::function<double(const Vector&, const Vector&)> f);

/// n experimental settings (rows of X), optionally with observed responses.
/// Replicated runs are explicit repeated rows.
struct Dataset {
    Matrix X;                 // n x m
    std::optional<Vector> y;  // length n when present

    int n() const { return static_cast<int>(X.rows()); }
    int m() const { return static_cast<int>(X.cols()); }
    bool has_y() const { return y.has_value(); }

    void validate() const;
    Dataset with_row(const Vector& x, std::optional<double> yval = std::nullopt) const;
};

/// Splits theta = (theta_i, theta_minus_i) and merges back, for a fixed
/// parameter-of-interest index (0-based).
struct ParamPartition {
    int k;
    int index;

    ParamPartition(int k_, int index_) : k(k_), index(index_) {
        require(k >= 1 && index >= 0 && index < k, "ParamPartition: index out of range");
    }

    std::pair<double, Vector> split(const Vector& theta) const;
    Vector merge(double theta_i, const Vector& theta_minus) const;
};

/// Additive spherical-normal observation noise.
struct NoiseModel {
    double sigma = 1.0;

    explicit NoiseModel(double s) : sigma(s) { require(s > 0.0, "NoiseModel: sigma must be > 0"); }
};

// Point evaluations. Dimension mismatches raise std::invalid_argument;
// non-finite results raise EvaluationError carrying (x, theta).
double eval_model(const ModelSpec& model, const Vector& x, const Vector& theta);
Vector eval_jacobian_row(const ModelSpec& model, const Vector& x, const Vector& theta);
Matrix eval_hessian_point(const ModelSpec& model, const Vector& x, const Vector& theta);

// Dataset-level assembly, rows ordered as dataset rows.
Vector eval_predictions(const ModelSpec& model, const Dataset& data, const Vector& theta);
Matrix build_jacobian(const ModelSpec& model, const Dataset& data, const Vector& theta);
SecondDerivs build_second_derivatives(const ModelSpec& model, const Dataset& data, const Vector& theta);

// Central-difference engines (also used as test oracles against analytic
// derivatives). Steps: sqrt(eps)*(1+|theta_a|) for gradients,
// eps^(1/4)*(1+|theta_a|) for second derivatives.
Vector fd_gradient(const std::function<double(const Vector&, const Vector&)>& f,
                   const Vector& x, const Vector& theta);
Matrix fd_hessian(const std::function<double(const Vector&, const Vector&)>& f,
                  const Vector& x, const Vector& theta);

}  // namespace optidesign
