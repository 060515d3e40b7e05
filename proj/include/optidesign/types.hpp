#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace optidesign {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Second-derivative array: one symmetric k x k slice per dataset row.
using SecondDerivs = std::vector<Matrix>;

/// Model evaluation produced a non-finite value (pole, overflow, ...).
class EvaluationError : public std::runtime_error {
public:
    EvaluationError(const std::string& msg, Vector x, Vector theta)
        : std::runtime_error(msg), x_(std::move(x)), theta_(std::move(theta)) {}
    const Vector& x() const { return x_; }
    const Vector& theta() const { return theta_; }

private:
    Vector x_;
    Vector theta_;
};

/// A linear system inside a sensitivity or criterion computation is
/// singular or too ill-conditioned to trust.
class SingularityError : public std::runtime_error {
public:
    explicit SingularityError(const std::string& msg, int parameter_index = -1)
        : std::runtime_error(msg), index_(parameter_index) {}
    int parameter_index() const { return index_; }

private:
    int index_;
};

/// Iterative solver failed to converge within its budget.
class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::invalid_argument(msg);
}

}  // namespace optidesign
