#pragma once

#include "optidesign/model.hpp"

#include <vector>

namespace optidesign {

enum class ResidualMode { Observed, Zero };

/// First- and second-order sensitivity information at one parameter value:
/// the Jacobian V, the second-derivative array W, the residual vector used,
/// and the profile-based sensitivity matrix P whose column i is the total
/// derivative of the predicted responses with respect to parameter i along
/// the conditional least-squares path of the remaining parameters.
struct SensitivityBundle {
    Matrix V;        // n x k local sensitivities
    SecondDerivs W;  // n slices, k x k
    Vector e;        // residuals used (zero vector in Zero mode)
    Matrix P;        // n x k profile-based sensitivities
    ResidualMode residual_mode = ResidualMode::Zero;
    Vector eval_point;
    Vector condition;  // condition number of H_{-i-i} per column
    std::vector<int> condition_warnings;  // columns with condition >= 1e8
};

/// Contraction of a residual vector against slices of the second-derivative
/// array over the sample dimension: entry (a, b) = sum_j e_j W[j](rows[a], cols[b]).
Matrix bracket_contract(const Vector& e, const SecondDerivs& W, const std::vector<int>& rows,
                        const std::vector<int>& cols);

/// Full profile vector, second-order form:
/// p_i = v_i - V_{-i} (V_{-i}'V_{-i} - [e'][V_{-i-i}])^-1 (V_{-i}'v_i - V_{-ii}'e).
/// Throws SingularityError when the inner system's condition exceeds 1e12.
Vector profile_vector_full(int i, const Matrix& V, const SecondDerivs& W, const Vector& e);

/// Zero-residual reduction: the residual of regressing v_i on V_{-i},
/// computed through a QR decomposition of V_{-i}.
Vector profile_vector_reduced(int i, const Matrix& V);

/// Condition number of H_{-i-i} for column i (diagnostic).
double profile_condition(int i, const Matrix& V, const SecondDerivs& W, const Vector& e);

SensitivityBundle profile_matrix(const ModelSpec& model, const Dataset& data, const Vector& theta,
                                 ResidualMode mode);

/// Same, with an explicit residual vector (used by sequential design where
/// the candidate row has no observation and carries its expected residual 0).
SensitivityBundle profile_matrix_with_residuals(const ModelSpec& model, const Matrix& X,
                                                const Vector& theta, const Vector& e);

}  // namespace optidesign
