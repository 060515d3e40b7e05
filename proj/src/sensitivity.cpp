#include "optidesign/sensitivity.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <sstream>

namespace optidesign {

namespace {

std::vector<int> complement(int i, int k) {
    std::vector<int> idx;
    idx.reserve(k - 1);
    for (int a = 0; a < k; ++a)
        if (a != i) idx.push_back(a);
    return idx;
}

Matrix take_cols(const Matrix& V, const std::vector<int>& idx) {
    Matrix out(V.rows(), idx.size());
    for (std::size_t a = 0; a < idx.size(); ++a) out.col(a) = V.col(idx[a]);
    return out;
}

constexpr double kSingularCondition = 1e12;
constexpr double kWarnCondition = 1e8;

}  // namespace

Matrix bracket_contract(const Vector& e, const SecondDerivs& W, const std::vector<int>& rows,
                        const std::vector<int>& cols) {
    require(static_cast<std::size_t>(e.size()) == W.size(),
            "bracket_contract: residual length must match slice count");
    Matrix out = Matrix::Zero(rows.size(), cols.size());
    for (int j = 0; j < e.size(); ++j) {
        const Matrix& Wj = W[j];
        for (std::size_t a = 0; a < rows.size(); ++a)
            for (std::size_t b = 0; b < cols.size(); ++b)
                out(a, b) += e(j) * Wj(rows[a], cols[b]);
    }
    return out;
}

namespace {

struct ProfileSystem {
    Matrix Vmi;      // n x (k-1)
    Matrix H;        // V_{-i}'V_{-i} - [e'][V_{-i-i}]
    Vector rhs;      // V_{-i}'v_i - V_{-ii}'e
    double condition = 0.0;
};

ProfileSystem build_system(int i, const Matrix& V, const SecondDerivs& W, const Vector& e) {
    const int k = static_cast<int>(V.cols());
    require(i >= 0 && i < k, "profile vector: index out of range");
    require(e.size() == V.rows(), "profile vector: residual length mismatch");
    ProfileSystem sys;
    std::vector<int> mi = complement(i, k);
    sys.Vmi = take_cols(V, mi);
    sys.H = sys.Vmi.transpose() * sys.Vmi - bracket_contract(e, W, mi, mi);
    sys.rhs = sys.Vmi.transpose() * V.col(i) - bracket_contract(e, W, mi, {i}).col(0);

    Eigen::JacobiSVD<Matrix> svd(sys.H);
    double smin = svd.singularValues().minCoeff();
    double smax = svd.singularValues().maxCoeff();
    sys.condition = (smin > 0.0) ? smax / smin : std::numeric_limits<double>::infinity();
    return sys;
}

}  // namespace

double profile_condition(int i, const Matrix& V, const SecondDerivs& W, const Vector& e) {
    if (V.cols() == 1) return 1.0;
    return build_system(i, V, W, e).condition;
}

Vector profile_vector_full(int i, const Matrix& V, const SecondDerivs& W, const Vector& e) {
    const int k = static_cast<int>(V.cols());
    if (k == 1) return V.col(0);  // no co-parameters, correction vanishes

    ProfileSystem sys = build_system(i, V, W, e);
    if (!(sys.condition < kSingularCondition)) {
        std::ostringstream os;
        os << "profile_vector_full: H_{-i-i} for parameter " << i
           << " is singular or near-singular (condition " << sys.condition << ")";
        throw SingularityError(os.str(), i);
    }
    Vector c = sys.H.ldlt().solve(sys.rhs);
    return V.col(i) - sys.Vmi * c;
}

Vector profile_vector_reduced(int i, const Matrix& V) {
    const int k = static_cast<int>(V.cols());
    require(i >= 0 && i < k, "profile_vector_reduced: index out of range");
    if (k == 1) return V.col(0);

    Matrix Vmi = take_cols(V, complement(i, k));
    Eigen::ColPivHouseholderQR<Matrix> qr(Vmi);
    if (qr.rank() < Vmi.cols()) {
        std::ostringstream os;
        os << "profile_vector_reduced: V_{-i} is rank deficient for parameter " << i;
        throw SingularityError(os.str(), i);
    }
    Vector vi = V.col(i);
    // residual of regressing v_i on V_{-i}
    return vi - Vmi * qr.solve(vi);
}

SensitivityBundle profile_matrix_with_residuals(const ModelSpec& model, const Matrix& X,
                                                const Vector& theta, const Vector& e) {
    require(X.cols() == model.m, "profile_matrix: design dimension mismatch");
    require(e.size() == X.rows(), "profile_matrix: residual length mismatch");
    Dataset d{X, std::nullopt};

    SensitivityBundle out;
    out.V = build_jacobian(model, d, theta);
    out.W = build_second_derivatives(model, d, theta);
    out.e = e;
    out.eval_point = theta;
    out.P.resize(X.rows(), model.k);
    out.condition.resize(model.k);
    for (int i = 0; i < model.k; ++i) {
        out.P.col(i) = profile_vector_full(i, out.V, out.W, out.e);
        out.condition(i) = profile_condition(i, out.V, out.W, out.e);
        if (out.condition(i) >= kWarnCondition) out.condition_warnings.push_back(i);
    }
    return out;
}

SensitivityBundle profile_matrix(const ModelSpec& model, const Dataset& data, const Vector& theta,
                                 ResidualMode mode) {
    data.validate();
    Vector e;
    if (mode == ResidualMode::Observed) {
        require(data.has_y(), "profile_matrix: observed mode requires responses");
        e = *data.y - eval_predictions(model, data, theta);
    } else {
        e = Vector::Zero(data.n());
    }
    SensitivityBundle out = profile_matrix_with_residuals(model, data.X, theta, e);
    out.residual_mode = mode;
    return out;
}

}  // namespace optidesign
