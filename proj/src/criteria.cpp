#include "optidesign/criteria.hpp"

#include <cmath>

namespace optidesign {

namespace {

CriterionValue logdet_of_gram(const Matrix& M, CriterionKind kind) {
    const int n = static_cast<int>(M.rows());
    const int k = static_cast<int>(M.cols());
    require(n >= k, "criterion: need at least k rows");

    CriterionValue cv;
    cv.criterion = kind;
    cv.k = k;

    if (!M.allFinite()) {
        cv.logdet = -std::numeric_limits<double>::infinity();
        cv.det = 0.0;
        return cv;
    }

    // |M'M| = prod R_ii^2 from the QR factorization of M
    Eigen::ColPivHouseholderQR<Matrix> qr(M);
    if (qr.rank() < k) {
        cv.logdet = -std::numeric_limits<double>::infinity();
        cv.det = 0.0;
        return cv;
    }
    double ld = 0.0;
    for (int a = 0; a < k; ++a) ld += std::log(std::abs(qr.matrixR()(a, a)));
    cv.logdet = 2.0 * ld;
    cv.det = std::exp(cv.logdet);
    return cv;
}

std::vector<int> complement(int i, int k) {
    std::vector<int> idx;
    for (int a = 0; a < k; ++a)
        if (a != i) idx.push_back(a);
    return idx;
}

}  // namespace

CriterionValue d_criterion(const Matrix& V) { return logdet_of_gram(V, CriterionKind::D); }

CriterionValue dp_criterion(const Matrix& P) { return logdet_of_gram(P, CriterionKind::DP); }

double ptp_element(int i, int j, const Matrix& V, const SecondDerivs& W, const Vector& e) {
    const int k = static_cast<int>(V.cols());
    require(i >= 0 && i < k && j >= 0 && j < k, "ptp_element: index out of range");

    double first = V.col(i).dot(V.col(j));
    if (k == 1) return first;

    auto half_correction = [&](int a) -> std::pair<Matrix, Vector> {
        std::vector<int> ma = complement(a, k);
        Matrix Vma(V.rows(), k - 1);
        for (std::size_t b = 0; b < ma.size(); ++b) Vma.col(b) = V.col(ma[b]);
        Matrix H = Vma.transpose() * Vma - bracket_contract(e, W, ma, ma);
        Vector h = Vma.transpose() * V.col(a) - bracket_contract(e, W, ma, {a}).col(0);
        Eigen::LDLT<Matrix> ldlt(H);
        if (ldlt.info() != Eigen::Success)
            throw SingularityError("ptp_element: singular H block", a);
        Vector c = ldlt.solve(h);  // H^-1 h
        return {std::move(Vma), std::move(c)};
    };

    auto [Vmi, ci] = half_correction(i);
    auto [Vmj, cj] = half_correction(j);

    // v_i'v_j - v_i'V_{-j}H_{-j-j}^-1 h_{-jj} - h_{-ii}'H_{-i-i}^-1 V_{-i}'v_j
    //        + h_{-ii}'H_{-i-i}^-1 V_{-i}'V_{-j} H_{-j-j}^-1 h_{-jj}
    double second = V.col(i).dot(Vmj * cj);
    double third = ci.dot(Vmi.transpose() * V.col(j));
    double fourth = ci.dot(Vmi.transpose() * Vmj * cj);
    return first - second - third + fourth;
}

EfficiencyReport d_efficiency(double numerator_logdet, double denominator_logdet, int k,
                              EfficiencyMode mode) {
    require(k >= 1, "d_efficiency: k must be >= 1");
    require(std::isfinite(numerator_logdet) && std::isfinite(denominator_logdet),
            "d_efficiency: log-determinants must be finite");
    EfficiencyReport er;
    er.numerator_logdet = numerator_logdet;
    er.denominator_logdet = denominator_logdet;
    er.mode = mode;
    er.k = k;
    er.d_eff = std::exp((numerator_logdet - denominator_logdet) / k) * 100.0;
    return er;
}

Matrix augment(const Matrix& M, const Vector& row) {
    require(row.size() == M.cols(), "augment: row dimension mismatch");
    Matrix out(M.rows() + 1, M.cols());
    out.topRows(M.rows()) = M;
    out.row(M.rows()) = row.transpose();
    return out;
}

}  // namespace optidesign
