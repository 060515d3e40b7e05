#pragma once

#include "optidesign/sensitivity.hpp"

namespace optidesign {

enum class CriterionKind { D, DP };

/// log |M'M| for a sensitivity matrix M. logdet is authoritative; det is
/// kept for reporting and may under/overflow. Singular M'M gives
/// logdet = -infinity rather than an error so searches can traverse
/// degenerate candidates.
struct CriterionValue {
    double logdet = 0.0;
    double det = 0.0;
    CriterionKind criterion = CriterionKind::D;
    int k = 0;

    bool singular() const { return !(logdet > -std::numeric_limits<double>::infinity()); }
};

CriterionValue d_criterion(const Matrix& V);
CriterionValue dp_criterion(const Matrix& P);

/// Element (i, j) of P'P assembled term-by-term from first/second derivative
/// information (four-term expansion) without forming the profile vectors.
double ptp_element(int i, int j, const Matrix& V, const SecondDerivs& W, const Vector& e);

enum class EfficiencyMode {
    Literal,    // |V'V| at one design over |P'P| at another, as printed
    SameMatrix  // |V'V| at both designs
};

struct EfficiencyReport {
    double d_eff = 0.0;  // percent
    double numerator_logdet = 0.0;
    double denominator_logdet = 0.0;
    EfficiencyMode mode = EfficiencyMode::Literal;
    int k = 0;
};

/// d_eff = exp((numerator_logdet - denominator_logdet)/k) * 100%.
EfficiencyReport d_efficiency(double numerator_logdet, double denominator_logdet, int k,
                              EfficiencyMode mode);

/// Stacks a candidate sensitivity row beneath an existing n x k matrix.
Matrix augment(const Matrix& M, const Vector& row);

}  // namespace optidesign
