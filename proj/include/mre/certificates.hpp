#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "mre/fields.hpp"

namespace mre {

struct CertificateReport {
    std::string kind;
    bool pass = false;
    double inf = 0.0;
    double sup = 0.0;
    double constant = 0.0;        ///< max(sup, 1/inf) when both are finite
    std::int64_t worst_node = -1;
    int samples = 0;
    double aux = 0.0;             ///< 2D: inf |d_x1 u1^1|
};

struct RootReport {
    std::vector<std::complex<double>> roots;
    int upper_count = 0;
    int lower_count = 0;
    int real_count = 0;
    double min_separation = 0.0;
    double min_imag = 0.0;          ///< min |Im| over nonreal roots
    std::complex<double> sl_det;    ///< boundary-operator determinant
    bool pass = false;
};

struct RootConditionReport {
    bool pass = false;
    int max_real_multiplicity = 0;
    int max_complex_multiplicity = 0;
    double min_separation = 0.0;
    double min_imag = 0.0;
    std::string failure;
};

/// Pointwise 2D ellipticity certificate: inf over nodes of the Frobenius
/// norm of the symmetric gradient of the background field.
CertificateReport cert_2d(const VectorField& u1, double threshold);

/// Two-measurement 3D certificate: per node, minimize
/// |S1 xi x xi|^2 + |S2 xi x xi|^2 over the unit sphere (Fibonacci lattice
/// plus projected-gradient polish); pass iff the global inf exceeds the
/// threshold.
CertificateReport cert_3d(const VectorField& u1, const VectorField& u1t, double threshold,
                          int samples = 2048);

/// Same minimization for a single pair of constant strains.
double sphere_min_q(const double s1[3][3], const double s2[3][3], int samples);

/// 2D Shapiro-Lopatinskii check at a boundary point: roots of tau^2 + xi2^2
/// and the contour integral around the upper root.
RootReport sl_check_2d(double coefficient);

/// 3D check: quartic symbol in the normal frequency built from two strain
/// values and a tangential frequency; verifies the 2/2 half-plane split and
/// the trace-moment determinant. Throws HalfPlaneSplitViolation on a real
/// root or a 3/1 split.
RootReport sl_check_3d(const double s1[3][3], const double s2[3][3], const double xi_prime[2]);

/// Root hypotheses: simple real zeros, at most double complex zeros,
/// separation >= eps between distinct roots, |Im| >= eps for nonreal roots.
/// Multiplicity is defined by clustering with radius 1e-8.
RootConditionReport root_conditions(const std::vector<std::complex<double>>& roots, double eps);

}  // namespace mre
