#include "mre/certificates.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>

#include "mre/ops.hpp"

namespace mre {

namespace {

constexpr double kClusterRadius = 1e-8;
constexpr double kDetThreshold = 1e-8;

double finish_constant(double inf, double sup) {
    if (inf > 0.0 && std::isfinite(sup)) return std::max(sup, 1.0 / inf);
    return std::numeric_limits<double>::infinity();
}

using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// q(xi) = |S1 xi|^2 - (xi' S1 xi)^2 + |S2 xi|^2 - (xi' S2 xi)^2 on |xi| = 1,
/// which equals |S1 xi x xi|^2 + |S2 xi x xi|^2.
double q_value(const Mat3& s1, const Mat3& s2, const Vec3& xi) {
    Vec3 a = s1 * xi, b = s2 * xi;
    double qa = xi.dot(a), qb = xi.dot(b);
    return a.squaredNorm() - qa * qa + b.squaredNorm() - qb * qb;
}

Vec3 q_gradient(const Mat3& s1, const Mat3& s2, const Vec3& xi) {
    Vec3 a = s1 * xi, b = s2 * xi;
    return 2.0 * (s1 * a) - 4.0 * xi.dot(a) * a + 2.0 * (s2 * b) - 4.0 * xi.dot(b) * b;
}

/// Projected-gradient polish on the sphere from a starting direction.
double polish(const Mat3& s1, const Mat3& s2, Vec3 xi) {
    double q = q_value(s1, s2, xi);
    double step = 0.1;
    for (int it = 0; it < 40; ++it) {
        Vec3 g = q_gradient(s1, s2, xi);
        g -= g.dot(xi) * xi;
        double gn = g.norm();
        if (gn < 1e-14) break;
        Vec3 trial = (xi - step * g).normalized();
        double qt = q_value(s1, s2, trial);
        if (qt < q) {
            xi = trial;
            q = qt;
            step *= 1.3;
        } else {
            step *= 0.5;
            if (step < 1e-12) break;
        }
    }
    return q;
}

double sphere_min(const Mat3& s1, const Mat3& s2, int samples) {
    const double golden = M_PI * (3.0 - std::sqrt(5.0));
    double best = std::numeric_limits<double>::infinity();
    Vec3 best_xi = Vec3::UnitZ();
    for (int i = 0; i < samples; ++i) {
        double z = 1.0 - 2.0 * (i + 0.5) / samples;
        double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        double phi = golden * i;
        Vec3 xi(r * std::cos(phi), r * std::sin(phi), z);
        double q = q_value(s1, s2, xi);
        if (q < best) {
            best = q;
            best_xi = xi;
        }
    }
    return std::min(best, polish(s1, s2, best_xi));
}

Mat3 strain_at(const SymTensorField& s, std::int64_t id) {
    Mat3 m;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) m(a, b) = s.entry(a, b, id);
    return m;
}

/// Quadratic polynomial in tau, coefficient order c[k] tau^k.
struct Quad {
    double c[3] = {0, 0, 0};
};

Quad mul_lin(double a0, double a1, double b0, double b1) {
    Quad q;
    q.c[0] = a0 * b0;
    q.c[1] = a0 * b1 + a1 * b0;
    q.c[2] = a1 * b1;
    return q;
}

void accumulate_square(double out[5], const Quad& q) {
    for (int i = 0; i <= 2; ++i)
        for (int j = 0; j <= 2; ++j) out[i + j] += q.c[i] * q.c[j];
}

/// Adds |S xi(tau) x xi(tau)|^2 with xi = (tau, a, b) to the quartic.
void accumulate_symbol(double out[5], const Mat3& s, double a, double b) {
    // (S xi)_i = s(i,0) tau + (s(i,1) a + s(i,2) b): linear in tau
    double u1[3], u0[3];
    for (int i = 0; i < 3; ++i) {
        u1[i] = s(i, 0);
        u0[i] = s(i, 1) * a + s(i, 2) * b;
    }
    // xi components as linears
    double v0[3] = {0.0, a, b};
    double v1[3] = {1.0, 0.0, 0.0};
    int idx[3][2] = {{1, 2}, {2, 0}, {0, 1}};
    for (int c = 0; c < 3; ++c) {
        int i = idx[c][0], j = idx[c][1];
        Quad t1 = mul_lin(u0[i], u1[i], v0[j], v1[j]);
        Quad t2 = mul_lin(u0[j], u1[j], v0[i], v1[i]);
        Quad cr;
        for (int k = 0; k <= 2; ++k) cr.c[k] = t1.c[k] - t2.c[k];
        accumulate_square(out, cr);
    }
}

std::vector<std::complex<double>> quartic_roots(const double c[5]) {
    double scale = 0.0;
    for (int k = 0; k <= 4; ++k) scale = std::max(scale, std::abs(c[k]));
    if (scale == 0.0 || std::abs(c[4]) < 1e-12 * scale)
        throw HalfPlaneSplitViolation("symbol polynomial degenerates (leading coefficient vanishes)");
    Eigen::Matrix4d comp = Eigen::Matrix4d::Zero();
    for (int k = 0; k < 4; ++k) comp(0, k) = -c[3 - k] / c[4];
    comp(1, 0) = comp(2, 1) = comp(3, 2) = 1.0;
    Eigen::EigenSolver<Eigen::Matrix4d> es(comp);
    std::vector<std::complex<double>> roots;
    for (int k = 0; k < 4; ++k) roots.push_back(es.eigenvalues()[k]);
    return roots;
}

void fill_root_stats(RootReport& rep) {
    double scale = 1.0;
    for (auto r : rep.roots) scale = std::max(scale, std::abs(r));
    rep.upper_count = rep.lower_count = rep.real_count = 0;
    rep.min_imag = std::numeric_limits<double>::infinity();
    for (auto r : rep.roots) {
        if (std::abs(r.imag()) <= kClusterRadius * scale) {
            ++rep.real_count;
        } else {
            rep.min_imag = std::min(rep.min_imag, std::abs(r.imag()));
            (r.imag() > 0 ? rep.upper_count : rep.lower_count)++;
        }
    }
    if (!std::isfinite(rep.min_imag)) rep.min_imag = 0.0;
    rep.min_separation = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rep.roots.size(); ++i)
        for (std::size_t j = i + 1; j < rep.roots.size(); ++j)
            rep.min_separation = std::min(rep.min_separation, std::abs(rep.roots[i] - rep.roots[j]));
    if (!std::isfinite(rep.min_separation)) rep.min_separation = 0.0;
}

/// (1/2pi i) contour integral of f over a circle, trapezoid rule.
template <class F>
std::complex<double> circle_integral(std::complex<double> center, double radius, int m, F&& f) {
    std::complex<double> acc = 0.0;
    for (int j = 0; j < m; ++j) {
        double th = 2.0 * M_PI * j / m;
        std::complex<double> e(std::cos(th), std::sin(th));
        std::complex<double> z = center + radius * e;
        // dz = i radius e dth; the 1/(2 pi i) cancels the i
        acc += f(z) * radius * e;
    }
    return acc / double(m);
}

}  // namespace

CertificateReport cert_2d(const VectorField& u1, double threshold) {
    if (u1.grid.dim != 2) throw DiscretizationError("cert_2d requires a 2D field");
    u1.validate();
    SymTensorField s = ops::sym_grad(u1);
    const std::int64_t n = u1.grid.num_nodes();
    CertificateReport rep;
    rep.kind = "cert_2d";
    rep.inf = std::numeric_limits<double>::infinity();
    rep.sup = 0.0;
    for (std::int64_t id = 0; id < n; ++id) {
        double f = std::sqrt(s.frobenius_sq(id));
        if (f < rep.inf) {
            rep.inf = f;
            rep.worst_node = id;
        }
        rep.sup = std::max(rep.sup, f);
    }
    std::vector<double> comp0(u1.values.begin(), u1.values.begin() + n);
    auto d11 = ops::axis_derivative(u1.grid, comp0, 0);
    rep.aux = std::numeric_limits<double>::infinity();
    for (double v : d11) rep.aux = std::min(rep.aux, std::abs(v));
    rep.samples = int(n);
    rep.pass = rep.inf > threshold;
    rep.constant = finish_constant(rep.inf, rep.sup);
    return rep;
}

double sphere_min_q(const double s1[3][3], const double s2[3][3], int samples) {
    Mat3 m1, m2;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            m1(a, b) = s1[a][b];
            m2(a, b) = s2[a][b];
        }
    return sphere_min(m1, m2, samples);
}

CertificateReport cert_3d(const VectorField& u1, const VectorField& u1t, double threshold,
                          int samples) {
    if (u1.grid.dim != 3) throw DiscretizationError("cert_3d requires 3D fields");
    if (!u1.grid.same_layout(u1t.grid)) throw DiscretizationError("cert_3d grid mismatch");
    u1.validate();
    u1t.validate();
    SymTensorField sa = ops::sym_grad(u1);
    SymTensorField sb = ops::sym_grad(u1t);
    const std::int64_t n = u1.grid.num_nodes();
    CertificateReport rep;
    rep.kind = "cert_3d";
    rep.inf = std::numeric_limits<double>::infinity();
    rep.sup = 0.0;
    rep.samples = samples;
    for (std::int64_t id = 0; id < n; ++id) {
        Mat3 m1 = strain_at(sa, id);
        Mat3 m2 = strain_at(sb, id);
        double q = sphere_min(m1, m2, samples);
        if (q < rep.inf) {
            rep.inf = q;
            rep.worst_node = id;
        }
        // upper envelope: largest eigenvalue bound |S xi x xi|^2 <= 2|S|^2
        rep.sup = std::max(rep.sup, m1.squaredNorm() + m2.squaredNorm());
    }
    rep.pass = rep.inf > threshold;
    rep.constant = finish_constant(rep.inf, rep.sup);
    return rep;
}

RootReport sl_check_2d(double coefficient) {
    if (coefficient == 0.0)
        throw ZeroCoefficient("2D symbol coefficient d_x1 u1^1 vanishes at the boundary point");
    // roots of tau^2 + xi2^2 at xi2 = 1, via the companion matrix
    Eigen::Matrix2d comp;
    comp << 0.0, -1.0, 1.0, 0.0;
    Eigen::EigenSolver<Eigen::Matrix2d> es(comp);
    RootReport rep;
    for (int k = 0; k < 2; ++k) rep.roots.push_back(es.eigenvalues()[k]);
    std::sort(rep.roots.begin(), rep.roots.end(),
              [](auto a, auto b) { return a.imag() > b.imag(); });
    fill_root_stats(rep);
    const std::complex<double> i(0.0, 1.0);
    rep.sl_det = circle_integral(i, 0.5, 64, [&](std::complex<double> z) { return 1.0 / (z - i); });
    rep.pass = std::abs(rep.sl_det) > kDetThreshold;
    return rep;
}

RootReport sl_check_3d(const double s1[3][3], const double s2[3][3], const double xi_prime[2]) {
    if (xi_prime[0] == 0.0 && xi_prime[1] == 0.0)
        throw DegenerateInput("tangential frequency must be nonzero");
    Mat3 m1, m2;
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            m1(a, b) = s1[a][b];
            m2(a, b) = s2[a][b];
        }
    double c[5] = {0, 0, 0, 0, 0};
    accumulate_symbol(c, m1, xi_prime[0], xi_prime[1]);
    accumulate_symbol(c, m2, xi_prime[0], xi_prime[1]);

    RootReport rep;
    rep.roots = quartic_roots(c);
    fill_root_stats(rep);
    if (rep.real_count > 0)
        throw HalfPlaneSplitViolation("real normal-frequency root: symbol not elliptic here");
    if (rep.upper_count != 2 || rep.lower_count != 2)
        throw HalfPlaneSplitViolation("root split is " + std::to_string(rep.upper_count) + "/" +
                                      std::to_string(rep.lower_count) + ", expected 2/2");

    std::vector<std::complex<double>> upper;
    for (auto r : rep.roots)
        if (r.imag() > 0) upper.push_back(r);
    // moments of 1/A_+ over a contour around the upper roots only; A_+ is
    // monic so the lower roots are not poles of the integrand
    std::complex<double> center = 0.5 * (upper[0] + upper[1]);
    double scale = 1.0 + std::max(std::abs(upper[0]), std::abs(upper[1]));
    double radius = 1.5 * std::max(std::abs(upper[0] - center), std::abs(upper[1] - center)) +
                    0.25 * scale;
    auto a_plus = [&](std::complex<double> z) { return (z - upper[0]) * (z - upper[1]); };
    std::complex<double> m0 = circle_integral(center, radius, 256,
                                              [&](std::complex<double> z) { return 1.0 / a_plus(z); });
    std::complex<double> m1m = circle_integral(center, radius, 256,
                                               [&](std::complex<double> z) { return z / a_plus(z); });
    std::complex<double> m2m = circle_integral(
        center, radius, 256, [&](std::complex<double> z) { return z * z / a_plus(z); });
    rep.sl_det = m0 * m2m - m1m * m1m;
    rep.pass = std::abs(rep.sl_det) > kDetThreshold;
    return rep;
}

RootConditionReport root_conditions(const std::vector<std::complex<double>>& roots, double eps) {
    if (!(eps > 0.0)) throw ConfigError("root-condition eps must be positive");
    RootConditionReport rep;
    // cluster roots to define multiplicities
    std::vector<std::complex<double>> centers;
    std::vector<int> mult;
    for (auto r : roots) {
        bool placed = false;
        for (std::size_t k = 0; k < centers.size(); ++k) {
            if (std::abs(r - centers[k]) <= kClusterRadius) {
                centers[k] = (centers[k] * double(mult[k]) + r) / double(mult[k] + 1);
                ++mult[k];
                placed = true;
                break;
            }
        }
        if (!placed) {
            centers.push_back(r);
            mult.push_back(1);
        }
    }
    rep.min_separation = std::numeric_limits<double>::infinity();
    rep.min_imag = std::numeric_limits<double>::infinity();
    rep.pass = true;
    for (std::size_t k = 0; k < centers.size(); ++k) {
        bool real = std::abs(centers[k].imag()) <= kClusterRadius;
        if (real) {
            rep.max_real_multiplicity = std::max(rep.max_real_multiplicity, mult[k]);
            if (mult[k] > 1) {
                rep.pass = false;
                rep.failure = "real zero with multiplicity > 1";
            }
        } else {
            rep.max_complex_multiplicity = std::max(rep.max_complex_multiplicity, mult[k]);
            rep.min_imag = std::min(rep.min_imag, std::abs(centers[k].imag()));
            if (mult[k] > 2) {
                rep.pass = false;
                rep.failure = "complex zero with multiplicity > 2";
            }
            if (std::abs(centers[k].imag()) < eps) {
                rep.pass = false;
                rep.failure = "nonreal root too close to the real axis";
            }
        }
        for (std::size_t j = k + 1; j < centers.size(); ++j)
            rep.min_separation = std::min(rep.min_separation, std::abs(centers[k] - centers[j]));
    }
    if (!std::isfinite(rep.min_separation)) rep.min_separation = 0.0;
    if (!std::isfinite(rep.min_imag)) rep.min_imag = 0.0;
    if (centers.size() > 1 && rep.min_separation < eps) {
        rep.pass = false;
        rep.failure = "distinct roots closer than eps";
    }
    return rep;
}

}  // namespace mre
