#include "mre/assembly.hpp"

#include <cmath>

namespace mre {

namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Trip = Eigen::Triplet<double>;

struct CellPoint {
    std::array<double, 8> shape;                  // N_a at the Gauss point
    std::array<std::array<double, 3>, 8> grad;    // dN_a/dx_b
};

}  // namespace

QuadratureOperators build_quadrature_ops(const Grid& g) {
    const int d = g.dim;
    const int corners = 1 << d;
    const double r = 1.0 / std::sqrt(3.0);

    // reference shape data for the 2^d Gauss points
    std::vector<CellPoint> ref(std::size_t(corners), CellPoint{});
    for (int gp = 0; gp < corners; ++gp) {
        std::array<double, 3> xi = {0, 0, 0};
        for (int a = 0; a < d; ++a) xi[a] = (gp >> a) & 1 ? r : -r;
        CellPoint& cp = ref[std::size_t(gp)];
        for (int c = 0; c < corners; ++c) {
            double val = 1.0;
            for (int a = 0; a < d; ++a) {
                double s = (c >> a) & 1 ? 1.0 : -1.0;
                val *= 0.5 * (1.0 + s * xi[a]);
            }
            cp.shape[std::size_t(c)] = val;
            for (int b = 0; b < d; ++b) {
                double gv = 1.0;
                for (int a = 0; a < d; ++a) {
                    double s = (c >> a) & 1 ? 1.0 : -1.0;
                    if (a == b)
                        gv *= s * 0.5 * (2.0 / g.h[a]);  // dN/dxi * dxi/dx
                    else
                        gv *= 0.5 * (1.0 + s * xi[a]);
                }
                cp.grad[std::size_t(c)][std::size_t(b)] = gv;
            }
        }
    }

    std::int64_t ncells = 1;
    for (int a = 0; a < d; ++a) ncells *= g.cells[a];
    const std::int64_t n = g.num_nodes();
    const int ncomp = SymTensorField::n_comps(d);
    const std::int64_t ngp = ncells * corners;
    double wgp = 1.0;
    for (int a = 0; a < d; ++a) wgp *= g.h[a];
    wgp /= corners;

    QuadratureOperators q;
    q.ngp = int(ngp);
    q.ncomp = ncomp;
    q.weights.assign(std::size_t(ngp), wgp);
    q.pair_weight.assign(std::size_t(ncomp), 2.0);
    for (int a = 0; a < d; ++a) q.pair_weight[std::size_t(a)] = 1.0;

    double cvol = 1.0;
    for (int a = 0; a < d; ++a) cvol *= g.h[a];
    q.cell_volume.assign(std::size_t(ncells), cvol);

    // shape data at the cell center (xi = 0)
    CellPoint ctr{};
    for (int c = 0; c < corners; ++c) {
        ctr.shape[std::size_t(c)] = 1.0 / corners;
        for (int b = 0; b < d; ++b) {
            double s = (c >> b) & 1 ? 1.0 : -1.0;
            ctr.grad[std::size_t(c)][std::size_t(b)] = s * (2.0 / corners) / g.h[b];
        }
    }

    std::vector<Trip> ts, tdiv, ti, tdc, tic;
    ts.reserve(std::size_t(ngp) * std::size_t(ncomp * corners * 2));
    tdiv.reserve(std::size_t(ngp) * std::size_t(d * corners));
    ti.reserve(std::size_t(ngp) * std::size_t(corners));
    tdc.reserve(std::size_t(ncells) * std::size_t(d * corners));
    tic.reserve(std::size_t(ncells) * std::size_t(corners));

    const int ncx = g.cells[0], ncy = g.cells[1], ncz = d == 3 ? g.cells[2] : 1;
    std::int64_t cell = 0;
    for (int ck = 0; ck < ncz; ++ck)
        for (int cj = 0; cj < ncy; ++cj)
            for (int ci = 0; ci < ncx; ++ci, ++cell) {
                std::array<std::int64_t, 8> node_id{};
                for (int c = 0; c < corners; ++c) {
                    Index3 ix = {ci + ((c >> 0) & 1), cj + ((c >> 1) & 1),
                                 d == 3 ? ck + ((c >> 2) & 1) : 0};
                    node_id[std::size_t(c)] = g.id(ix);
                }
                for (int c = 0; c < corners; ++c) {
                    const std::int64_t nid = node_id[std::size_t(c)];
                    tic.emplace_back(cell, nid, ctr.shape[std::size_t(c)]);
                    for (int a = 0; a < d; ++a)
                        tdc.emplace_back(cell, a * n + nid, ctr.grad[std::size_t(c)][std::size_t(a)]);
                }
                for (int gp = 0; gp < corners; ++gp) {
                    const std::int64_t row_gp = cell * corners + gp;
                    const CellPoint& cp = ref[std::size_t(gp)];
                    for (int c = 0; c < corners; ++c) {
                        const std::int64_t nid = node_id[std::size_t(c)];
                        ti.emplace_back(row_gp, nid, cp.shape[std::size_t(c)]);
                        for (int a = 0; a < d; ++a) {
                            const double ga = cp.grad[std::size_t(c)][std::size_t(a)];
                            tdiv.emplace_back(row_gp, a * n + nid, ga);
                            // strain rows
                            for (int b = a; b < d; ++b) {
                                const int slot = SymTensorField::slot(d, a, b);
                                if (a == b) {
                                    ts.emplace_back(slot * ngp + row_gp, a * n + nid, ga);
                                } else {
                                    const double gb = cp.grad[std::size_t(c)][std::size_t(b)];
                                    ts.emplace_back(slot * ngp + row_gp, a * n + nid, 0.5 * gb);
                                    ts.emplace_back(slot * ngp + row_gp, b * n + nid, 0.5 * ga);
                                }
                            }
                        }
                    }
                }
            }

    q.strain = SpMat(Eigen::Index(ncomp * ngp), Eigen::Index(d * n));
    q.strain.setFromTriplets(ts.begin(), ts.end());
    q.div = SpMat(Eigen::Index(ngp), Eigen::Index(d * n));
    q.div.setFromTriplets(tdiv.begin(), tdiv.end());
    q.interp = SpMat(Eigen::Index(ngp), Eigen::Index(n));
    q.interp.setFromTriplets(ti.begin(), ti.end());
    q.div_center = SpMat(Eigen::Index(ncells), Eigen::Index(d * n));
    q.div_center.setFromTriplets(tdc.begin(), tdc.end());
    q.interp_center = SpMat(Eigen::Index(ncells), Eigen::Index(n));
    q.interp_center.setFromTriplets(tic.begin(), tic.end());
    return q;
}

namespace {

SpMat diag_from(const std::vector<double>& d) {
    SpMat m(Eigen::Index(d.size()), Eigen::Index(d.size()));
    m.reserve(Eigen::VectorXi::Constant(int(d.size()), 1));
    for (Eigen::Index i = 0; i < Eigen::Index(d.size()); ++i) m.insert(i, i) = d[std::size_t(i)];
    m.makeCompressed();
    return m;
}

Eigen::VectorXd gauss_values(const QuadratureOperators& q, const std::vector<double>& nodal) {
    Eigen::Map<const Eigen::VectorXd> v(nodal.data(), Eigen::Index(nodal.size()));
    return q.interp * v;
}

}  // namespace

SpMat viscous_stiffness(const QuadratureOperators& q, const std::vector<double>& mu_nodal) {
    Eigen::VectorXd mu_gp = gauss_values(q, mu_nodal);
    std::vector<double> w(std::size_t(q.ncomp) * std::size_t(q.ngp));
    for (int c = 0; c < q.ncomp; ++c)
        for (int gp = 0; gp < q.ngp; ++gp)
            w[std::size_t(c * q.ngp + gp)] =
                2.0 * q.pair_weight[std::size_t(c)] * q.weights[std::size_t(gp)] * mu_gp[gp];
    SpMat scaled = diag_from(w) * q.strain;
    return SpMat(q.strain.transpose()) * scaled;
}

SpMat pressure_coupling(const QuadratureOperators& q) {
    SpMat scaled = diag_from(q.weights) * q.interp;
    return SpMat(q.div.transpose()) * scaled;
}

SpMat grad_div_stiffness(const QuadratureOperators& q, const std::vector<double>& lambda_nodal) {
    Eigen::Map<const Eigen::VectorXd> l(lambda_nodal.data(), Eigen::Index(lambda_nodal.size()));
    Eigen::VectorXd l_c = q.interp_center * l;
    std::vector<double> w(q.cell_volume.size());
    for (std::size_t c = 0; c < w.size(); ++c) w[c] = q.cell_volume[c] * l_c[Eigen::Index(c)];
    SpMat scaled = diag_from(w) * q.div_center;
    return SpMat(q.div_center.transpose()) * scaled;
}

std::vector<double> viscous_mu_pairing(const QuadratureOperators& q,
                                       const std::vector<double>& u_dofs,
                                       const std::vector<double>& v_dofs) {
    Eigen::Map<const Eigen::VectorXd> u(u_dofs.data(), Eigen::Index(u_dofs.size()));
    Eigen::Map<const Eigen::VectorXd> v(v_dofs.data(), Eigen::Index(v_dofs.size()));
    Eigen::VectorXd eu = q.strain * u;
    Eigen::VectorXd ev = q.strain * v;
    Eigen::VectorXd z = Eigen::VectorXd::Zero(q.ngp);
    for (int c = 0; c < q.ncomp; ++c) {
        const double pw = 2.0 * q.pair_weight[std::size_t(c)];
        for (int gp = 0; gp < q.ngp; ++gp)
            z[gp] += pw * q.weights[std::size_t(gp)] * eu[c * q.ngp + gp] * ev[c * q.ngp + gp];
    }
    Eigen::VectorXd g = q.interp.transpose() * z;
    return std::vector<double>(g.data(), g.data() + g.size());
}

}  // namespace mre
