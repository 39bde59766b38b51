#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mre/adjoint.hpp"
#include "mre/certificates.hpp"
#include "mre/io.hpp"
#include "mre/norms.hpp"
#include "mre/phantoms.hpp"
#include "mre/residual_ops.hpp"
#include "mre/stokes.hpp"

namespace py = pybind11;
using namespace mre;

namespace {

Grid grid_from(int dim, const std::vector<int>& cells, const std::vector<double>& extent) {
    if (cells.size() != std::size_t(dim) || extent.size() != std::size_t(dim))
        throw ConfigError("cells and extent must have `dim` entries");
    Index3 c = {cells[0], cells[1], dim == 3 ? cells[2] : 1};
    std::array<double, 3> e = {extent[0], extent[1], dim == 3 ? extent[2] : 1.0};
    return Grid::make(dim, c, e);
}

ScalarField scalar_from(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.size() != g.num_nodes()) throw ConfigError("array size does not match the grid");
    ScalarField f(g);
    std::copy(a.data(), a.data() + a.size(), f.values.begin());
    return f;
}

VectorField vector_from(const Grid& g, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
    if (a.size() != g.num_nodes() * g.dim)
        throw ConfigError("array size does not match the grid (expect dim * nodes, component-major)");
    VectorField f(g);
    std::copy(a.data(), a.data() + a.size(), f.values.begin());
    return f;
}

py::array_t<double> to_array(const std::vector<double>& v) {
    py::array_t<double> a(py::ssize_t(v.size()));
    std::copy(v.begin(), v.end(), a.mutable_data());
    return a;
}

void fill_strain(const py::array_t<double, py::array::c_style | py::array::forcecast>& a,
                 double s[3][3]) {
    if (a.ndim() != 2 || a.shape(0) != 3 || a.shape(1) != 3)
        throw ConfigError("strain must be a 3x3 array");
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) s[i][j] = a.at(i, j);
}

}  // namespace

PYBIND11_MODULE(pymre, m) {
    m.doc() = "Shear-modulus reconstruction from time-harmonic Stokes displacement data";

    py::register_exception<Error>(m, "MreError");

    py::class_<Grid>(m, "Grid")
        .def(py::init(&grid_from), py::arg("dim"), py::arg("cells"), py::arg("extent"))
        .def_static("square", &Grid::square, py::arg("cells"), py::arg("side") = 1.0)
        .def_static("cube", &Grid::cube, py::arg("cells"), py::arg("side") = 1.0)
        .def_readonly("dim", &Grid::dim)
        .def_property_readonly("cells", [](const Grid& g) {
            std::vector<int> c(g.cells.begin(), g.cells.begin() + g.dim);
            return c;
        })
        .def_property_readonly("num_nodes", [](const Grid& g) { return g.num_nodes(); });

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("stab_alpha", &SolverConfig::stab_alpha)
        .def_readwrite("condition_cap", &SolverConfig::condition_cap)
        .def_readwrite("check_condition", &SolverConfig::check_condition);

    m.def("solve_stokes",
          [](const Grid& g, py::array_t<double> mu, double omega, py::array_t<double> bc,
             std::optional<py::array_t<double>> body_force, SolverConfig config) {
              StokesProblem prob{g, scalar_from(g, mu), omega, vector_from(g, bc), std::nullopt,
                                 config};
              if (body_force) prob.body_force = vector_from(g, *body_force);
              StokesSolution sol = solve_stokes(prob);
              py::dict out;
              out["u"] = to_array(sol.u.values);
              out["p"] = to_array(sol.p.values);
              out["linear_residual"] = sol.linear_residual;
              out["divergence_norm"] = sol.divergence_norm;
              out["condition_estimate"] = sol.condition_estimate;
              return out;
          },
          py::arg("grid"), py::arg("mu"), py::arg("omega"), py::arg("boundary_data"),
          py::arg("body_force") = py::none(), py::arg("config") = SolverConfig{});

    m.def("solve_elasticity",
          [](const Grid& g, py::array_t<double> lam, py::array_t<double> mu, double omega,
             py::array_t<double> bc, SolverConfig config) {
              VectorField u = solve_elasticity(
                  {g, scalar_from(g, lam), scalar_from(g, mu), omega, vector_from(g, bc),
                   std::nullopt, config});
              return to_array(u.values);
          },
          py::arg("grid"), py::arg("lam"), py::arg("mu"), py::arg("omega"),
          py::arg("boundary_data"), py::arg("config") = SolverConfig{});

    m.def("verify_stokes_limit",
          [](const Grid& g, const std::vector<double>& lambdas, py::array_t<double> mu,
             double omega, py::array_t<double> bc) {
              auto res = verify_stokes_limit(lambdas, scalar_from(g, mu), omega, vector_from(g, bc));
              py::dict out;
              out["lambdas"] = res.lambdas;
              out["gaps"] = res.gaps;
              out["slope"] = res.slope;
              out["low_confidence"] = res.low_confidence;
              return out;
          },
          py::arg("grid"), py::arg("lambdas"), py::arg("mu"), py::arg("omega"),
          py::arg("boundary_data"));

    m.def("make_phantom",
          [](const Grid& g, double background, const std::vector<std::vector<double>>& inclusions) {
              PhantomSpec spec;
              spec.background = background;
              for (const auto& row : inclusions) {
                  if (row.size() != 6)
                      throw ConfigError("inclusion rows are [cx, cy, cz, radius, contrast, width]");
                  spec.inclusions.push_back({{row[0], row[1], row[2]}, row[3], row[4], row[5]});
              }
              return to_array(make_phantom(spec, g).values);
          },
          py::arg("grid"), py::arg("background") = 1.0,
          py::arg("inclusions") = std::vector<std::vector<double>>{});

    m.def("make_excitation",
          [](const Grid& g, const std::string& kind, double amplitude, int modes,
             std::uint64_t seed) {
              ExcitationSpec spec{excitation_kind_from(kind), amplitude, modes, seed};
              return to_array(make_excitation(spec, g).values);
          },
          py::arg("grid"), py::arg("kind") = "shear", py::arg("amplitude") = 1.0,
          py::arg("modes") = 2, py::arg("seed") = 0);

    m.def("add_noise",
          [](const Grid& g, py::array_t<double> u, double level, std::uint64_t seed) {
              return to_array(add_noise(vector_from(g, u), level, seed).values);
          },
          py::arg("grid"), py::arg("u"), py::arg("level"), py::arg("seed") = 0);

    m.def("h_s_norm",
          [](const Grid& g, py::array_t<double> f, double s) {
              if (f.size() == g.num_nodes()) return h_s_norm(scalar_from(g, f), s);
              return h_s_norm(vector_from(g, f), s);
          },
          py::arg("grid"), py::arg("f"), py::arg("s"));

    m.def("evaluate_j",
          [](const Grid& g, py::array_t<double> mu, double omega,
             const std::vector<py::array_t<double>>& boundary_data,
             const std::vector<py::array_t<double>>& measured) {
              InverseProblem ip;
              ip.grid = g;
              ip.omega = omega;
              for (const auto& b : boundary_data) ip.boundary_data.push_back(vector_from(g, b));
              for (const auto& d : measured) ip.measured.push_back(vector_from(g, d));
              ip.mu_boundary = scalar_from(g, mu);
              return evaluate_J(scalar_from(g, mu), ip);
          },
          py::arg("grid"), py::arg("mu"), py::arg("omega"), py::arg("boundary_data"),
          py::arg("measured"));

    m.def("landweber_run",
          [](const Grid& g, double omega, const std::vector<py::array_t<double>>& boundary_data,
             const std::vector<py::array_t<double>>& measured, py::array_t<double> mu0,
             double sigma, int n_max, double stop_tol,
             std::optional<py::array_t<double>> mu_true) {
              InverseProblem ip;
              ip.grid = g;
              ip.omega = omega;
              for (const auto& b : boundary_data) ip.boundary_data.push_back(vector_from(g, b));
              for (const auto& d : measured) ip.measured.push_back(vector_from(g, d));
              ip.mu_boundary = scalar_from(g, mu0);
              if (mu_true) ip.mu_true = scalar_from(g, *mu_true);
              auto trace = landweber_run(ip, scalar_from(g, mu0), sigma, n_max, stop_tol);
              py::dict out;
              out["mu"] = to_array(trace.mu_final.values);
              out["status"] = trace.status == RunStatus::Converged     ? "converged"
                              : trace.status == RunStatus::Stalled     ? "stalled"
                                                                       : "max_iterations";
              std::vector<std::vector<double>> records;
              for (const auto& r : trace.records)
                  records.push_back({double(r.n), r.j, r.sigma, r.grad_norm, r.err_l2, r.err_hs});
              out["records"] = records;
              return out;
          },
          py::arg("grid"), py::arg("omega"), py::arg("boundary_data"), py::arg("measured"),
          py::arg("mu0"), py::arg("sigma"), py::arg("n_max"), py::arg("stop_tol") = 0.0,
          py::arg("mu_true") = py::none());

    m.def("cert_2d",
          [](const Grid& g, py::array_t<double> u1, double threshold) {
              auto rep = cert_2d(vector_from(g, u1), threshold);
              py::dict out;
              out["kind"] = rep.kind;
              out["pass"] = rep.pass;
              out["inf"] = rep.inf;
              out["sup"] = rep.sup;
              out["constant"] = rep.constant;
              out["worst_node"] = rep.worst_node;
              return out;
          },
          py::arg("grid"), py::arg("u1"), py::arg("threshold") = 1e-8);

    m.def("cert_3d",
          [](const Grid& g, py::array_t<double> u1, py::array_t<double> u1t, double threshold,
             int samples) {
              auto rep = cert_3d(vector_from(g, u1), vector_from(g, u1t), threshold, samples);
              py::dict out;
              out["kind"] = rep.kind;
              out["pass"] = rep.pass;
              out["inf"] = rep.inf;
              out["sup"] = rep.sup;
              out["constant"] = rep.constant;
              out["worst_node"] = rep.worst_node;
              out["samples"] = rep.samples;
              return out;
          },
          py::arg("grid"), py::arg("u1"), py::arg("u1t"), py::arg("threshold") = 1e-8,
          py::arg("samples") = 2048);

    m.def("sl_check_2d", [](double coefficient) {
        auto rep = sl_check_2d(coefficient);
        py::dict out;
        out["roots"] = rep.roots;
        out["pass"] = rep.pass;
        out["sl_det"] = rep.sl_det;
        return out;
    });

    m.def("sl_check_3d",
          [](py::array_t<double> s1, py::array_t<double> s2, double xi1, double xi2) {
              double a[3][3], b[3][3];
              fill_strain(s1, a);
              fill_strain(s2, b);
              double xi[2] = {xi1, xi2};
              auto rep = sl_check_3d(a, b, xi);
              py::dict out;
              out["roots"] = rep.roots;
              out["upper_count"] = rep.upper_count;
              out["lower_count"] = rep.lower_count;
              out["sl_det"] = rep.sl_det;
              out["pass"] = rep.pass;
              return out;
          },
          py::arg("s1"), py::arg("s2"), py::arg("xi1"), py::arg("xi2"));

    m.def("verify_identity",
          [](const Grid& g, py::array_t<double> mu1, py::array_t<double> mu2,
             py::array_t<double> bc, double omega) {
              auto st = verify_identity(scalar_from(g, mu1), scalar_from(g, mu2),
                                        vector_from(g, bc), omega);
              py::dict out;
              out["coarse_residual"] = st.coarse_residual;
              out["fine_residual"] = st.fine_residual;
              out["order"] = st.order;
              return out;
          },
          py::arg("grid"), py::arg("mu1"), py::arg("mu2"), py::arg("boundary_data"),
          py::arg("omega") = 1.0);

    m.def("kernel_probe",
          [](const Grid& g, py::array_t<double> u1, double omega, int k, double threshold) {
              auto map = make_linearized_map(vector_from(g, u1), omega);
              auto res = kernel_probe(map, k, threshold);
              py::dict out;
              out["sigmas"] = res.sigmas;
              out["threshold"] = res.threshold;
              out["trivial"] = res.trivial;
              return out;
          },
          py::arg("grid"), py::arg("u1"), py::arg("omega") = 1.0, py::arg("k") = 4,
          py::arg("threshold") = 1e-6);

    m.def("write_vtk_scalar",
          [](const std::string& path, const std::string& name, const Grid& g,
             py::array_t<double> f) { io::write_vtk(path, name, scalar_from(g, f)); });
    m.def("read_vtk_scalar", [](const std::string& path) {
        ScalarField f = io::read_vtk_scalar(path);
        py::dict out;
        out["dim"] = f.grid.dim;
        std::vector<int> c(f.grid.cells.begin(), f.grid.cells.begin() + f.grid.dim);
        out["cells"] = c;
        out["values"] = to_array(f.values);
        return out;
    });
}
