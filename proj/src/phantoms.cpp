#include "mre/phantoms.hpp"

#include <cmath>
#include <random>

#include "mre/stokes.hpp"

namespace mre {

namespace {

double bump(double r, double radius, double width) {
    if (r >= radius) return 0.0;
    double t = r / radius;
    return std::exp(-(r * r / (2.0 * width * width)) / (1.0 - t * t));
}

struct TrigMode {
    double amp;
    double kx, ky, kz;    ///< angular frequencies
    double px, py, pz;    ///< phases
};

/// value and gradient of sum_j amp cos(kx x+px) cos(ky y+py) cos(kz z+pz)
struct TrigSum {
    std::vector<TrigMode> modes;

    double value(double x, double y, double z) const {
        double s = 0.0;
        for (const auto& m : modes)
            s += m.amp * std::cos(m.kx * x + m.px) * std::cos(m.ky * y + m.py) *
                 std::cos(m.kz * z + m.pz);
        return s;
    }
    double d(int axis, double x, double y, double z) const {
        double s = 0.0;
        for (const auto& m : modes) {
            double cx = std::cos(m.kx * x + m.px), sx = std::sin(m.kx * x + m.px);
            double cy = std::cos(m.ky * y + m.py), sy = std::sin(m.ky * y + m.py);
            double cz = std::cos(m.kz * z + m.pz), sz = std::sin(m.kz * z + m.pz);
            if (axis == 0)
                s += -m.amp * m.kx * sx * cy * cz;
            else if (axis == 1)
                s += -m.amp * m.ky * cx * sy * cz;
            else
                s += -m.amp * m.kz * cx * cy * sz;
        }
        return s;
    }
};

TrigSum draw_trig(std::mt19937_64& rng, const Grid& g, int max_mode) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
    TrigSum ts;
    const int mz = g.dim == 3 ? max_mode : 0;
    for (int kx = 0; kx <= max_mode; ++kx)
        for (int ky = 0; ky <= max_mode; ++ky)
            for (int kz = 0; kz <= mz; ++kz) {
                if (kx == 0 && ky == 0 && kz == 0) continue;
                TrigMode m;
                m.amp = gauss(rng) / (1.0 + kx + ky + kz);
                m.kx = M_PI * kx / g.extent[0];
                m.ky = M_PI * ky / g.extent[1];
                m.kz = g.dim == 3 ? M_PI * kz / g.extent[2] : 0.0;
                m.px = phase(rng);
                m.py = phase(rng);
                m.pz = g.dim == 3 ? phase(rng) : 0.0;
                ts.modes.push_back(m);
            }
    return ts;
}

/// Outward normal direction per boundary node (axis faces summed at edges
/// and corners).
VectorField normal_field(const Grid& g) {
    VectorField nf(g);
    g.for_nodes([&](const Index3& ix, std::int64_t id) {
        for (int a = 0; a < g.dim; ++a) {
            if (ix[a] == 0) nf.at(a, id) -= 1.0;
            if (ix[a] == g.cells[a]) nf.at(a, id) += 1.0;
        }
    });
    return nf;
}

void project_compatible(VectorField& f) {
    VectorField nf = normal_field(f.grid);
    double area = boundary_flux(nf);
    double defect = boundary_flux(f);
    if (area <= 0.0) return;
    const double c = defect / area;
    const std::int64_t n = f.grid.num_nodes();
    f.grid.for_nodes([&](const Index3& ix, std::int64_t id) {
        if (!f.grid.on_boundary(ix)) return;
        for (int a = 0; a < f.grid.dim; ++a)
            f.values[std::size_t(a * n + id)] -= c * nf.at(a, id);
    });
}

}  // namespace

ScalarField make_phantom(const PhantomSpec& spec, const Grid& grid, double mu_min) {
    ScalarField mu = ScalarField::from(grid, [&](double x, double y, double z) {
        double v = spec.background;
        for (const auto& inc : spec.inclusions) {
            double dx = x - inc.center[0];
            double dy = y - inc.center[1];
            double dz = grid.dim == 3 ? z - inc.center[2] : 0.0;
            double r = std::sqrt(dx * dx + dy * dy + dz * dz);
            v += spec.background * inc.contrast * bump(r, inc.radius, inc.width);
        }
        return v;
    });
    if (mu.min() < mu_min)
        throw ContrastViolation("phantom drops below the admissible minimum");
    return mu;
}

ExcitationKind excitation_kind_from(const std::string& name) {
    if (name == "shear") return ExcitationKind::Shear;
    if (name == "rotation") return ExcitationKind::Rotation;
    if (name == "random") return ExcitationKind::RandomSolenoidal;
    throw ConfigError("unknown excitation kind: " + name);
}

VectorField make_excitation(const ExcitationSpec& spec, const Grid& grid) {
    VectorField f(grid);
    const double a = spec.amplitude;
    switch (spec.kind) {
        case ExcitationKind::Shear:
            f = VectorField::from(grid, grid.dim == 2
                    ? std::vector<VectorField::Fn>{[a](double, double y, double) { return a * y; },
                                                   [](double, double, double) { return 0.0; }}
                    : std::vector<VectorField::Fn>{[a](double, double y, double) { return a * y; },
                                                   [](double, double, double) { return 0.0; },
                                                   [](double, double, double) { return 0.0; }});
            break;
        case ExcitationKind::Rotation: {
            const double cx = grid.extent[0] / 2.0, cy = grid.extent[1] / 2.0;
            std::vector<VectorField::Fn> comps = {
                [a, cy](double, double y, double) { return -a * (y - cy); },
                [a, cx](double x, double, double) { return a * (x - cx); }};
            if (grid.dim == 3) comps.push_back([](double, double, double) { return 0.0; });
            f = VectorField::from(grid, comps);
            break;
        }
        case ExcitationKind::RandomSolenoidal: {
            if (spec.modes < 1) throw ConfigError("random excitation needs modes >= 1");
            std::mt19937_64 rng(spec.seed);
            if (grid.dim == 2) {
                TrigSum psi = draw_trig(rng, grid, spec.modes);
                f = VectorField::from(grid, {[&](double x, double y, double z) {
                                                 return a * psi.d(1, x, y, z);
                                             },
                                             [&](double x, double y, double z) {
                                                 return -a * psi.d(0, x, y, z);
                                             }});
            } else {
                TrigSum ax = draw_trig(rng, grid, spec.modes);
                TrigSum ay = draw_trig(rng, grid, spec.modes);
                TrigSum az = draw_trig(rng, grid, spec.modes);
                f = VectorField::from(
                    grid,
                    {[&](double x, double y, double z) { return a * (az.d(1, x, y, z) - ay.d(2, x, y, z)); },
                     [&](double x, double y, double z) { return a * (ax.d(2, x, y, z) - az.d(0, x, y, z)); },
                     [&](double x, double y, double z) { return a * (ay.d(0, x, y, z) - ax.d(1, x, y, z)); }});
            }
            break;
        }
    }
    project_compatible(f);
    return f;
}

VectorField add_noise(const VectorField& u, double level, std::uint64_t seed) {
    if (level < 0.0) throw ConfigError("noise level must be nonnegative");
    VectorField out = u;
    if (level == 0.0) return out;
    double ms = 0.0;
    for (double v : u.values) ms += v * v;
    double rms = std::sqrt(ms / double(u.values.size()));
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, level * rms);
    for (double& v : out.values) v += gauss(rng);
    return out;
}

}  // namespace mre
