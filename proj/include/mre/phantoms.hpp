#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mre/fields.hpp"

namespace mre {

struct Inclusion {
    std::array<double, 3> center = {0.5, 0.5, 0.5};
    double radius = 0.3;     ///< support radius; the bump vanishes outside
    double contrast = 0.2;   ///< peak value relative to background
    double width = 0.1;      ///< decay length of the profile
};

struct PhantomSpec {
    double background = 1.0;
    std::vector<Inclusion> inclusions;
};

/// Smooth (C-infinity) phantom: background plus compactly supported bumps,
/// each peaking at exactly background * (1 + contrast) when isolated.
ScalarField make_phantom(const PhantomSpec& spec, const Grid& grid, double mu_min = 1e-9);

enum class ExcitationKind { Shear, Rotation, RandomSolenoidal };

struct ExcitationSpec {
    ExcitationKind kind = ExcitationKind::Shear;
    double amplitude = 1.0;
    int modes = 2;            ///< trigonometric mode cutoff for random draws
    std::uint64_t seed = 0;
};

ExcitationKind excitation_kind_from(const std::string& name);

/// Divergence-free excitation field on the full grid; the solver reads its
/// boundary trace. The discrete boundary flux is projected to zero, so
/// compatibility holds to round-off.
VectorField make_excitation(const ExcitationSpec& spec, const Grid& grid);

/// i.i.d. Gaussian perturbation with standard deviation level * RMS(u).
VectorField add_noise(const VectorField& u, double level, std::uint64_t seed);

}  // namespace mre
