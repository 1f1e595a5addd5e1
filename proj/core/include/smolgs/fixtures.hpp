#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "smolgs/types.hpp"

namespace smolgs {

enum class FixtureKind { kSphere, kCube, kGaussianMixture };

/// "sphere", "cube" or "gaussian-mixture"; anything else is kInvalidConfig.
FixtureKind parse_fixture_kind(std::string_view name);
std::string_view fixture_name(FixtureKind kind);

struct MixtureComponent {
  Vec3 mean;
  double stddev;  // isotropic
};

/// Components of the gaussian-mixture kind, drawn with equal probability.
inline constexpr std::array<MixtureComponent, 3> kMixtureComponents = {{
    {{-1.0, 0.0, 0.0}, 0.15},
    {{1.0, 0.5, 0.0}, 0.25},
    {{0.0, -0.5, 1.0}, 0.10},
}};

struct Fixture {
  SplatCloud cloud;
  std::vector<int> labels;  // mixture component per splat; empty otherwise
};

/// Deterministic synthetic cloud; identical for a given seed on every
/// platform.
///   sphere: x = g/|g| for g ~ N(0, I), i.e. uniform on the unit sphere.
///   cube: x ~ U[-1, 1)^3.
///   gaussian-mixture: component k uniform, x ~ N(mean_k, stddev_k^2 I).
/// Features: f_k = x_{k mod 3} * (k + 1) / n_f + 0.05 * N(0, 1).
/// Scaling: s_k = 0.01 * (0.5 + U[0, 1)).
Fixture make_fixture(FixtureKind kind, std::size_t count, int n_f, std::uint64_t seed);

}  // namespace smolgs
