#include "smolgs/fixtures.hpp"

#include <cmath>

#include "smolgs/error.hpp"
#include "smolgs/random.hpp"

namespace smolgs {

FixtureKind parse_fixture_kind(std::string_view name) {
  if (name == "sphere") return FixtureKind::kSphere;
  if (name == "cube") return FixtureKind::kCube;
  if (name == "gaussian-mixture") return FixtureKind::kGaussianMixture;
  fail(ErrorCode::kInvalidConfig, "unknown fixture kind '" + std::string(name) + "'");
}

std::string_view fixture_name(FixtureKind kind) {
  switch (kind) {
    case FixtureKind::kSphere: return "sphere";
    case FixtureKind::kCube: return "cube";
    case FixtureKind::kGaussianMixture: return "gaussian-mixture";
  }
  return "unknown";
}

Fixture make_fixture(FixtureKind kind, std::size_t count, int n_f, std::uint64_t seed) {
  if (count == 0) fail(ErrorCode::kInvalidConfig, "fixture count must be at least 1");
  if (n_f < 1 || n_f > 255) fail(ErrorCode::kInvalidConfig, "n_f must be in [1, 255]");
  SplitMix64 rng(seed);
  Fixture out;
  std::vector<Splat> splats(count);
  if (kind == FixtureKind::kGaussianMixture) out.labels.resize(count);
  for (std::size_t i = 0; i < count; ++i) {
    Splat& s = splats[i];
    switch (kind) {
      case FixtureKind::kSphere: {
        double norm = 0.0;
        Vec3 g;
        while (norm < 1e-3) {
          for (double& v : g) v = rng.normal();
          norm = std::sqrt(g[0] * g[0] + g[1] * g[1] + g[2] * g[2]);
        }
        for (int k = 0; k < 3; ++k) s.x[k] = g[k] / norm;
        break;
      }
      case FixtureKind::kCube:
        for (double& v : s.x) v = rng.uniform(-1.0, 1.0);
        break;
      case FixtureKind::kGaussianMixture: {
        const auto c = static_cast<int>(rng.below(kMixtureComponents.size()));
        out.labels[i] = c;
        const MixtureComponent& m = kMixtureComponents[static_cast<std::size_t>(c)];
        for (int k = 0; k < 3; ++k) s.x[k] = m.mean[k] + m.stddev * rng.normal();
        break;
      }
    }
    s.f.resize(static_cast<std::size_t>(n_f));
    for (int k = 0; k < n_f; ++k) {
      s.f[k] = s.x[k % 3] * (k + 1) / n_f + 0.05 * rng.normal();
    }
    for (double& v : s.s) v = 0.01 * (0.5 + rng.uniform());
  }
  out.cloud = make_cloud(std::move(splats), n_f);
  return out;
}

}  // namespace smolgs
