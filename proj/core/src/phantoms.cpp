#include "rcaus/phantoms.hpp"

#include <cmath>
#include <stdexcept>

#include "rcaus/rng.hpp"

namespace rcaus {

ScattererField make_grid(const GridPhantomSpec& spec) {
  std::array<std::vector<double>, 3> axis;
  for (std::size_t a = 0; a < 3; ++a) {
    const auto [lo, hi] = spec.extents[a];
    if (!(spec.spacing[a] > 0)) throw std::invalid_argument("grid phantom: spacing must be > 0");
    if (!(hi >= lo)) throw std::invalid_argument("grid phantom: extent max must not be below min");
    const double span = hi - lo;
    const auto n = static_cast<std::size_t>(std::floor(span / spec.spacing[a] + 1e-9)) + 1;
    const double first = lo + 0.5 * (span - static_cast<double>(n - 1) * spec.spacing[a]);
    for (std::size_t i = 0; i < n; ++i) axis[a].push_back(first + static_cast<double>(i) * spec.spacing[a]);
  }
  if (!(axis[2].front() > 0)) throw std::invalid_argument("grid phantom: points must lie at z > 0");
  ScattererField field;
  for (double z : axis[2])
    for (double y : axis[1])
      for (double x : axis[0]) field.add({x, y, z}, spec.amplitude);
  return field;
}

CystPhantom make_cyst(const CystPhantomSpec& spec) {
  const Vec3 lo = spec.region_min, hi = spec.region_max;
  if (!(hi.x > lo.x && hi.y > lo.y && hi.z > lo.z)) throw std::invalid_argument("cyst phantom: empty region");
  if (!(lo.z > 0)) throw std::invalid_argument("cyst phantom: region must lie at z > 0");
  if (!(spec.density > 0)) throw std::invalid_argument("cyst phantom: density must be > 0");
  for (const auto& s : spec.spheres) {
    if (!(s.radius > 0)) throw std::invalid_argument("cyst phantom: sphere radius must be > 0");
    const Vec3 c = s.center;
    if (c.x < lo.x || c.x > hi.x || c.y < lo.y || c.y > hi.y || c.z < lo.z || c.z > hi.z)
      throw std::invalid_argument("cyst phantom: sphere center outside the region");
  }

  CystPhantom out;
  const double volume = (hi.x - lo.x) * (hi.y - lo.y) * (hi.z - lo.z);
  const double expected = spec.density * volume;
  if (expected > 5e8) throw std::invalid_argument("cyst phantom: more than 5e8 scatterers requested");
  const auto count = static_cast<std::size_t>(std::llround(expected));
  for (std::size_t i = 0; i < spec.spheres.size(); ++i) {
    const double r = spec.spheres[i].radius;
    const double per_sphere = spec.density * 4.0 / 3.0 * kPi * r * r * r;
    if (per_sphere < 100.0)
      out.warnings.push_back("sphere " + std::to_string(i) + " spans only " + std::to_string(per_sphere) +
                             " scatterers at this density; contrast metrics will be unreliable");
  }

  Philox4x64 rng(spec.seed, spec.stream);
  for (std::size_t i = 0; i < count; ++i) {
    const Vec3 p{lo.x + rng.uniform() * (hi.x - lo.x), lo.y + rng.uniform() * (hi.y - lo.y),
                 lo.z + rng.uniform() * (hi.z - lo.z)};
    const double a = rng.normal();
    bool hollow = false;
    for (const auto& s : spec.spheres) hollow = hollow || distance(p, s.center) < s.radius;
    if (!hollow) out.field.add(p, a);
  }
  return out;
}

}  // namespace rcaus
