#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "rcaus/metrics.hpp"
#include "rcaus/scatterers.hpp"

namespace rcaus {

/// Closed interval [min, max] along one axis, m.
struct Extent {
  double min = 0.0;
  double max = 0.0;
  friend bool operator==(const Extent&, const Extent&) = default;
};

struct GridPhantomSpec {
  std::array<Extent, 3> extents;         // x, y, z
  std::array<double, 3> spacing{0, 0, 0};  // m
  double amplitude = 1.0;

  friend bool operator==(const GridPhantomSpec&, const GridPhantomSpec&) = default;
};

/// Lattice points per axis: floor(span / spacing) + 1, centered within the extent.
/// Throws std::invalid_argument for nonpositive spacing, inverted extents or z <= 0.
ScattererField make_grid(const GridPhantomSpec& spec);

struct CystPhantomSpec {
  double density = 0.0;  // scatterers per m^3
  Vec3 region_min;
  Vec3 region_max;
  std::vector<Sphere> spheres;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  friend bool operator==(const CystPhantomSpec&, const CystPhantomSpec&) = default;
};

struct CystPhantom {
  ScattererField field;
  std::vector<std::string> warnings;
};

/// round(density * region volume) uniform positions with standard-normal
/// amplitudes, drawn from Philox4x64(seed, stream) in the order x, y, z,
/// amplitude per scatterer; those strictly inside a sphere are then dropped.
/// Warns when a sphere would hold fewer than 100 scatterers at this density.
CystPhantom make_cyst(const CystPhantomSpec& spec);

}  // namespace rcaus
