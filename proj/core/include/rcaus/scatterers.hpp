#pragma once

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "rcaus/types.hpp"

namespace rcaus {

/// Point reflectors in front of the aperture (z > 0).
struct ScattererField {
  std::vector<Vec3> positions;
  std::vector<double> amplitudes;

  std::size_t size() const { return positions.size(); }
  bool empty() const { return positions.empty(); }
  void add(Vec3 p, double a) {
    positions.push_back(p);
    amplitudes.push_back(a);
  }
  void validate() const;

  friend bool operator==(const ScattererField&, const ScattererField&) = default;
};

// Text format: one scatterer per line, "x y z amplitude" in SI units; '#'
// starts a comment. Values are written in shortest round-trip form.

ScattererField read_scatterers(std::istream& in);
ScattererField read_scatterers(const std::filesystem::path& path);
void write_scatterers(std::ostream& out, const ScattererField& field);
void write_scatterers(const std::filesystem::path& path, const ScattererField& field);

}  // namespace rcaus
