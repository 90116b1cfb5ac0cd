#pragma once

#include "rcaus/types.hpp"

namespace rcaus {

// Coordinate convention: rows are long in x and stacked along y, columns are
// long in y and stacked along x, z is depth. Transmit and bias act on rows,
// receive happens on columns. The aperture is centered on the origin.

struct ArrayGeometry {
  int row_count = 0;
  int col_count = 0;
  double pitch = 0.0;             // m
  double kerf = 0.0;              // m
  double center_frequency = 0.0;  // Hz

  /// Throws std::invalid_argument if any invariant is violated.
  void validate() const;

  double row_y(int r) const { return (r - 0.5 * (row_count - 1)) * pitch; }
  double col_x(int c) const { return (c - 0.5 * (col_count - 1)) * pitch; }

  /// Aperture extent along x (spanned by the columns).
  double width_x() const { return col_count * pitch; }
  /// Aperture extent along y (spanned by the rows).
  double width_y() const { return row_count * pitch; }
  double element_width() const { return pitch - kerf; }

  friend bool operator==(const ArrayGeometry&, const ArrayGeometry&) = default;
};

struct MediumSpec {
  double speed_of_sound = 0.0;      // m/s
  double sampling_frequency = 0.0;  // Hz

  void validate() const;

  friend bool operator==(const MediumSpec&, const MediumSpec&) = default;
};

struct Line {
  Vec3 point;
  Vec3 direction;
};

/// Centerline of row r: y = y_r, z = 0, running along x.
Line row_centerline(const ArrayGeometry& geom, int r);

/// Centerline of column c: x = x_c, z = 0, running along y.
Line column_centerline(const ArrayGeometry& geom, int c);

/// Virtual element at the intersection of row r and column c.
Vec3 crossing_position(const ArrayGeometry& geom, int r, int c);

}  // namespace rcaus
