#include "rcaus/geometry.hpp"

#include <stdexcept>
#include <string>

namespace rcaus {

void ArrayGeometry::validate() const {
  if (row_count < 1 || col_count < 1) throw std::invalid_argument("geometry: row and column counts must be >= 1");
  if (!(kerf >= 0.0)) throw std::invalid_argument("geometry: kerf must be >= 0");
  if (!(pitch > kerf)) throw std::invalid_argument("geometry: pitch must exceed kerf");
  if (!(center_frequency > 0.0)) throw std::invalid_argument("geometry: center frequency must be > 0");
}

void MediumSpec::validate() const {
  if (!(speed_of_sound > 0.0)) throw std::invalid_argument("medium: speed of sound must be > 0");
  if (!(sampling_frequency > 0.0)) throw std::invalid_argument("medium: sampling frequency must be > 0");
}

namespace {

void check_index(int i, int n, const char* what) {
  if (i < 0 || i >= n)
    throw std::out_of_range(std::string(what) + " index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(n) + ")");
}

}  // namespace

Line row_centerline(const ArrayGeometry& geom, int r) {
  check_index(r, geom.row_count, "row");
  return {{0.0, geom.row_y(r), 0.0}, {1.0, 0.0, 0.0}};
}

Line column_centerline(const ArrayGeometry& geom, int c) {
  check_index(c, geom.col_count, "column");
  return {{geom.col_x(c), 0.0, 0.0}, {0.0, 1.0, 0.0}};
}

Vec3 crossing_position(const ArrayGeometry& geom, int r, int c) {
  check_index(r, geom.row_count, "row");
  check_index(c, geom.col_count, "column");
  return {geom.col_x(c), geom.row_y(r), 0.0};
}

}  // namespace rcaus
