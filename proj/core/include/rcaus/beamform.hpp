#pragma once

#include <array>
#include <span>
#include <vector>

#include "rcaus/array3.hpp"
#include "rcaus/datasets.hpp"
#include "rcaus/geometry.hpp"
#include "rcaus/schemes.hpp"

namespace rcaus {

struct VolumeGrid {
  Vec3 origin;                             // position of voxel (0, 0, 0), m
  std::array<double, 3> spacing{0, 0, 0};  // m
  std::array<std::size_t, 3> counts{0, 0, 0};

  /// Throws std::invalid_argument for nonpositive spacing, empty axes, or more
  /// than max_voxels voxels.
  void validate(std::size_t max_voxels) const;
  std::size_t voxel_count() const { return counts[0] * counts[1] * counts[2]; }
  double coordinate(Axis axis, std::size_t i) const;
  Vec3 position(std::size_t i, std::size_t j, std::size_t k) const {
    return {coordinate(Axis::x, i), coordinate(Axis::y, j), coordinate(Axis::z, k)};
  }

  /// Grid of the given counts centered on `center`.
  static VolumeGrid centered(Vec3 center, std::array<double, 3> spacing, std::array<std::size_t, 3> counts);

  friend bool operator==(const VolumeGrid&, const VolumeGrid&) = default;
};

enum class Apodization { none, hann };

struct BeamformConfig {
  double f_number = 1.0;  // 0 disables the aperture gate
  Apodization apodization = Apodization::hann;
  std::size_t max_voxels = std::size_t{1} << 26;
  int threads = 1;

  friend bool operator==(const BeamformConfig&, const BeamformConfig&) = default;
};

/// Coherent delay-and-sum output, voxels indexed (x, y, z) with z contiguous.
struct Volume {
  VolumeGrid grid;
  Array3<cplx> voxels;

  Array3<double> envelope() const;
  /// 20 log10(envelope / max), floored at -300 dB. All -300 for an all-zero volume.
  Array3<double> decibels() const;
};

/// Receive aperture weight of an element offset by `offset` from the voxel at
/// depth z along one axis. The gate half-width is z / (2 F#); F# = 0 disables it.
double aperture_weight(double offset, double z, double f_number, Apodization apod);

/// Beamform decoded 2D apertures. data stacks one (R, C, T) aperture per
/// transmit model along the first axis: rows = models.size() * R.
/// Receive delay is |v - x_rc| / c; weights are separable in x and y.
Volume das_volume(const DecodedAperture<cplx>& data, const ArrayGeometry& geom, std::span<const TxDelayModel> models,
                  const VolumeGrid& grid, const BeamformConfig& cfg, double c);

/// Beamform unencoded column data, one event per transmit model. Receive delay
/// is sqrt((x - x_c)^2 + z^2) / c (cylindrical focusing); only x is gated.
Volume das_volume(const EventChannelData<cplx>& data, const ArrayGeometry& geom, std::span<const TxDelayModel> models,
                  const VolumeGrid& grid, const BeamformConfig& cfg, double c);

/// 2D view of a volume. For a z projection rows run along y and columns along x;
/// for x and y projections rows run along z.
struct Image2D {
  Axis row_axis = Axis::y;
  Axis col_axis = Axis::x;
  std::size_t rows = 0;
  std::size_t cols = 0;
  double row_origin = 0.0;
  double row_spacing = 0.0;
  double col_origin = 0.0;
  double col_spacing = 0.0;
  std::vector<double> values;  // row-major

  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

/// Envelope maximum over the voxel layers whose coordinate along `axis` lies in
/// [center - thickness / 2, center + thickness / 2]. Throws std::invalid_argument
/// when no layer falls in the slab.
Image2D mip(const Volume& volume, Axis axis, double center, double thickness);

}  // namespace rcaus
