#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rcaus/beamform.hpp"
#include "rcaus/scatterers.hpp"

namespace rcaus {

/// Width at half of profile[peak], with both crossings placed by linear
/// interpolation between the bracketing samples. nullopt when the profile does
/// not drop to half maximum on both sides.
std::optional<double> fwhm_profile(std::span<const double> profile, std::size_t peak, double spacing);

/// FWHM through voxel `peak` of an envelope volume along `axis`.
std::optional<double> fwhm(const Array3<double>& envelope, const VolumeGrid& grid, std::array<std::size_t, 3> peak,
                           Axis axis);

struct ResolutionOptions {
  double search_radius = 0.5e-3;  // m, around each phantom point
};

enum class PeakStatus { ok, no_peak, unbounded, merged };
std::string_view to_string(PeakStatus s);

struct PointResolution {
  Vec3 target;
  Vec3 peak;
  PeakStatus status = PeakStatus::no_peak;
  std::array<std::optional<double>, 3> fwhm;  // x (lateral), y (elevational), z (axial), m
  std::array<double, 2> f_number{0, 0};        // depth / aperture width along x and y
  std::array<double, 3> normalized{0, 0, 0};   // fwhm / (lambda F#); z uses the x F#
};

struct AxisStats {
  double mean = 0.0;
  double stddev = 0.0;  // sample standard deviation, 0 for a single point
  std::size_t count = 0;
};

struct ResolutionReport {
  double wavelength = 0.0;
  std::vector<PointResolution> points;
  std::array<AxisStats, 3> raw;
  std::array<AxisStats, 3> normalized;
  std::size_t excluded = 0;
};

/// Match every phantom point with the nearest envelope local maximum within the
/// search radius (maxima below -6 dB of the local peak are ignored), measure the
/// tri-axial FWHM and aggregate points with status ok.
ResolutionReport resolution_report(const Volume& volume, const ScattererField& phantom, const ArrayGeometry& geom,
                                   double c, const ResolutionOptions& options = {});

/// Same, with one volume per phantom point (patches[i] images phantom point i).
ResolutionReport resolution_report(std::span<const Volume> patches, const ScattererField& phantom,
                                   const ArrayGeometry& geom, double c, const ResolutionOptions& options = {});

/// 1 - sum_b min(h_in(b), h_out(b)), histograms normalized to unit sum over
/// bin_count bins on shared edges spanning the union of both sets.
double gcnr(std::span<const double> inside, std::span<const double> outside, std::size_t bin_count = 256);

struct Sphere {
  Vec3 center;
  double radius = 0.0;
  friend bool operator==(const Sphere&, const Sphere&) = default;
};

struct GcnrTarget {
  Sphere sphere;
  double erosion = 0.0;
  std::size_t inside_count = 0;
  std::size_t outside_count = 0;
  double value = 0.0;
};

struct GcnrOptions {
  std::size_t bins = 256;
  /// ROI erosion in m; 0 means one theoretical FWHM, 1.4 lambda F# at the sphere center depth.
  double erosion = 0.0;
};

/// Inside: envelope voxels within radius - erosion of the center. Background:
/// voxels at distance >= radius + erosion whose depth lies within radius - erosion
/// of the center depth, nearest first, as many as the inside set.
GcnrTarget gcnr_target(const Volume& volume, const Sphere& sphere, const ArrayGeometry& geom, double c,
                       const GcnrOptions& options = {});

// CSV schemas (header line first, one row per point/target, then aggregates):
//   resolution: point,x,y,z,peak_x,peak_y,peak_z,status,fwhm_x,fwhm_y,fwhm_z,fnum_x,fnum_y,norm_x,norm_y,norm_z
//               followed by "mean" and "std" rows over points with status ok
//   gcnr:       target,x,y,z,radius,erosion,inside_count,outside_count,gcnr followed by a "mean" row
void write_resolution_csv(std::ostream& out, const ResolutionReport& report);
void write_gcnr_csv(std::ostream& out, std::span<const GcnrTarget> targets);

}  // namespace rcaus
