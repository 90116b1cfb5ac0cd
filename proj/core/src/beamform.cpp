#include "rcaus/beamform.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcaus/parallel.hpp"

namespace rcaus {

void VolumeGrid::validate(std::size_t max_voxels) const {
  for (std::size_t a = 0; a < 3; ++a) {
    if (!(spacing[a] > 0)) throw std::invalid_argument("volume grid: spacing must be > 0 on every axis");
    if (counts[a] == 0) throw std::invalid_argument("volume grid: counts must be > 0 on every axis");
  }
  if (voxel_count() > max_voxels || counts[0] > max_voxels || counts[1] > max_voxels || counts[2] > max_voxels)
    throw std::invalid_argument("volume grid: " + std::to_string(voxel_count()) + " voxels exceed the budget of " +
                                std::to_string(max_voxels));
}

double VolumeGrid::coordinate(Axis axis, std::size_t i) const {
  const auto a = static_cast<std::size_t>(axis);
  const double o = a == 0 ? origin.x : a == 1 ? origin.y : origin.z;
  return o + static_cast<double>(i) * spacing[a];
}

VolumeGrid VolumeGrid::centered(Vec3 center, std::array<double, 3> spacing, std::array<std::size_t, 3> counts) {
  VolumeGrid g;
  g.spacing = spacing;
  g.counts = counts;
  auto half = [&](std::size_t a) { return 0.5 * static_cast<double>(counts[a] - 1) * spacing[a]; };
  g.origin = {center.x - half(0), center.y - half(1), center.z - half(2)};
  return g;
}

Array3<double> Volume::envelope() const {
  Array3<double> env(voxels.dim(0), voxels.dim(1), voxels.dim(2));
  auto src = voxels.flat();
  auto dst = env.flat();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = std::abs(src[i]);
  return env;
}

Array3<double> Volume::decibels() const {
  auto env = envelope();
  double peak = 0.0;
  for (double v : env.flat()) peak = std::max(peak, v);
  for (double& v : env.flat()) v = peak > 0 && v > 0 ? std::max(-300.0, 20.0 * std::log10(v / peak)) : -300.0;
  return env;
}

double aperture_weight(double offset, double z, double f_number, Apodization apod) {
  if (f_number <= 0) return 1.0;
  const double half = z / (2.0 * f_number);
  if (!(std::abs(offset) <= half)) return 0.0;
  if (apod == Apodization::none) return 1.0;
  const double c = std::cos(0.5 * kPi * offset / half);
  return c * c;
}

namespace {

struct Element {
  std::size_t offset;  // first sample of the element's lane within a dataset block, in doubles
  double delay;        // receive delay in samples
  double wr, wi;       // apodization times receive phasor
};

struct Layout {
  std::size_t rows_per_dataset;  // R for decoded apertures, 1 for column data
  bool spherical;                // receive at crossings vs cylindrical column focus
};

template <class Data>
void check_common(const Data& data, const ArrayGeometry& geom, std::span<const TxDelayModel> models,
                  const VolumeGrid& grid, const BeamformConfig& cfg, double c) {
  geom.validate();
  grid.validate(cfg.max_voxels);
  if (!(c > 0)) throw std::invalid_argument("beamform: speed of sound must be > 0");
  if (cfg.f_number < 0) throw std::invalid_argument("beamform: f_number must be >= 0");
  if (!(data.carrier > 0)) throw std::invalid_argument("beamform: input carries no carrier frequency (not demodulated IQ)");
  if (!(data.sample_rate > 0)) throw std::invalid_argument("beamform: input sample rate must be > 0");
  if (data.samples.dim(1) != static_cast<std::size_t>(geom.col_count))
    throw std::invalid_argument("beamform: input has " + std::to_string(data.samples.dim(1)) + " columns, geometry " +
                                std::to_string(geom.col_count));
  if (models.empty()) throw std::invalid_argument("beamform: no transmit models");
}

Volume beamform(const Array3<cplx>& samples, double t0, double fs, double f0, Layout layout,
                const ArrayGeometry& geom, std::span<const TxDelayModel> models, const VolumeGrid& grid,
                const BeamformConfig& cfg, double c) {
  Volume vol{grid, Array3<cplx>(grid.counts[0], grid.counts[1], grid.counts[2])};
  const std::size_t R = layout.rows_per_dataset;
  const std::size_t C = samples.dim(1);
  const std::size_t T = samples.dim(2);
  const std::size_t D = models.size();
  const double omega = 2 * kPi * f0;

  const double* base = reinterpret_cast<const double*>(samples.flat().data());
  const std::size_t block = 2 * R * C * T;  // doubles per dataset
  const double last = static_cast<double>(T) - 1.0;

  parallel_for(grid.counts[0] * grid.counts[1], cfg.threads, [&](std::size_t begin, std::size_t end) {
    std::vector<Element> active;
    std::vector<double> wx(C), wy(R);
    for (std::size_t ij = begin; ij < end; ++ij) {
      const std::size_t i = ij / grid.counts[1];
      const std::size_t j = ij % grid.counts[1];
      for (std::size_t k = 0; k < grid.counts[2]; ++k) {
        const Vec3 v = grid.position(i, j, k);
        for (std::size_t cc = 0; cc < C; ++cc)
          wx[cc] = aperture_weight(v.x - geom.col_x(static_cast<int>(cc)), v.z, cfg.f_number, cfg.apodization);
        for (std::size_t r = 0; r < R; ++r)
          wy[r] = layout.spherical
                      ? aperture_weight(v.y - geom.row_y(static_cast<int>(r)), v.z, cfg.f_number, cfg.apodization)
                      : 1.0;
        active.clear();
        for (std::size_t r = 0; r < R; ++r) {
          if (wy[r] == 0.0) continue;
          for (std::size_t cc = 0; cc < C; ++cc) {
            const double w = wx[cc] * wy[r];
            if (w == 0.0) continue;
            const double dx = v.x - geom.col_x(static_cast<int>(cc));
            const double dy = layout.spherical ? v.y - geom.row_y(static_cast<int>(r)) : 0.0;
            const double t_rx = std::sqrt(dx * dx + dy * dy + v.z * v.z) / c;
            const double phase = omega * t_rx;
            active.push_back({2 * (r * C + cc) * T, t_rx * fs, w * std::cos(phase), w * std::sin(phase)});
          }
        }
        double tr = 0.0, ti = 0.0;
        for (std::size_t d = 0; d < D; ++d) {
          const double t_tx = models[d].transmit_time(v, c);
          const double shift = (t_tx - t0) * fs;
          const double* data = base + d * block;
          double ar = 0.0, ai = 0.0;
          for (const Element& el : active) {
            const double pos = shift + el.delay;
            // Samples beyond either end contribute nothing.
            if (!(pos >= 0.0) || !(pos < last)) continue;
            const auto n = static_cast<std::size_t>(pos);
            const double f = pos - static_cast<double>(n);
            const double* s = data + el.offset + 2 * n;
            const double re = s[0] + f * (s[2] - s[0]);
            const double im = s[1] + f * (s[3] - s[1]);
            ar += re * el.wr - im * el.wi;
            ai += re * el.wi + im * el.wr;
          }
          const double phase = omega * t_tx;
          const double cr = std::cos(phase), ci = std::sin(phase);
          tr += ar * cr - ai * ci;
          ti += ar * ci + ai * cr;
        }
        vol.voxels(i, j, k) = {tr, ti};
      }
    }
  });
  return vol;
}

}  // namespace

Volume das_volume(const DecodedAperture<cplx>& data, const ArrayGeometry& geom, std::span<const TxDelayModel> models,
                  const VolumeGrid& grid, const BeamformConfig& cfg, double c) {
  check_common(data, geom, models, grid, cfg, c);
  const auto R = static_cast<std::size_t>(geom.row_count);
  if (data.row_count() != models.size() * R)
    throw std::invalid_argument("beamform: decoded data holds " + std::to_string(data.row_count()) + " rows but " +
                                std::to_string(models.size()) + " transmit models need " +
                                std::to_string(models.size() * R));
  return beamform(data.samples, data.t0, data.sample_rate, data.carrier, {R, true}, geom, models, grid, cfg, c);
}

Volume das_volume(const EventChannelData<cplx>& data, const ArrayGeometry& geom, std::span<const TxDelayModel> models,
                  const VolumeGrid& grid, const BeamformConfig& cfg, double c) {
  check_common(data, geom, models, grid, cfg, c);
  if (data.event_count() != models.size())
    throw std::invalid_argument("beamform: " + std::to_string(data.event_count()) + " events but " +
                                std::to_string(models.size()) + " transmit models");
  return beamform(data.samples, data.t0, data.sample_rate, data.carrier, {1, false}, geom, models, grid, cfg, c);
}

Image2D mip(const Volume& volume, Axis axis, double center, double thickness) {
  if (!(thickness >= 0)) throw std::invalid_argument("mip: slab thickness must be >= 0");
  const auto& g = volume.grid;
  const auto a = static_cast<std::size_t>(axis);
  const double tol = 1e-6 * g.spacing[a];
  std::vector<std::size_t> layers;
  for (std::size_t i = 0; i < g.counts[a]; ++i)
    if (std::abs(g.coordinate(axis, i) - center) <= 0.5 * thickness + tol) layers.push_back(i);
  if (layers.empty())
    throw std::invalid_argument("mip: slab at " + std::to_string(center) + " m does not intersect the grid");

  Image2D img;
  if (axis == Axis::z) {
    img.row_axis = Axis::y;
    img.col_axis = Axis::x;
  } else {
    img.row_axis = Axis::z;
    img.col_axis = axis == Axis::x ? Axis::y : Axis::x;
  }
  const auto ra = static_cast<std::size_t>(img.row_axis);
  const auto ca = static_cast<std::size_t>(img.col_axis);
  img.rows = g.counts[ra];
  img.cols = g.counts[ca];
  img.row_origin = g.coordinate(img.row_axis, 0);
  img.col_origin = g.coordinate(img.col_axis, 0);
  img.row_spacing = g.spacing[ra];
  img.col_spacing = g.spacing[ca];
  img.values.assign(img.rows * img.cols, 0.0);

  const auto env = volume.envelope();
  std::array<std::size_t, 3> idx{};
  for (std::size_t r = 0; r < img.rows; ++r)
    for (std::size_t c = 0; c < img.cols; ++c) {
      double best = 0.0;
      for (std::size_t layer : layers) {
        idx[a] = layer;
        idx[ra] = r;
        idx[ca] = c;
        best = std::max(best, env(idx[0], idx[1], idx[2]));
      }
      img.at(r, c) = best;
    }
  return img;
}

}  // namespace rcaus
