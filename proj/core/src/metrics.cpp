#include "rcaus/metrics.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace rcaus {

std::optional<double> fwhm_profile(std::span<const double> p, std::size_t peak, double spacing) {
  if (peak >= p.size()) throw std::out_of_range("fwhm: peak index outside the profile");
  const double half = 0.5 * p[peak];
  if (!(half > 0)) return std::nullopt;
  std::optional<double> left, right;
  for (std::size_t i = peak; i-- > 0;)
    if (p[i] <= half) {
      left = static_cast<double>(i) + (half - p[i]) / (p[i + 1] - p[i]);
      break;
    }
  for (std::size_t i = peak + 1; i < p.size(); ++i)
    if (p[i] <= half) {
      right = static_cast<double>(i) - (half - p[i]) / (p[i - 1] - p[i]);
      break;
    }
  if (!left || !right) return std::nullopt;
  return (*right - *left) * spacing;
}

std::optional<double> fwhm(const Array3<double>& env, const VolumeGrid& grid, std::array<std::size_t, 3> peak,
                           Axis axis) {
  const auto a = static_cast<std::size_t>(axis);
  std::vector<double> profile(env.dim(a));
  auto idx = peak;
  for (std::size_t i = 0; i < profile.size(); ++i) {
    idx[a] = i;
    profile[i] = env(idx[0], idx[1], idx[2]);
  }
  return fwhm_profile(profile, peak[a], grid.spacing[a]);
}

std::string_view to_string(PeakStatus s) {
  switch (s) {
    case PeakStatus::ok: return "ok";
    case PeakStatus::no_peak: return "no_peak";
    case PeakStatus::unbounded: return "unbounded";
    case PeakStatus::merged: return "merged";
  }
  return "?";
}

namespace {

bool local_max(const Array3<double>& env, std::size_t i, std::size_t j, std::size_t k) {
  const double v = env(i, j, k);
  if (!(v > 0)) return false;
  for (int di = -1; di <= 1; ++di)
    for (int dj = -1; dj <= 1; ++dj)
      for (int dk = -1; dk <= 1; ++dk) {
        if (di == 0 && dj == 0 && dk == 0) continue;
        const long ii = static_cast<long>(i) + di, jj = static_cast<long>(j) + dj, kk = static_cast<long>(k) + dk;
        if (ii < 0 || jj < 0 || kk < 0 || ii >= static_cast<long>(env.dim(0)) || jj >= static_cast<long>(env.dim(1)) ||
            kk >= static_cast<long>(env.dim(2)))
          continue;
        if (env(static_cast<std::size_t>(ii), static_cast<std::size_t>(jj), static_cast<std::size_t>(kk)) > v)
          return false;
      }
  return true;
}

struct PeakHit {
  std::array<std::size_t, 3> index;
  std::size_t volume;
};

std::optional<PeakHit> find_peak(const Array3<double>& env, const VolumeGrid& grid, Vec3 target, double radius,
                                 std::size_t volume_id) {
  double region_max = 0.0;
  std::vector<std::array<std::size_t, 3>> maxima;
  for (std::size_t i = 0; i < grid.counts[0]; ++i)
    for (std::size_t j = 0; j < grid.counts[1]; ++j)
      for (std::size_t k = 0; k < grid.counts[2]; ++k) {
        if (distance(grid.position(i, j, k), target) > radius) continue;
        region_max = std::max(region_max, env(i, j, k));
        if (local_max(env, i, j, k)) maxima.push_back({i, j, k});
      }
  std::optional<PeakHit> best;
  double best_d = INFINITY;
  for (const auto& m : maxima) {
    if (env(m[0], m[1], m[2]) < 0.5 * region_max) continue;
    const double d = distance(grid.position(m[0], m[1], m[2]), target);
    if (d < best_d) {
      best_d = d;
      best = PeakHit{m, volume_id};
    }
  }
  return best;
}

AxisStats stats(const std::vector<double>& v) {
  AxisStats s;
  s.count = v.size();
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() > 1) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

ResolutionReport build_report(std::span<const Volume> volumes, bool per_point, const ScattererField& phantom,
                              const ArrayGeometry& geom, double c, const ResolutionOptions& options) {
  geom.validate();
  if (!(c > 0)) throw std::invalid_argument("resolution report: speed of sound must be > 0");
  if (!(options.search_radius > 0)) throw std::invalid_argument("resolution report: search radius must be > 0");
  ResolutionReport rep;
  rep.wavelength = c / geom.center_frequency;
  std::vector<Array3<double>> env;
  for (const auto& v : volumes) env.push_back(v.envelope());

  std::vector<std::optional<PeakHit>> hits(phantom.size());
  for (std::size_t p = 0; p < phantom.size(); ++p) {
    const std::size_t vi = per_point ? p : 0;
    hits[p] = find_peak(env[vi], volumes[vi].grid, phantom.positions[p], options.search_radius, vi);
  }

  std::array<std::vector<double>, 3> raw, norm;
  for (std::size_t p = 0; p < phantom.size(); ++p) {
    PointResolution pr;
    pr.target = phantom.positions[p];
    pr.f_number = {pr.target.z / geom.width_x(), pr.target.z / geom.width_y()};
    if (!hits[p]) {
      pr.status = PeakStatus::no_peak;
    } else {
      const auto& h = *hits[p];
      const auto& grid = volumes[h.volume].grid;
      pr.peak = grid.position(h.index[0], h.index[1], h.index[2]);
      pr.status = PeakStatus::ok;
      if (!per_point)
        for (std::size_t q = 0; q < phantom.size(); ++q)
          if (q != p && hits[q] && hits[q]->index == h.index) pr.status = PeakStatus::merged;
      for (auto axis : {Axis::x, Axis::y, Axis::z}) {
        const auto a = static_cast<std::size_t>(axis);
        pr.fwhm[a] = fwhm(env[h.volume], grid, h.index, axis);
        if (!pr.fwhm[a] && pr.status == PeakStatus::ok) pr.status = PeakStatus::unbounded;
      }
      if (pr.status == PeakStatus::ok) {
        const std::array<double, 3> fn{pr.f_number[0], pr.f_number[1], pr.f_number[0]};
        for (std::size_t a = 0; a < 3; ++a) {
          pr.normalized[a] = *pr.fwhm[a] / (rep.wavelength * fn[a]);
          raw[a].push_back(*pr.fwhm[a]);
          norm[a].push_back(pr.normalized[a]);
        }
      }
    }
    if (pr.status != PeakStatus::ok) ++rep.excluded;
    rep.points.push_back(pr);
  }
  for (std::size_t a = 0; a < 3; ++a) {
    rep.raw[a] = stats(raw[a]);
    rep.normalized[a] = stats(norm[a]);
  }
  return rep;
}

}  // namespace

ResolutionReport resolution_report(const Volume& volume, const ScattererField& phantom, const ArrayGeometry& geom,
                                   double c, const ResolutionOptions& options) {
  return build_report({&volume, 1}, false, phantom, geom, c, options);
}

ResolutionReport resolution_report(std::span<const Volume> patches, const ScattererField& phantom,
                                   const ArrayGeometry& geom, double c, const ResolutionOptions& options) {
  if (patches.size() != phantom.size())
    throw std::invalid_argument("resolution report: " + std::to_string(patches.size()) + " patches for " +
                                std::to_string(phantom.size()) + " points");
  return build_report(patches, true, phantom, geom, c, options);
}

double gcnr(std::span<const double> inside, std::span<const double> outside, std::size_t bin_count) {
  if (inside.empty() || outside.empty()) throw std::invalid_argument("gcnr: both regions must be nonempty");
  if (bin_count == 0) throw std::invalid_argument("gcnr: bin count must be positive");
  double lo = INFINITY, hi = -INFINITY;
  for (auto set : {inside, outside})
    for (double v : set) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (!(hi > lo)) return 0.0;  // every sample in one bin
  const double width = (hi - lo) / static_cast<double>(bin_count);
  auto histogram = [&](std::span<const double> set) {
    std::vector<double> h(bin_count, 0.0);
    for (double v : set) {
      auto b = static_cast<std::size_t>((v - lo) / width);
      h[std::min(b, bin_count - 1)] += 1.0;
    }
    for (double& x : h) x /= static_cast<double>(set.size());
    return h;
  };
  const auto hi_in = histogram(inside);
  const auto hi_out = histogram(outside);
  double overlap = 0.0;
  for (std::size_t b = 0; b < bin_count; ++b) overlap += std::min(hi_in[b], hi_out[b]);
  return std::clamp(1.0 - overlap, 0.0, 1.0);
}

GcnrTarget gcnr_target(const Volume& volume, const Sphere& sphere, const ArrayGeometry& geom, double c,
                       const GcnrOptions& options) {
  geom.validate();
  if (!(sphere.radius > 0)) throw std::invalid_argument("gcnr target: radius must be > 0");
  GcnrTarget t;
  t.sphere = sphere;
  t.erosion = options.erosion > 0
                  ? options.erosion
                  : 1.4 * (c / geom.center_frequency) * sphere.center.z / std::max(geom.width_x(), geom.width_y());
  const double r_in = sphere.radius - t.erosion;
  const double r_out = sphere.radius + t.erosion;
  if (!(r_in > 0)) throw std::invalid_argument("gcnr target: erosion leaves no inside region");

  const auto env = volume.envelope();
  const auto& g = volume.grid;
  std::vector<double> inside;
  std::vector<std::pair<double, double>> shell;  // (distance, value)
  for (std::size_t i = 0; i < g.counts[0]; ++i)
    for (std::size_t j = 0; j < g.counts[1]; ++j)
      for (std::size_t k = 0; k < g.counts[2]; ++k) {
        const Vec3 p = g.position(i, j, k);
        const double d = distance(p, sphere.center);
        if (d <= r_in) {
          inside.push_back(env(i, j, k));
        } else if (d >= r_out && std::abs(p.z - sphere.center.z) <= r_in) {
          shell.emplace_back(d, env(i, j, k));
        }
      }
  if (inside.empty() || shell.empty()) throw std::invalid_argument("gcnr target: region not covered by the volume");
  std::stable_sort(shell.begin(), shell.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  const std::size_t n = std::min(inside.size(), shell.size());
  std::vector<double> outside(n);
  for (std::size_t i = 0; i < n; ++i) outside[i] = shell[i].second;
  t.inside_count = inside.size();
  t.outside_count = n;
  t.value = gcnr(inside, outside, options.bins);
  return t;
}

namespace {

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

std::string num(const std::optional<double>& v) { return v ? num(*v) : std::string(); }

}  // namespace

void write_resolution_csv(std::ostream& out, const ResolutionReport& rep) {
  out << "point,x,y,z,peak_x,peak_y,peak_z,status,fwhm_x,fwhm_y,fwhm_z,fnum_x,fnum_y,norm_x,norm_y,norm_z\n";
  for (std::size_t i = 0; i < rep.points.size(); ++i) {
    const auto& p = rep.points[i];
    const bool ok = p.status == PeakStatus::ok;
    const bool has_peak = p.status != PeakStatus::no_peak;
    out << i << ',' << num(p.target.x) << ',' << num(p.target.y) << ',' << num(p.target.z) << ','
        << (has_peak ? num(p.peak.x) : "") << ',' << (has_peak ? num(p.peak.y) : "") << ','
        << (has_peak ? num(p.peak.z) : "") << ',' << to_string(p.status) << ',' << num(p.fwhm[0]) << ','
        << num(p.fwhm[1]) << ',' << num(p.fwhm[2]) << ',' << num(p.f_number[0]) << ',' << num(p.f_number[1]) << ','
        << (ok ? num(p.normalized[0]) : "") << ',' << (ok ? num(p.normalized[1]) : "") << ','
        << (ok ? num(p.normalized[2]) : "") << '\n';
  }
  auto aggregate = [&](const char* label, auto field) {
    out << label << ",,,,,,," << rep.raw[0].count << ',' << num(field(rep.raw[0])) << ',' << num(field(rep.raw[1]))
        << ',' << num(field(rep.raw[2])) << ",,," << num(field(rep.normalized[0])) << ','
        << num(field(rep.normalized[1])) << ',' << num(field(rep.normalized[2])) << '\n';
  };
  aggregate("mean", [](const AxisStats& s) { return s.mean; });
  aggregate("std", [](const AxisStats& s) { return s.stddev; });
}

void write_gcnr_csv(std::ostream& out, std::span<const GcnrTarget> targets) {
  out << "target,x,y,z,radius,erosion,inside_count,outside_count,gcnr\n";
  double sum = 0.0;
  for (std::size_t i = 0; i < targets.size(); ++i) {
    const auto& t = targets[i];
    out << i << ',' << num(t.sphere.center.x) << ',' << num(t.sphere.center.y) << ',' << num(t.sphere.center.z) << ','
        << num(t.sphere.radius) << ',' << num(t.erosion) << ',' << t.inside_count << ',' << t.outside_count << ','
        << num(t.value) << '\n';
    sum += t.value;
  }
  out << "mean,,,,,,,," << (targets.empty() ? std::string() : num(sum / static_cast<double>(targets.size()))) << '\n';
}

}  // namespace rcaus
