#include "rcaus/schemes.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rcaus {

std::string_view to_string(SchemeKind kind) {
  switch (kind) {
    case SchemeKind::optimus: return "optimus";
    case SchemeKind::hercules: return "hercules";
    case SchemeKind::vls: return "vls";
    case SchemeKind::tpw: return "tpw";
  }
  return "?";
}

SchemeKind parse_scheme_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  for (auto k : {SchemeKind::optimus, SchemeKind::hercules, SchemeKind::vls, SchemeKind::tpw})
    if (lower == to_string(k)) return k;
  throw std::invalid_argument("unknown scheme kind '" + std::string(name) + "' (expected optimus, hercules, vls or tpw)");
}

void SchemeSpec::validate(const ArrayGeometry& geom) const {
  geom.validate();
  if (kind == SchemeKind::optimus || kind == SchemeKind::tpw) {
    if (angle_count < 1) throw std::invalid_argument("scheme: angle_count must be >= 1");
    if (!(max_angle >= 0 && max_angle < kPi / 2)) throw std::invalid_argument("scheme: max_angle must lie in [0, pi/2)");
  }
  if (kind == SchemeKind::vls) {
    if (source_count < 0) throw std::invalid_argument("scheme: source_count must be >= 0");
    if (source_depth && *source_depth == 0.0) throw std::invalid_argument("scheme: source_depth must be nonzero");
  }
  if (encoded()) {
    const int rows = geom.row_count;
    if ((rows & (rows - 1)) != 0)
      throw std::invalid_argument("scheme: Hadamard encoding needs a power-of-two row count, got " + std::to_string(rows));
    if (encoding_order != 0 && encoding_order != rows)
      throw std::invalid_argument("scheme: encoding_order " + std::to_string(encoding_order) +
                                  " must equal the row count " + std::to_string(rows));
  }
}

double TxDelayModel::transmit_time(Vec3 v, double c) const {
  if (const auto* pw = std::get_if<PlaneWave>(&wave))
    return (v.y * std::sin(pw->angle) + v.z * std::cos(pw->angle)) / c - reference_delay;
  const auto& src = std::get<VirtualLineSource>(wave);
  const double dy = v.y - src.y;
  const double dz = v.z - src.z;
  return std::sqrt(dy * dy + dz * dz) / c - reference_delay;
}

namespace {

std::vector<double> normalized(std::vector<double> path, double c, double& reference) {
  const double lo = *std::min_element(path.begin(), path.end());
  for (double& p : path) p = (p - lo) / c;
  reference = lo / c;
  return path;
}

}  // namespace

TxDelayModel plane_wave_model(const ArrayGeometry& geom, double theta, double c) {
  if (!(std::abs(theta) < kPi / 2)) throw std::invalid_argument("plane wave: |theta| must be below pi/2");
  geom.validate();
  std::vector<double> path(static_cast<std::size_t>(geom.row_count));
  for (int r = 0; r < geom.row_count; ++r) path[static_cast<std::size_t>(r)] = geom.row_y(r) * std::sin(theta);
  TxDelayModel m{PlaneWave{theta}, 0.0};
  normalized(std::move(path), c, m.reference_delay);
  return m;
}

std::vector<double> plane_wave_delays(const ArrayGeometry& geom, double theta, double c) {
  if (!(std::abs(theta) < kPi / 2)) throw std::invalid_argument("plane wave: |theta| must be below pi/2");
  geom.validate();
  std::vector<double> path(static_cast<std::size_t>(geom.row_count));
  for (int r = 0; r < geom.row_count; ++r) path[static_cast<std::size_t>(r)] = geom.row_y(r) * std::sin(theta);
  double ref = 0.0;
  return normalized(std::move(path), c, ref);
}

std::vector<double> vls_delays(const ArrayGeometry& geom, double y_v, double z_v, double c) {
  if (z_v == 0.0) throw std::invalid_argument("virtual line source: z_v must be nonzero");
  geom.validate();
  std::vector<double> path(static_cast<std::size_t>(geom.row_count));
  for (int r = 0; r < geom.row_count; ++r) path[static_cast<std::size_t>(r)] = std::hypot(geom.row_y(r) - y_v, z_v);
  double ref = 0.0;
  return normalized(std::move(path), c, ref);
}

TxDelayModel vls_model(const ArrayGeometry& geom, double y_v, double z_v, double c) {
  if (z_v == 0.0) throw std::invalid_argument("virtual line source: z_v must be nonzero");
  geom.validate();
  std::vector<double> path(static_cast<std::size_t>(geom.row_count));
  for (int r = 0; r < geom.row_count; ++r) path[static_cast<std::size_t>(r)] = std::hypot(geom.row_y(r) - y_v, z_v);
  TxDelayModel m{VirtualLineSource{y_v, z_v}, 0.0};
  normalized(std::move(path), c, m.reference_delay);
  return m;
}

std::vector<double> scheme_angles(const SchemeSpec& spec) {
  if (spec.kind == SchemeKind::hercules) return {0.0};
  const int M = spec.angle_count;
  if (M < 1) throw std::invalid_argument("scheme: angle_count must be >= 1");
  std::vector<double> angles(static_cast<std::size_t>(M), 0.0);
  if (M == 1) return angles;
  // Integer numerator keeps the list exactly antisymmetric.
  for (int m = 0; m < M; ++m)
    angles[static_cast<std::size_t>(m)] = spec.max_angle * static_cast<double>(2 * m - (M - 1)) / static_cast<double>(M - 1);
  return angles;
}

std::vector<TxDelayModel> Sequence::dataset_models() const {
  std::vector<TxDelayModel> out;
  for (std::size_t e = 0; e < event_models.size(); e += set_size) out.push_back(event_models[e]);
  return out;
}

Sequence build_sequence(const SchemeSpec& spec, const ArrayGeometry& geom, const PulseSpec& pulse, double c) {
  spec.validate(geom);
  validate(pulse);
  if (!(c > 0)) throw std::invalid_argument("build_sequence: speed of sound must be > 0");
  const auto R = static_cast<std::size_t>(geom.row_count);
  const std::vector<int> ones(R, 1);
  Sequence seq;

  auto add = [&](std::vector<int> code, std::vector<double> delays, TxDelayModel model) {
    seq.events.push_back({code, std::move(delays), pulse, code});
    seq.event_models.push_back(std::move(model));
  };

  switch (spec.kind) {
    case SchemeKind::optimus:
    case SchemeKind::hercules: {
      const auto H = hadamard(R);
      seq.set_size = R;
      for (double theta : scheme_angles(spec)) {
        const auto delays = plane_wave_delays(geom, theta, c);
        const auto model = plane_wave_model(geom, theta, c);
        for (std::size_t e = 0; e < R; ++e) add(bias_schedule(H, e), delays, model);
      }
      seq.encoding = H;
      break;
    }
    case SchemeKind::tpw:
      for (double theta : scheme_angles(spec))
        add(ones, plane_wave_delays(geom, theta, c), plane_wave_model(geom, theta, c));
      break;
    case SchemeKind::vls: {
      const int S = spec.source_count > 0 ? spec.source_count : geom.row_count;
      const double z_v = spec.source_depth.value_or(-0.5 * geom.width_y());
      const double span = (geom.row_count - 1) * geom.pitch;
      for (int s = 0; s < S; ++s) {
        const double y_v = S == 1 ? 0.0 : (s - 0.5 * (S - 1)) * span / (S - 1);
        add(ones, vls_delays(geom, y_v, z_v, c), vls_model(geom, y_v, z_v, c));
      }
      break;
    }
  }
  return seq;
}

double acquisition_rate(std::size_t event_count, double prf) {
  if (event_count == 0 || !(prf > 0)) throw std::invalid_argument("acquisition_rate: event count and prf must be positive");
  return prf / static_cast<double>(event_count);
}

}  // namespace rcaus
