#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "rcaus/encoding.hpp"
#include "rcaus/geometry.hpp"
#include "rcaus/simulate.hpp"

namespace rcaus {

enum class SchemeKind { optimus, hercules, vls, tpw };

std::string_view to_string(SchemeKind kind);
/// Case-insensitive; throws std::invalid_argument for unknown names.
SchemeKind parse_scheme_kind(std::string_view name);

struct SchemeSpec {
  SchemeKind kind = SchemeKind::optimus;
  int angle_count = 9;                        // OPTIMUS, TPW
  double max_angle = 0.17453292519943295;     // rad (10 degrees); OPTIMUS, TPW
  int source_count = 0;                       // VLS; 0 = one per row
  std::optional<double> source_depth;         // VLS, m (negative = behind the array); default -width_y / 2
  int encoding_order = 0;                     // OPTIMUS, HERCULES; 0 = row count

  void validate(const ArrayGeometry& geom) const;
  bool encoded() const { return kind == SchemeKind::optimus || kind == SchemeKind::hercules; }

  friend bool operator==(const SchemeSpec&, const SchemeSpec&) = default;
};

struct PlaneWave {
  double angle = 0.0;  // rad, steering along y
  friend bool operator==(const PlaneWave&, const PlaneWave&) = default;
};

/// Cylindrical wave diverging from the line (y_v, z_v) parallel to x.
struct VirtualLineSource {
  double y = 0.0;
  double z = 0.0;
  friend bool operator==(const VirtualLineSource&, const VirtualLineSource&) = default;
};

/// Transmit wavefront of one event. reference_delay is the minimum that was
/// subtracted from the row delays, so transmit_time() is measured from the
/// same epoch as the recorded traces.
struct TxDelayModel {
  std::variant<PlaneWave, VirtualLineSource> wave;
  double reference_delay = 0.0;  // s

  /// Time at which the wavefront reaches v.
  double transmit_time(Vec3 v, double c) const;

  friend bool operator==(const TxDelayModel&, const TxDelayModel&) = default;
};

/// tau_r = (y_r sin(theta) - min_r y_r sin(theta)) / c. Requires |theta| < pi/2.
std::vector<double> plane_wave_delays(const ArrayGeometry& geom, double theta, double c);
TxDelayModel plane_wave_model(const ArrayGeometry& geom, double theta, double c);

/// tau_r = (sqrt((y_r - y_v)^2 + z_v^2) - min_r ...) / c. Requires z_v != 0.
std::vector<double> vls_delays(const ArrayGeometry& geom, double y_v, double z_v, double c);
TxDelayModel vls_model(const ArrayGeometry& geom, double y_v, double z_v, double c);

/// Steering angles: symmetric, uniform over [-max, +max], exactly 0 in the middle for odd counts.
std::vector<double> scheme_angles(const SchemeSpec& spec);

struct Sequence {
  std::vector<TransmitEvent> events;
  std::vector<TxDelayModel> event_models;  // one per event
  /// Events per decoded dataset: E for encoded schemes, 1 otherwise.
  std::size_t set_size = 1;
  std::optional<EncodingMatrix> encoding;

  /// One model per beamformed dataset (per HERO set, or per event when unencoded).
  std::vector<TxDelayModel> dataset_models() const;
};

/// Throws std::invalid_argument for encoded schemes on a non-power-of-two row
/// count or an encoding order different from the row count.
Sequence build_sequence(const SchemeSpec& spec, const ArrayGeometry& geom, const PulseSpec& pulse, double c);

/// Volume rate for a sequence: prf / event_count.
double acquisition_rate(std::size_t event_count, double prf);

}  // namespace rcaus
