#pragma once

#include <optional>
#include <span>
#include <vector>

#include "rcaus/datasets.hpp"
#include "rcaus/geometry.hpp"
#include "rcaus/pulse.hpp"
#include "rcaus/scatterers.hpp"

namespace rcaus {

/// One firing of the rows. Every vector has one entry per row.
struct TransmitEvent {
  std::vector<int> row_polarity;  // +1, -1 or 0
  std::vector<double> row_delay;  // s, >= 0
  PulseSpec pulse;
  std::vector<int> bias;  // +1, -1 or 0

  void validate(std::size_t rows) const;

  /// Per-row transmit weight: AC polarity times DC bias. A row only radiates
  /// while biased, and flipping both leaves the emitted wave unchanged.
  std::vector<int> effective_transmit() const;

  friend bool operator==(const TransmitEvent&, const TransmitEvent&) = default;
};

enum class Directivity { rectangular, omni };

enum class SimulationEngine {
  direct,     // one wavefield simulation per distinct effective transmit
  row_basis,  // one simulation per row, events assembled by fractional delay
  automatic,  // row_basis when distinct transmits are at least as many as rows and the receive bias is shared
};

struct SimulationOptions {
  Directivity directivity = Directivity::rectangular;
  /// Oversampling of the transmit field grid relative to the medium rate.
  int oversample = 4;
  int threads = 1;
  SimulationEngine engine = SimulationEngine::direct;
  /// Patch simulations kept by run_acquisition for reuse.
  std::size_t cache_capacity = 4;
};

/// Shortest trace duration that holds every echo of every event without truncation.
double required_time_span(const ArrayGeometry& geom, std::span<const TransmitEvent> events,
                          const ScattererField& field, const MediumSpec& medium);

/// Per-crossing receive signals s_rc(t) for one event, dims (R, C, ceil(t_span * fs)).
///
/// Each row is discretized into one point sub-element per crossing. A scatterer
/// at p with amplitude a contributes, for transmit sub-element x' on row r' and
/// receive crossing x,
///   w_r' * a * D(x') * D(x) / (|p - x'| |p - x|) * pulse(t - delay_r' - (|p - x'| + |p - x|) / c)
/// where w_r' is the effective transmit weight and D the element directivity.
/// The pulse is linearly interpolated from its samples. The transmit field at
/// each scatterer is accumulated on a grid oversampled by options.oversample and
/// linearly interpolated again on the receive leg. Receive bias is not applied.
///
/// Throws rcaus::Error if t_span would truncate any echo.
PatchSignals simulate_patch_signals(const ArrayGeometry& geom, const TransmitEvent& event, const ScattererField& field,
                                    const MediumSpec& medium, double t_span, const SimulationOptions& options = {});

/// Column measurement under the event's bias: g_c(t) = sum_r bias[r] s_rc(t).
/// Returns a single-event dataset, dims (1, C, T).
EventChannelData<double> measure_event(const PatchSignals& s, const TransmitEvent& event);

/// Wavefield responses to each row firing alone (unit weight, zero delay).
///
/// Any row-driven event is a weighted, delayed sum of these. When a receive bias
/// is given the basis is stored already collapsed to column traces under that
/// bias, dims per row (1, C, T); otherwise the full crossing grid (R, C, T) is kept.
class RowBasis {
 public:
  RowBasis(const ArrayGeometry& geom, const PulseSpec& pulse, const ScattererField& field, const MediumSpec& medium,
           double t_span, std::optional<std::vector<int>> receive_bias, const SimulationOptions& options = {});

  bool collapsed() const { return receive_bias_.has_value(); }
  const std::optional<std::vector<int>>& receive_bias() const { return receive_bias_; }
  std::size_t sample_count() const { return samples_; }
  double sample_rate() const { return sample_rate_; }
  std::size_t row_count() const { return static_cast<std::size_t>(rows_); }
  std::size_t column_count() const { return static_cast<std::size_t>(cols_); }

  /// Response to an event. Fractional delays use an 8-tap Lanczos kernel; integer
  /// delays are exact. Collapsed bases return (1, C, T), full bases (R, C, T).
  Array3<double> assemble(const TransmitEvent& event, int threads = 1) const;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::size_t rx_rows_ = 0;
  std::size_t samples_ = 0;
  double sample_rate_ = 0.0;
  std::optional<std::vector<int>> receive_bias_;
  PulseSpec pulse_;
  std::vector<Array3<double>> basis_;  // per transmitting row
};

struct AcquisitionStats {
  std::size_t simulations = 0;  // direct patch simulations performed
  std::size_t cache_hits = 0;
  std::size_t basis_rows = 0;  // rows simulated for a row basis (0 if unused)
};

struct Acquisition {
  EventChannelData<double> data;
  AcquisitionStats stats;
};

/// Simulate a full transmit sequence and stack the column measurements, dims
/// (events, C, T). Patch simulations are cached per distinct (delay profile,
/// effective transmit), so a HERO set costs one simulation. t_span <= 0 selects
/// required_time_span(). Events must share one pulse.
Acquisition run_acquisition(const ArrayGeometry& geom, std::span<const TransmitEvent> events,
                            const ScattererField& field, const MediumSpec& medium, double t_span = 0.0,
                            const SimulationOptions& options = {});

/// Same as above, assembling events from a prebuilt row basis. t_span > 0 keeps
/// only that much of each trace; since the basis is zero past its echoes, the
/// result matches a basis built with that span.
Acquisition run_acquisition(const RowBasis& basis, std::span<const TransmitEvent> events, int threads = 1,
                            double t_span = 0.0);

/// Engine run_acquisition uses for these events: never automatic.
SimulationEngine resolve_engine(const ArrayGeometry& geom, std::span<const TransmitEvent> events,
                                SimulationEngine requested);

}  // namespace rcaus
