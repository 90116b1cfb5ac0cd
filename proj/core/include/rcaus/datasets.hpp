#pragma once

#include "rcaus/array3.hpp"
#include "rcaus/types.hpp"

namespace rcaus {

/// Sampled traces on a uniform time axis: sample k sits at t0 + k / sample_rate.
/// A nonzero carrier marks complex baseband data demodulated at that frequency.
template <class T>
struct Traces {
  Array3<T> samples;
  double sample_rate = 0.0;
  double t0 = 0.0;
  double carrier = 0.0;

  std::size_t sample_count() const { return samples.dim(2); }
  double time_of(std::size_t k) const { return t0 + static_cast<double>(k) / sample_rate; }
};

/// Column traces per transmit event, dims (events, columns, samples).
template <class T>
struct EventChannelData : Traces<T> {
  std::size_t event_count() const { return this->samples.dim(0); }
  std::size_t column_count() const { return this->samples.dim(1); }
};

/// Per-crossing traces, dims (rows, columns, samples). Holds both simulated patch
/// signals and the decoded virtual 2D aperture; stacked HERO sets use
/// (sets * rows, columns, samples).
template <class T>
struct ApertureData : Traces<T> {
  std::size_t row_count() const { return this->samples.dim(0); }
  std::size_t column_count() const { return this->samples.dim(1); }
};

template <class T>
using DecodedAperture = ApertureData<T>;

using PatchSignals = ApertureData<double>;

}  // namespace rcaus
