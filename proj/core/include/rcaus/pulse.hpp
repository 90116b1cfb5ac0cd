#pragma once

#include <span>
#include <variant>
#include <vector>

#include "rcaus/types.hpp"

namespace rcaus {

enum class Window { rectangular, hann, tukey };

struct ToneBurst {
  double frequency = 0.0;  // Hz
  int cycles = 1;
  Window window = Window::rectangular;  // rectangular or hann

  friend bool operator==(const ToneBurst&, const ToneBurst&) = default;
};

/// Linear frequency sweep from f_low to f_high.
struct Chirp {
  double f_low = 0.0;     // Hz
  double f_high = 0.0;    // Hz
  double duration = 0.0;  // s
  Window window = Window::tukey;  // rectangular or tukey
  double tukey_alpha = 0.2;

  friend bool operator==(const Chirp&, const Chirp&) = default;
};

using PulseSpec = std::variant<ToneBurst, Chirp>;

void validate(const PulseSpec& pulse);
double highest_frequency(const PulseSpec& pulse);
/// Tone frequency, or the sweep midpoint for chirps.
double center_frequency(const PulseSpec& pulse);
double nominal_duration(const PulseSpec& pulse);

/// Excitation sampled from t = 0 with peak |amplitude| 1.
struct SampledWaveform {
  std::vector<double> samples;
  double sample_rate = 0.0;

  double duration() const { return static_cast<double>(samples.size()) / sample_rate; }
  double energy() const;

  /// Linear interpolation of the samples, taken as zero outside [0, N).
  double at(double t) const {
    const double pos = t * sample_rate;
    const double fl = std::floor(pos);
    const long i = static_cast<long>(fl);
    const double f = pos - fl;
    const long n = static_cast<long>(samples.size());
    const double a = (i >= 0 && i < n) ? samples[static_cast<std::size_t>(i)] : 0.0;
    const double b = (i + 1 >= 0 && i + 1 < n) ? samples[static_cast<std::size_t>(i + 1)] : 0.0;
    return a + f * (b - a);
  }
};

/// Throws std::invalid_argument when fs <= 2 * highest frequency.
SampledWaveform synthesize(const PulseSpec& pulse, double fs);

/// Cross-correlation with the pulse, out[n] = sum_m trace[n + m] * pulse[m].
/// A replica starting at sample n0 peaks at n0 with value pulse.energy().
/// Output length equals input length.
std::vector<double> matched_filter(std::span<const double> trace, double trace_rate, const SampledWaveform& pulse);

struct Baseband {
  std::vector<cplx> samples;
  double sample_rate = 0.0;
  double carrier = 0.0;
};

/// Mix to baseband at -f0, low-pass with a linear-phase windowed-sinc FIR and
/// decimate. The mixer phase is referenced to absolute time t0 + n / fs, and the
/// output is scaled by 2 so |iq| follows the analytic-signal envelope.
///
/// The FIR uses a Hann window of length 8 fs / f0 (rounded to odd) and cutoff
/// min(f0, fs / (2 * decimation)); its group delay is removed exactly.
/// Throws std::invalid_argument when fs / decimation < f0 (the output rate could
/// not hold a 100% fractional bandwidth signal).
Baseband demodulate(std::span<const double> trace, double f0, double fs, int decimation, double t0 = 0.0);

/// Taps of the demodulation low-pass filter (unit DC gain).
std::vector<double> lowpass_taps(double f0, double fs, int decimation);

}  // namespace rcaus
