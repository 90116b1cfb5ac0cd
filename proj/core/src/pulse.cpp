#include "rcaus/pulse.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace rcaus {

namespace {

template <class... Fs>
struct overloaded : Fs... {
  using Fs::operator()...;
};

double tukey(double x, double alpha) {
  if (alpha <= 0.0) return 1.0;
  if (x < alpha / 2) return 0.5 * (1 + std::cos(kPi * (2 * x / alpha - 1)));
  if (x > 1 - alpha / 2) return 0.5 * (1 + std::cos(kPi * (2 * x / alpha - 2 / alpha + 1)));
  return 1.0;
}

void normalize_peak(std::vector<double>& v) {
  double peak = 0.0;
  for (double s : v) peak = std::max(peak, std::abs(s));
  if (peak > 0)
    for (double& s : v) s /= peak;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

}  // namespace

void validate(const PulseSpec& pulse) {
  std::visit(overloaded{
                 [](const ToneBurst& p) {
                   if (!(p.frequency > 0)) throw std::invalid_argument("tone burst: frequency must be > 0");
                   if (p.cycles < 1) throw std::invalid_argument("tone burst: cycles must be >= 1");
                   if (p.window == Window::tukey)
                     throw std::invalid_argument("tone burst: window must be rectangular or hann");
                 },
                 [](const Chirp& p) {
                   if (!(p.f_low > 0) || !(p.f_high > 0)) throw std::invalid_argument("chirp: frequencies must be > 0");
                   if (!(p.f_low < p.f_high)) throw std::invalid_argument("chirp: f_low must be below f_high");
                   if (!(p.duration > 0)) throw std::invalid_argument("chirp: duration must be > 0");
                   if (p.window == Window::hann) throw std::invalid_argument("chirp: window must be rectangular or tukey");
                   if (!(p.tukey_alpha >= 0 && p.tukey_alpha <= 1))
                     throw std::invalid_argument("chirp: tukey alpha must lie in [0, 1]");
                 },
             },
             pulse);
}

double highest_frequency(const PulseSpec& pulse) {
  return std::visit(overloaded{[](const ToneBurst& p) { return p.frequency; },
                               [](const Chirp& p) { return p.f_high; }},
                    pulse);
}

double center_frequency(const PulseSpec& pulse) {
  return std::visit(overloaded{[](const ToneBurst& p) { return p.frequency; },
                               [](const Chirp& p) { return 0.5 * (p.f_low + p.f_high); }},
                    pulse);
}

double nominal_duration(const PulseSpec& pulse) {
  return std::visit(overloaded{[](const ToneBurst& p) { return p.cycles / p.frequency; },
                               [](const Chirp& p) { return p.duration; }},
                    pulse);
}

double SampledWaveform::energy() const {
  double e = 0.0;
  for (double s : samples) e += s * s;
  return e;
}

SampledWaveform synthesize(const PulseSpec& pulse, double fs) {
  validate(pulse);
  if (!(fs > 2 * highest_frequency(pulse)))
    throw std::invalid_argument("synthesize: sampling rate " + std::to_string(fs) + " Hz undersamples a pulse reaching " +
                                std::to_string(highest_frequency(pulse)) + " Hz");
  SampledWaveform w;
  w.sample_rate = fs;
  std::visit(overloaded{
                 [&](const ToneBurst& p) {
                   const auto n = static_cast<std::size_t>(std::max(1.0, std::round(p.cycles * fs / p.frequency)));
                   w.samples.resize(n);
                   for (std::size_t i = 0; i < n; ++i) {
                     double s = std::sin(2 * kPi * p.frequency * static_cast<double>(i) / fs);
                     if (p.window == Window::hann) s *= 0.5 * (1 - std::cos(2 * kPi * static_cast<double>(i) / n));
                     w.samples[i] = s;
                   }
                 },
                 [&](const Chirp& p) {
                   const auto n = static_cast<std::size_t>(std::max(2.0, std::round(p.duration * fs)));
                   const double rate = (p.f_high - p.f_low) / p.duration;
                   const double alpha = p.window == Window::tukey ? p.tukey_alpha : 0.0;
                   w.samples.resize(n);
                   for (std::size_t i = 0; i < n; ++i) {
                     const double t = static_cast<double>(i) / fs;
                     const double phase = 2 * kPi * (p.f_low * t + 0.5 * rate * t * t);
                     w.samples[i] = std::sin(phase) * tukey(static_cast<double>(i) / static_cast<double>(n - 1), alpha);
                   }
                 },
             },
             pulse);
  normalize_peak(w.samples);
  return w;
}

std::vector<double> matched_filter(std::span<const double> trace, double trace_rate, const SampledWaveform& pulse) {
  if (trace_rate != pulse.sample_rate)
    throw std::invalid_argument("matched_filter: trace sampled at " + std::to_string(trace_rate) +
                                " Hz but pulse at " + std::to_string(pulse.sample_rate) + " Hz");
  const std::size_t n = trace.size();
  const std::size_t m = pulse.samples.size();
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t len = std::min(m, n - i);
    double acc = 0.0;
    for (std::size_t k = 0; k < len; ++k) acc += trace[i + k] * pulse.samples[k];
    out[i] = acc;
  }
  return out;
}

std::vector<double> lowpass_taps(double f0, double fs, int decimation) {
  auto len = static_cast<std::size_t>(std::lround(8.0 * fs / f0));
  if (len % 2 == 0) ++len;
  const double cutoff = std::min(f0, fs / (2.0 * decimation));
  const double mid = 0.5 * static_cast<double>(len - 1);
  std::vector<double> h(len);
  double sum = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double win = len > 1 ? 0.5 * (1 - std::cos(2 * kPi * static_cast<double>(k) / static_cast<double>(len - 1))) : 1.0;
    h[k] = 2 * cutoff / fs * sinc(2 * cutoff * (static_cast<double>(k) - mid) / fs) * win;
    sum += h[k];
  }
  for (double& v : h) v /= sum;
  return h;
}

Baseband demodulate(std::span<const double> trace, double f0, double fs, int decimation, double t0) {
  if (!(f0 > 0) || !(fs > 0)) throw std::invalid_argument("demodulate: frequencies must be > 0");
  if (decimation < 1) throw std::invalid_argument("demodulate: decimation must be >= 1");
  if (fs / decimation < f0)
    throw std::invalid_argument("demodulate: decimation " + std::to_string(decimation) + " aliases (fs / D = " +
                                std::to_string(fs / decimation) + " Hz < f0 = " + std::to_string(f0) + " Hz)");
  const auto h = lowpass_taps(f0, fs, decimation);
  const long half = static_cast<long>(h.size() / 2);
  const long n = static_cast<long>(trace.size());

  std::vector<cplx> mixed(trace.size());
  for (long i = 0; i < n; ++i) {
    const double phase = -2 * kPi * f0 * (t0 + static_cast<double>(i) / fs);
    mixed[static_cast<std::size_t>(i)] = 2.0 * trace[static_cast<std::size_t>(i)] * cplx(std::cos(phase), std::sin(phase));
  }

  Baseband out;
  out.sample_rate = fs / decimation;
  out.carrier = f0;
  out.samples.resize(static_cast<std::size_t>((n + decimation - 1) / decimation));
  for (std::size_t j = 0; j < out.samples.size(); ++j) {
    const long center = static_cast<long>(j) * decimation;
    cplx acc = 0.0;
    const long kmin = std::max(-half, center - (n - 1));
    const long kmax = std::min(half, center);
    for (long k = kmin; k <= kmax; ++k) acc += h[static_cast<std::size_t>(k + half)] * mixed[static_cast<std::size_t>(center - k)];
    out.samples[j] = acc;
  }
  return out;
}

}  // namespace rcaus
