#include "rcaus/simulate.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "rcaus/parallel.hpp"

namespace rcaus {

void TransmitEvent::validate(std::size_t rows) const {
  if (row_polarity.size() != rows || row_delay.size() != rows || bias.size() != rows)
    throw std::invalid_argument("transmit event: polarity, delay and bias need one entry per row (" +
                                std::to_string(rows) + ")");
  bool any = false;
  for (std::size_t r = 0; r < rows; ++r) {
    if (row_polarity[r] < -1 || row_polarity[r] > 1 || bias[r] < -1 || bias[r] > 1)
      throw std::invalid_argument("transmit event: polarity and bias entries must be -1, 0 or +1");
    if (!(row_delay[r] >= 0.0) || !std::isfinite(row_delay[r]))
      throw std::invalid_argument("transmit event: row delays must be finite and >= 0");
    any = any || row_polarity[r] != 0;
  }
  if (!any) throw std::invalid_argument("transmit event: at least one row must transmit");
  rcaus::validate(pulse);
}

std::vector<int> TransmitEvent::effective_transmit() const {
  std::vector<int> eff(row_polarity.size());
  for (std::size_t r = 0; r < eff.size(); ++r) eff[r] = row_polarity[r] * bias[r];
  return eff;
}

namespace {

constexpr std::size_t kBlock = 128;  // scatterers per synchronous block
constexpr double kGuardSamples = 8.0;

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

struct ElementModel {
  Directivity kind;
  double width_over_lambda;

  // Directivity of a point element at the origin of `d` (scatterer minus element).
  double operator()(Vec3 d, double dist) const {
    if (kind == Directivity::omni) return 1.0;
    const double cos_phi = d.z / dist;
    const double sin_phi = std::sqrt(d.x * d.x + d.y * d.y) / dist;
    return sinc(width_over_lambda * sin_phi) * cos_phi;
  }
};

ElementModel element_model(const ArrayGeometry& geom, const MediumSpec& medium, Directivity kind) {
  return {kind, geom.element_width() * geom.center_frequency / medium.speed_of_sound};
}

struct TxElement {
  std::size_t crossing;
  double weight;
  double delay;
};

// Distance and directivity over distance between one scatterer and one crossing;
// shared by both legs since transmit elements sit on the crossings.
struct Path {
  double dist;
  double gain;
};

// Transmit field at one scatterer, stored polyphase: arr[p * len + i] holds the
// field at coarse sample position m_start + i + p / U.
struct TxField {
  long m_start = 0;
  long len = 0;
  std::vector<double> arr;
};

class TransmitFieldBuilder {
 public:
  TransmitFieldBuilder(const SampledWaveform& pulse, int oversample, double c)
      : U_(oversample), fs_(pulse.sample_rate), c_(c) {
    const std::size_t n = pulse.samples.size();
    ext_.assign(n + 2, 0.0);
    std::copy(pulse.samples.begin(), pulse.samples.end(), ext_.begin() + 1);
    diff_.resize(n + 1);
    for (std::size_t k = 0; k + 1 < ext_.size(); ++k) diff_[k] = ext_[k + 1] - ext_[k];
  }

  long pulse_len() const { return static_cast<long>(ext_.size()) - 2; }

  void build(std::span<const Path> paths, double amplitude, std::span<const TxElement> tx, TxField& out,
             std::vector<double>& amp, std::vector<double>& arrival) const {
    amp.resize(tx.size());
    arrival.resize(tx.size());
    double amin = INFINITY, amax = -INFINITY;
    for (std::size_t j = 0; j < tx.size(); ++j) {
      const Path& path = paths[tx[j].crossing];
      amp[j] = tx[j].weight * amplitude * path.gain;
      arrival[j] = (tx[j].delay + path.dist / c_) * fs_;
      amin = std::min(amin, arrival[j]);
      amax = std::max(amax, arrival[j]);
    }
    out.m_start = static_cast<long>(std::floor(amin)) - 2;
    out.len = static_cast<long>(std::ceil(amax)) + pulse_len() + 2 - out.m_start + 1;
    out.arr.assign(static_cast<std::size_t>(U_ * out.len), 0.0);

    const std::size_t taps = diff_.size();
    for (std::size_t j = 0; j < tx.size(); ++j) {
      if (amp[j] == 0.0) continue;
      const double ai = std::floor(arrival[j]);
      const double af = arrival[j] - ai;
      for (int ph = 0; ph < U_; ++ph) {
        // Fine point (m, ph) sits at pulse position m - ai + ph/U - af.
        double x = static_cast<double>(ph) / U_ - af;
        long shift = 0;
        if (x < 0) {
          x += 1.0;
          shift = 1;
        }
        // Pulse sample k (from -1) lands on coarse index m = k + ai + shift.
        const long base = static_cast<long>(ai) + shift - 1 - out.m_start;
        double* dst = out.arr.data() + ph * out.len + base;
        const double c0 = amp[j];
        const double c1 = amp[j] * x;
        const double* e = ext_.data();
        const double* d = diff_.data();
        for (std::size_t k = 0; k < taps; ++k) dst[k] += c0 * e[k] + c1 * d[k];
      }
    }
  }

  // out[n] += w * field(n - delay * fs) for every n in [0, out.size()).
  void spread(const TxField& f, double delay, double w, std::span<double> out) const {
    const double fine = delay * fs_ * U_;
    const double dfl = std::floor(fine);
    const double frac = fine - dfl;
    const long D = static_cast<long>(dfl);
    const long a = D >= 0 ? D / U_ : -((-D + U_ - 1) / U_);
    const long b = D - a * U_;
    long ph_hi, off_hi;
    if (b == 0) {
      ph_hi = 0;
      off_hi = f.m_start + a;
    } else {
      ph_hi = U_ - b;
      off_hi = f.m_start + a + 1;
    }
    long ph_lo, off_lo;
    if (ph_hi > 0) {
      ph_lo = ph_hi - 1;
      off_lo = off_hi;
    } else {
      ph_lo = U_ - 1;
      off_lo = off_hi + 1;
    }
    const long n_begin = std::max({off_hi, off_lo, 0L});
    const long n_end = std::min(std::min(off_hi, off_lo) + f.len, static_cast<long>(out.size()));
    if (n_begin >= n_end) return;
    const double w_hi = w * (1.0 - frac);
    const double w_lo = w * frac;
    const double* hi = f.arr.data() + ph_hi * f.len - off_hi;
    const double* lo = f.arr.data() + ph_lo * f.len - off_lo;
    double* o = out.data();
    for (long n = n_begin; n < n_end; ++n) o[n] += w_hi * hi[n] + w_lo * lo[n];
  }

 private:
  int U_;
  double fs_;
  double c_;
  std::vector<double> ext_;   // pulse samples padded with one zero on each side
  std::vector<double> diff_;  // forward differences of ext_
};

std::vector<TxElement> transmit_elements(const ArrayGeometry& geom, const std::vector<int>& eff,
                                         const std::vector<double>& delay) {
  std::vector<TxElement> tx;
  for (int r = 0; r < geom.row_count; ++r) {
    if (eff[static_cast<std::size_t>(r)] == 0) continue;
    for (int c = 0; c < geom.col_count; ++c)
      tx.push_back({static_cast<std::size_t>(r * geom.col_count + c), static_cast<double>(eff[static_cast<std::size_t>(r)]),
                    delay[static_cast<std::size_t>(r)]});
  }
  return tx;
}

std::vector<Vec3> receive_crossings(const ArrayGeometry& geom) {
  std::vector<Vec3> rx;
  rx.reserve(static_cast<std::size_t>(geom.row_count * geom.col_count));
  for (int r = 0; r < geom.row_count; ++r)
    for (int c = 0; c < geom.col_count; ++c) rx.push_back(crossing_position(geom, r, c));
  return rx;
}

double required_samples(const ArrayGeometry& geom, const std::vector<int>& eff, const std::vector<double>& delay,
                        const ScattererField& field, const MediumSpec& medium, double pulse_samples) {
  const double c = medium.speed_of_sound;
  const Vec3 corners[4] = {crossing_position(geom, 0, 0), crossing_position(geom, 0, geom.col_count - 1),
                           crossing_position(geom, geom.row_count - 1, 0),
                           crossing_position(geom, geom.row_count - 1, geom.col_count - 1)};
  // Distance along a straight row is convex, so its maximum is at an end.
  struct RowEnds {
    Vec3 first, last;
    double delay;
  };
  std::vector<RowEnds> ends;
  for (int r = 0; r < geom.row_count; ++r)
    if (eff[static_cast<std::size_t>(r)] != 0)
      ends.push_back({crossing_position(geom, r, 0), crossing_position(geom, r, geom.col_count - 1),
                      delay[static_cast<std::size_t>(r)]});
  double worst = 0.0;
  for (const Vec3& p : field.positions) {
    double tx = 0.0;
    for (const auto& e : ends) tx = std::max(tx, e.delay + std::max(distance(p, e.first), distance(p, e.last)) / c);
    double rx = 0.0;
    for (const Vec3& q : corners) rx = std::max(rx, distance(p, q));
    worst = std::max(worst, tx + rx / c);
  }
  return std::ceil(worst * medium.sampling_frequency + pulse_samples + kGuardSamples);
}

std::size_t samples_for(double t_span, double fs) {
  return static_cast<std::size_t>(std::ceil(t_span * fs - 1e-6));
}

void check_span(const ArrayGeometry& geom, const std::vector<int>& eff, const std::vector<double>& delay,
                const ScattererField& field, const MediumSpec& medium, std::size_t pulse_samples, double t_span) {
  if (!(t_span > 0)) throw std::invalid_argument("simulate: t_span must be > 0");
  const double need = required_samples(geom, eff, delay, field, medium, static_cast<double>(pulse_samples));
  const std::size_t have = samples_for(t_span, medium.sampling_frequency);
  if (static_cast<double>(have) < need)
    throw Error("simulate: t_span of " + std::to_string(t_span * 1e6) + " us truncates echoes; at least " +
                std::to_string(need / medium.sampling_frequency * 1e6) + " us is required");
}

void check_inputs(const ArrayGeometry& geom, const ScattererField& field, const MediumSpec& medium,
                  const SimulationOptions& options) {
  geom.validate();
  medium.validate();
  field.validate();
  if (options.oversample < 1) throw std::invalid_argument("simulate: oversample must be >= 1");
}

struct Route {
  std::size_t crossing;
  double sign;
};

// Accumulate the response of `field` to each transmit set at the receive
// crossings. Work unit u owns the output lanes lane_of(u, route, set); routes(u)
// lists the crossings feeding them. Scatterers are taken in blocks: transmit
// fields for a block are built in parallel, then each unit accumulates the block
// in scatterer order, so results do not depend on the thread count.
template <class Routes, class LaneOf>
void simulate_into(const TransmitFieldBuilder& builder, const std::vector<std::vector<TxElement>>& tx_sets,
                   const std::vector<Vec3>& rx, const ScattererField& field, double c, ElementModel model,
                   std::size_t units, int threads, Routes&& routes, LaneOf&& lane_of) {
  const std::size_t K = field.size();
  const std::size_t S = tx_sets.size();
  const std::size_t X = rx.size();
  std::vector<TxField> fields(kBlock * S);
  std::vector<Path> paths(kBlock * X);
  for (std::size_t k0 = 0; k0 < K; k0 += kBlock) {
    const std::size_t kn = std::min(kBlock, K - k0);
    parallel_for(kn, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t i = begin; i < end; ++i)
        for (std::size_t x = 0; x < X; ++x) {
          const Vec3 d = field.positions[k0 + i] - rx[x];
          const double dist = d.norm();
          paths[i * X + x] = {dist, model(d, dist) / dist};
        }
    });
    parallel_for(kn * S, threads, [&](std::size_t begin, std::size_t end) {
      std::vector<double> amp, arrival;
      for (std::size_t i = begin; i < end; ++i) {
        const std::span<const Path> row(paths.data() + (i / S) * X, X);
        builder.build(row, field.amplitudes[k0 + i / S], tx_sets[i % S], fields[i], amp, arrival);
      }
    });
    parallel_for(units, threads, [&](std::size_t begin, std::size_t end) {
      for (std::size_t u = begin; u < end; ++u)
        for (const Route& route : routes(u))
          for (std::size_t i = 0; i < kn; ++i) {
            const Path& path = paths[i * X + route.crossing];
            for (std::size_t s = 0; s < S; ++s)
              builder.spread(fields[i * S + s], path.dist / c, route.sign * path.gain, lane_of(u, route, s));
          }
    });
  }
}

}  // namespace

double required_time_span(const ArrayGeometry& geom, std::span<const TransmitEvent> events,
                          const ScattererField& field, const MediumSpec& medium) {
  geom.validate();
  medium.validate();
  double worst = 0.0;
  for (const auto& ev : events) {
    ev.validate(static_cast<std::size_t>(geom.row_count));
    const auto pulse = synthesize(ev.pulse, medium.sampling_frequency);
    worst = std::max(worst, required_samples(geom, ev.effective_transmit(), ev.row_delay, field, medium,
                                             static_cast<double>(pulse.samples.size())));
  }
  return worst / medium.sampling_frequency;
}

PatchSignals simulate_patch_signals(const ArrayGeometry& geom, const TransmitEvent& event, const ScattererField& field,
                                    const MediumSpec& medium, double t_span, const SimulationOptions& options) {
  check_inputs(geom, field, medium, options);
  event.validate(static_cast<std::size_t>(geom.row_count));
  const auto pulse = synthesize(event.pulse, medium.sampling_frequency);
  const auto eff = event.effective_transmit();
  check_span(geom, eff, event.row_delay, field, medium, pulse.samples.size(), t_span);

  const auto R = static_cast<std::size_t>(geom.row_count);
  const auto C = static_cast<std::size_t>(geom.col_count);
  PatchSignals out;
  out.samples = Array3<double>(R, C, samples_for(t_span, medium.sampling_frequency));
  out.sample_rate = medium.sampling_frequency;
  out.t0 = 0.0;

  const auto model = element_model(geom, medium, options.directivity);
  const TransmitFieldBuilder builder(pulse, options.oversample, medium.speed_of_sound);
  const std::vector<std::vector<TxElement>> tx{transmit_elements(geom, eff, event.row_delay)};
  if (tx.front().empty() || field.empty()) return out;
  const auto rx = receive_crossings(geom);

  simulate_into(
      builder, tx, rx, field, medium.speed_of_sound, model, R * C, options.threads,
      [](std::size_t x) { return std::array<Route, 1>{Route{x, 1.0}}; },
      [&](std::size_t x, const Route&, std::size_t) { return out.samples.lane(x / C, x % C); });
  return out;
}

EventChannelData<double> measure_event(const PatchSignals& s, const TransmitEvent& event) {
  const std::size_t R = s.row_count();
  if (event.bias.size() != R)
    throw std::invalid_argument("measure_event: bias has " + std::to_string(event.bias.size()) +
                                " entries for " + std::to_string(R) + " rows");
  EventChannelData<double> g;
  g.samples = Array3<double>(1, s.column_count(), s.sample_count());
  g.sample_rate = s.sample_rate;
  g.t0 = s.t0;
  g.carrier = s.carrier;
  auto dst = g.samples.slab(0);
  for (std::size_t r = 0; r < R; ++r) {
    const int b = event.bias[r];
    if (b == 0) continue;
    const auto src = s.samples.slab(r);
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += b * src[i];
  }
  return g;
}

RowBasis::RowBasis(const ArrayGeometry& geom, const PulseSpec& pulse, const ScattererField& field,
                   const MediumSpec& medium, double t_span, std::optional<std::vector<int>> receive_bias,
                   const SimulationOptions& options)
    : rows_(geom.row_count), cols_(geom.col_count), sample_rate_(medium.sampling_frequency),
      receive_bias_(std::move(receive_bias)), pulse_(pulse) {
  check_inputs(geom, field, medium, options);
  const auto R = static_cast<std::size_t>(rows_);
  const auto C = static_cast<std::size_t>(cols_);
  if (receive_bias_ && receive_bias_->size() != R)
    throw std::invalid_argument("row basis: receive bias needs one entry per row");
  const auto wave = synthesize(pulse, sample_rate_);
  const std::vector<int> ones(R, 1);
  const std::vector<double> zeros(R, 0.0);
  check_span(geom, ones, zeros, field, medium, wave.samples.size(), t_span);
  samples_ = samples_for(t_span, sample_rate_);
  rx_rows_ = receive_bias_ ? 1 : R;
  basis_.assign(R, Array3<double>(rx_rows_, C, samples_));
  if (field.empty()) return;

  const auto model = element_model(geom, medium, options.directivity);
  const TransmitFieldBuilder builder(wave, options.oversample, medium.speed_of_sound);
  std::vector<std::vector<TxElement>> tx(R);
  for (std::size_t r = 0; r < R; ++r) {
    std::vector<int> one(R, 0);
    one[r] = 1;
    tx[r] = transmit_elements(geom, one, zeros);
  }
  const auto rx = receive_crossings(geom);

  if (receive_bias_) {
    // Work is split by column; each column sums its rows under the bias.
    std::vector<std::vector<Route>> routes(C);
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t r = 0; r < R; ++r)
        if ((*receive_bias_)[r] != 0) routes[c].push_back({r * C + c, static_cast<double>((*receive_bias_)[r])});
    simulate_into(
        builder, tx, rx, field, medium.speed_of_sound, model, C, options.threads,
        [&](std::size_t c) -> const std::vector<Route>& { return routes[c]; },
        [&](std::size_t c, const Route&, std::size_t s) { return basis_[s].lane(0, c); });
  } else {
    simulate_into(
        builder, tx, rx, field, medium.speed_of_sound, model, R * C, options.threads,
        [](std::size_t x) { return std::array<Route, 1>{Route{x, 1.0}}; },
        [&](std::size_t x, const Route&, std::size_t s) { return basis_[s].lane(x / C, x % C); });
  }
}

namespace {

// Taps for reading x[n - delay_samples] as sum_j taps[j] * x[n - shift + j].
struct FractionalDelay {
  long shift = 0;
  std::vector<double> taps;
};

double lanczos4(double x) {
  if (std::abs(x) >= 4.0) return 0.0;
  return sinc(x) * sinc(x / 4.0);
}

FractionalDelay fractional_delay(double delay_samples) {
  FractionalDelay fd;
  const double fl = std::floor(delay_samples);
  const double alpha = delay_samples - fl;
  if (alpha < 1e-9 || alpha > 1.0 - 1e-9) {
    fd.shift = static_cast<long>(std::llround(delay_samples));
    fd.taps = {1.0};
    return fd;
  }
  // Interpolate at n - m - alpha from samples n - m - 1 + j, j = -3..4.
  const long m = static_cast<long>(fl);
  fd.shift = m + 4;
  fd.taps.resize(8);
  double sum = 0.0;
  for (int j = -3; j <= 4; ++j) {
    const double w = lanczos4(1.0 - alpha - j);
    fd.taps[static_cast<std::size_t>(j + 3)] = w;
    sum += w;
  }
  for (double& w : fd.taps) w /= sum;
  return fd;
}

// out[n] += scale * sum_j taps[j] * in[n - shift + j].
void add_delayed(std::span<double> out, std::span<const double> in, const FractionalDelay& fd, double scale) {
  const long n_out = static_cast<long>(out.size());
  const long n_in = static_cast<long>(in.size());
  for (std::size_t j = 0; j < fd.taps.size(); ++j) {
    const long off = static_cast<long>(j) - fd.shift;  // in index = n + off
    const long n_begin = std::max(0L, -off);
    const long n_end = std::min(n_out, n_in - off);
    const double w = scale * fd.taps[j];
    const double* src = in.data() + off;
    double* dst = out.data();
    for (long n = n_begin; n < n_end; ++n) dst[n] += w * src[n];
  }
}

}  // namespace

Array3<double> RowBasis::assemble(const TransmitEvent& event, int threads) const {
  const auto R = static_cast<std::size_t>(rows_);
  const auto C = static_cast<std::size_t>(cols_);
  event.validate(R);
  if (!(event.pulse == pulse_)) throw std::invalid_argument("row basis: event pulse differs from the basis pulse");
  const auto eff = event.effective_transmit();
  std::vector<FractionalDelay> delays(R);
  for (std::size_t r = 0; r < R; ++r) delays[r] = fractional_delay(event.row_delay[r] * sample_rate_);

  Array3<double> out(rx_rows_, C, samples_);
  parallel_for(rx_rows_ * C, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      auto lane = out.lane(x / C, x % C);
      for (std::size_t r = 0; r < R; ++r)
        if (eff[r] != 0) add_delayed(lane, basis_[r].lane(x / C, x % C), delays[r], eff[r]);
    }
  });
  return out;
}

namespace {

struct TransmitKey {
  std::vector<double> delay;
  std::vector<int> eff;
  bool operator==(const TransmitKey&) const = default;
};

bool shared_bias(std::span<const TransmitEvent> events) {
  return std::all_of(events.begin(), events.end(),
                     [&](const TransmitEvent& ev) { return ev.bias == events.front().bias; });
}

}  // namespace

SimulationEngine resolve_engine(const ArrayGeometry& geom, std::span<const TransmitEvent> events,
                                SimulationEngine requested) {
  if (requested != SimulationEngine::automatic) return requested;
  if (events.empty() || !shared_bias(events)) return SimulationEngine::direct;
  std::vector<TransmitKey> distinct;
  for (const auto& ev : events) {
    TransmitKey k{ev.row_delay, ev.effective_transmit()};
    if (std::find(distinct.begin(), distinct.end(), k) == distinct.end()) distinct.push_back(std::move(k));
    if (distinct.size() >= static_cast<std::size_t>(geom.row_count)) return SimulationEngine::row_basis;
  }
  return SimulationEngine::direct;
}

Acquisition run_acquisition(const RowBasis& basis, std::span<const TransmitEvent> events, int threads,
                            double t_span) {
  Acquisition acq;
  const std::size_t T = t_span > 0 ? samples_for(t_span, basis.sample_rate()) : basis.sample_count();
  if (T > basis.sample_count())
    throw std::invalid_argument("run_acquisition: requested " + std::to_string(T) + " samples from a basis of " +
                                std::to_string(basis.sample_count()));
  const std::size_t C = basis.column_count();
  acq.data.samples = Array3<double>(events.size(), C, T);
  acq.data.sample_rate = basis.sample_rate();
  acq.stats.basis_rows = basis.row_count();
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    if (basis.collapsed() && ev.bias != *basis.receive_bias())
      throw std::invalid_argument("run_acquisition: event " + std::to_string(e) +
                                  " uses a receive bias the collapsed row basis was not built for");
    auto part = basis.assemble(ev, threads);
    Array3<double> g;
    if (basis.collapsed()) {
      g = std::move(part);
    } else {
      PatchSignals s;
      s.samples = std::move(part);
      s.sample_rate = basis.sample_rate();
      g = measure_event(s, ev).samples;
    }
    for (std::size_t c = 0; c < C; ++c) {
      const auto src = g.lane(0, c);
      std::copy(src.begin(), src.begin() + static_cast<std::ptrdiff_t>(T), acq.data.samples.lane(e, c).begin());
    }
  }
  return acq;
}

Acquisition run_acquisition(const ArrayGeometry& geom, std::span<const TransmitEvent> events,
                            const ScattererField& field, const MediumSpec& medium, double t_span,
                            const SimulationOptions& options) {
  if (events.empty()) throw std::invalid_argument("run_acquisition: empty transmit sequence");
  geom.validate();
  medium.validate();
  for (std::size_t e = 0; e < events.size(); ++e) {
    events[e].validate(static_cast<std::size_t>(geom.row_count));
    if (!(events[e].pulse == events.front().pulse))
      throw std::invalid_argument("run_acquisition: event " + std::to_string(e) +
                                  " uses a different pulse; all events must share one excitation");
  }
  if (!(t_span > 0)) t_span = required_time_span(geom, events, field, medium);

  if (resolve_engine(geom, events, options.engine) == SimulationEngine::row_basis) {
    std::optional<std::vector<int>> bias;
    if (shared_bias(events)) bias = events.front().bias;
    const RowBasis basis(geom, events.front().pulse, field, medium, t_span, bias, options);
    return run_acquisition(basis, events, options.threads);
  }

  Acquisition acq;
  const auto T = samples_for(t_span, medium.sampling_frequency);
  const auto C = static_cast<std::size_t>(geom.col_count);
  acq.data.samples = Array3<double>(events.size(), C, T);
  acq.data.sample_rate = medium.sampling_frequency;

  // Small LRU cache keyed on what the wavefield actually depends on.
  std::vector<std::pair<TransmitKey, PatchSignals>> cache;
  for (std::size_t e = 0; e < events.size(); ++e) {
    const auto& ev = events[e];
    TransmitKey key{ev.row_delay, ev.effective_transmit()};
    auto it = std::find_if(cache.begin(), cache.end(), [&](const auto& entry) { return entry.first == key; });
    if (it != cache.end()) {
      ++acq.stats.cache_hits;
      std::rotate(it, it + 1, cache.end());
    } else {
      ++acq.stats.simulations;
      cache.emplace_back(std::move(key), simulate_patch_signals(geom, ev, field, medium, t_span, options));
      if (cache.size() > std::max<std::size_t>(options.cache_capacity, 1)) cache.erase(cache.begin());
    }
    const auto g = measure_event(cache.back().second, ev);
    std::copy(g.samples.flat().begin(), g.samples.flat().end(), acq.data.samples.slab(e).begin());
  }
  return acq;
}

}  // namespace rcaus
