#include <gtest/gtest.h>

#include "rcaus/encoding.hpp"
#include "rcaus/simulate.hpp"
#include "support.hpp"

using namespace rcaus;

namespace {

const ToneBurst kBurst{6.25e6, 2, Window::hann};

TransmitEvent plane_event(int rows, double delay_step = 0.0) {
  TransmitEvent ev;
  ev.row_polarity.assign(static_cast<std::size_t>(rows), 1);
  ev.bias.assign(static_cast<std::size_t>(rows), 1);
  ev.pulse = kBurst;
  for (int r = 0; r < rows; ++r) ev.row_delay.push_back(delay_step * (delay_step >= 0 ? r : r - (rows - 1)));
  return ev;
}

ScattererField two_points() {
  ScattererField f;
  f.add({0.3e-3, -0.2e-3, 3.0e-3}, 1.0);
  f.add({-0.5e-3, 0.4e-3, 4.2e-3}, -0.6);
  return f;
}

double peak_abs(std::span<const double> v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double sinc(double x) { return x == 0.0 ? 1.0 : std::sin(kPi * x) / (kPi * x); }

double directivity(const ArrayGeometry& g, const MediumSpec& m, Vec3 d) {
  const double r = d.norm();
  const double sin_phi = std::hypot(d.x, d.y) / r;
  return sinc(g.element_width() * g.center_frequency / m.speed_of_sound * sin_phi) * d.z / r;
}

// Straight evaluation of the discretized model, one output sample at a time.
// With fine_factor > 0 the transmit field is sampled on a grid of spacing
// 1 / (fine_factor fs) and read back by linear interpolation, as the engine does;
// with fine_factor == 0 the echo is evaluated in continuous time.
Array3<double> brute_force(const ArrayGeometry& g, const TransmitEvent& ev, const ScattererField& field,
                           const MediumSpec& m, std::size_t T, int fine_factor) {
  const auto pulse = synthesize(ev.pulse, m.sampling_frequency);
  const double fs = m.sampling_frequency, c = m.speed_of_sound;
  const auto eff = ev.effective_transmit();
  Array3<double> out(static_cast<std::size_t>(g.row_count), static_cast<std::size_t>(g.col_count), T);
  for (std::size_t k = 0; k < field.size(); ++k) {
    const Vec3 p = field.positions[k];
    // Transmit field as a function of time in samples.
    auto tx_field = [&](double u) {
      double acc = 0.0;
      for (int r = 0; r < g.row_count; ++r) {
        if (eff[static_cast<std::size_t>(r)] == 0) continue;
        for (int cc = 0; cc < g.col_count; ++cc) {
          const Vec3 d = p - crossing_position(g, r, cc);
          const double arrival = (ev.row_delay[static_cast<std::size_t>(r)] + d.norm() / c) * fs;
          acc += eff[static_cast<std::size_t>(r)] * field.amplitudes[k] * directivity(g, m, d) / d.norm() *
                 pulse.at((u - arrival) / fs);
        }
      }
      return acc;
    };
    for (int r = 0; r < g.row_count; ++r)
      for (int cc = 0; cc < g.col_count; ++cc) {
        const Vec3 d = p - crossing_position(g, r, cc);
        const double gain = directivity(g, m, d) / d.norm();
        const double lag = d.norm() / c * fs;
        auto lane = out.lane(static_cast<std::size_t>(r), static_cast<std::size_t>(cc));
        for (std::size_t n = 0; n < T; ++n) {
          const double u = static_cast<double>(n) - lag;
          if (fine_factor == 0) {
            lane[n] += gain * tx_field(u);
          } else {
            const double pos = u * fine_factor;
            const double q = std::floor(pos), fr = pos - q;
            lane[n] += gain * ((1 - fr) * tx_field(q / fine_factor) + fr * tx_field((q + 1) / fine_factor));
          }
        }
      }
  }
  return out;
}

}  // namespace

TEST(Simulate, MatchesBruteForceDiscretization) {
  const auto g = test::small_array(4, 5);
  const auto m = test::medium();
  auto ev = plane_event(4, 13e-9);
  ev.row_polarity[2] = -1;
  const auto field = two_points();
  const double span = required_time_span(g, std::span(&ev, 1), field, m);
  for (int U : {1, 4}) {
    SimulationOptions opt;
    opt.oversample = U;
    const auto s = simulate_patch_signals(g, ev, field, m, span, opt);
    const auto ref = brute_force(g, ev, field, m, s.sample_count(), U);
    const double scale = peak_abs(ref.flat());
    ASSERT_GT(scale, 0.0);
    for (std::size_t i = 0; i < ref.size(); ++i) ASSERT_NEAR(s.samples.flat()[i], ref.flat()[i], 1e-12 * scale) << U;
  }
}

TEST(Simulate, OversamplingConvergesToContinuousEcho) {
  const auto g = test::small_array(4, 4);
  const auto m = test::medium();
  const auto ev = plane_event(4, 7e-9);
  const auto field = two_points();
  const double span = required_time_span(g, std::span(&ev, 1), field, m);
  const auto T = static_cast<std::size_t>(std::ceil(span * m.sampling_frequency - 1e-6));
  const auto exact = brute_force(g, ev, field, m, T, 0);
  std::vector<double> err;
  for (int U : {1, 2, 4, 8}) {
    SimulationOptions opt;
    opt.oversample = U;
    const auto s = simulate_patch_signals(g, ev, field, m, span, opt);
    err.push_back(test::relative_rms<double>(s.samples.flat(), exact.flat()));
  }
  for (std::size_t i = 1; i < err.size(); ++i) EXPECT_LT(err[i], err[i - 1]);
  EXPECT_LT(err.back(), 0.01);
}

TEST(Simulate, EchoArrivesAtRoundTripTime) {
  const auto g = test::small_array(8, 8);
  const auto m = test::medium();
  const auto ev = plane_event(8);
  ScattererField f;
  f.add({0, 0, 5e-3}, 1.0);
  SimulationOptions opt;
  opt.directivity = Directivity::omni;
  const double span = required_time_span(g, std::span(&ev, 1), f, m);
  const auto s = simulate_patch_signals(g, ev, f, m, span, opt);
  const auto g0 = measure_event(s, ev);
  // Summing every crossing peaks near 2z/c plus the burst's half duration.
  std::vector<double> sum(g0.sample_count(), 0.0);
  for (std::size_t c = 0; c < g0.column_count(); ++c)
    for (std::size_t n = 0; n < sum.size(); ++n) sum[n] += g0.samples(0, c, n);
  const double expected = 2 * 5e-3 / m.speed_of_sound + nominal_duration(kBurst) / 2;
  const auto it = std::max_element(sum.begin(), sum.end(), [](double a, double b) { return std::abs(a) < std::abs(b); });
  const double t_peak = static_cast<double>(it - sum.begin()) / m.sampling_frequency;
  EXPECT_NEAR(t_peak, expected, 0.5 / g.center_frequency);
}

TEST(Simulate, IsLinearInTheScatterers) {
  const auto g = test::small_array(6, 6);
  const auto m = test::medium();
  const auto ev = plane_event(6, 10e-9);
  ScattererField a, b, both;
  a.add({0.1e-3, 0, 2.5e-3}, 1.0);
  b.add({-0.4e-3, 0.2e-3, 3.5e-3}, 0.5);
  both = a;
  both.add(b.positions[0], b.amplitudes[0]);
  const double span = required_time_span(g, std::span(&ev, 1), both, m);
  const auto sa = simulate_patch_signals(g, ev, a, m, span);
  const auto sb = simulate_patch_signals(g, ev, b, m, span);
  const auto sab = simulate_patch_signals(g, ev, both, m, span);
  const double scale = peak_abs(sab.samples.flat());
  for (std::size_t i = 0; i < sab.samples.size(); ++i)
    ASSERT_NEAR(sab.samples.flat()[i], sa.samples.flat()[i] + sb.samples.flat()[i], 1e-13 * scale);
}

TEST(Simulate, ShortSpanIsAnError) {
  const auto g = test::small_array(4, 4);
  const auto m = test::medium();
  const auto ev = plane_event(4);
  const auto f = two_points();
  const double span = required_time_span(g, std::span(&ev, 1), f, m);
  EXPECT_NO_THROW(simulate_patch_signals(g, ev, f, m, span));
  EXPECT_THROW(simulate_patch_signals(g, ev, f, m, span - 5 / m.sampling_frequency), Error);
  EXPECT_THROW(simulate_patch_signals(g, ev, f, m, 0.0), std::invalid_argument);
}

TEST(Simulate, EventsAreValidated) {
  auto ev = plane_event(4);
  ev.row_delay[1] = -1e-9;
  EXPECT_THROW(ev.validate(4), std::invalid_argument);
  ev = plane_event(4);
  ev.row_polarity.assign(4, 0);
  EXPECT_THROW(ev.validate(4), std::invalid_argument);
  ev = plane_event(4);
  ev.bias.pop_back();
  EXPECT_THROW(ev.validate(4), std::invalid_argument);
  EXPECT_THROW(plane_event(4).validate(5), std::invalid_argument);
}

TEST(Simulate, PolarityAndBiasMultiply) {
  const auto g = test::small_array(4, 4);
  const auto m = test::medium();
  const auto f = two_points();
  auto ev = plane_event(4, 5e-9);
  auto flipped = ev;
  flipped.row_polarity[1] = -1;
  flipped.bias[1] = -1;
  EXPECT_EQ(ev.effective_transmit(), flipped.effective_transmit());
  const double span = required_time_span(g, std::span(&ev, 1), f, m);
  const auto s = simulate_patch_signals(g, ev, f, m, span);
  EXPECT_EQ(simulate_patch_signals(g, flipped, f, m, span).samples, s.samples);

  auto negated = ev;
  for (auto& p : negated.row_polarity) p = -p;
  const auto sn = simulate_patch_signals(g, negated, f, m, span);
  for (std::size_t i = 0; i < s.samples.size(); ++i) ASSERT_EQ(sn.samples.flat()[i], -s.samples.flat()[i]);

  // The receive side applies the bias per row.
  const auto g1 = measure_event(s, ev);
  const auto g2 = measure_event(s, flipped);
  for (std::size_t c = 0; c < 4; ++c)
    for (std::size_t n = 0; n < s.sample_count(); ++n)
      ASSERT_NEAR(g1.samples(0, c, n) - g2.samples(0, c, n), 2 * s.samples(1, c, n), 1e-12 * peak_abs(s.samples.flat()));
}

TEST(Simulate, ResultDoesNotDependOnThreadCount) {
  const auto g = test::small_array(8, 8);
  const auto m = test::medium();
  const auto ev = plane_event(8, 9e-9);
  ScattererField f;
  for (int i = 0; i < 300; ++i) f.add({(i % 7 - 3) * 0.2e-3, (i % 5 - 2) * 0.3e-3, 2e-3 + i * 1e-5}, 1.0 + 0.01 * i);
  const double span = required_time_span(g, std::span(&ev, 1), f, m);
  SimulationOptions one, three;
  three.threads = 3;
  EXPECT_EQ(simulate_patch_signals(g, ev, f, m, span, one).samples,
            simulate_patch_signals(g, ev, f, m, span, three).samples);
}

TEST(RowBasis, ZeroDelayEventsMatchDirectSimulation) {
  const auto g = test::small_array(8, 6);
  const auto m = test::medium();
  const auto f = two_points();
  const auto H = hadamard(8);
  std::vector<TransmitEvent> events;
  for (std::size_t e = 0; e < 8; ++e) {
    auto ev = plane_event(8);
    ev.row_polarity = bias_schedule(H, e);
    events.push_back(ev);  // unit bias, Hadamard polarity
  }
  SimulationOptions direct, basis;
  basis.engine = SimulationEngine::row_basis;
  const auto a = run_acquisition(g, events, f, m, 0.0, direct);
  const auto b = run_acquisition(g, events, f, m, 0.0, basis);
  EXPECT_EQ(a.stats.simulations, 8u);
  EXPECT_EQ(b.stats.basis_rows, 8u);
  ASSERT_EQ(a.data.samples.size(), b.data.samples.size());
  const double scale = peak_abs(a.data.samples.flat());
  for (std::size_t i = 0; i < a.data.samples.size(); ++i)
    ASSERT_NEAR(a.data.samples.flat()[i], b.data.samples.flat()[i], 1e-12 * scale);
}

TEST(RowBasis, FractionalDelaysStayCloseToDirectSimulation) {
  const auto g = test::small_array(8, 8);
  const auto m = test::medium();
  const auto f = two_points();
  std::vector<TransmitEvent> events{plane_event(8, 23.7e-9), plane_event(8, -11.3e-9)};
  SimulationOptions direct, basis;
  basis.engine = SimulationEngine::row_basis;
  const auto a = run_acquisition(g, events, f, m, 0.0, direct);
  const auto b = run_acquisition(g, events, f, m, 0.0, basis);
  EXPECT_LT(test::relative_rms<double>(b.data.samples.flat(), a.data.samples.flat()), 0.01);
}

TEST(RowBasis, CollapsedAndFullBasesAgree) {
  const auto g = test::small_array(4, 4);
  const auto m = test::medium();
  const auto f = two_points();
  auto ev = plane_event(4, 17e-9);
  ev.bias = {1, -1, 1, 1};
  const double span = required_time_span(g, std::span(&ev, 1), f, m) + 1e-6;
  const RowBasis full(g, kBurst, f, m, span, std::nullopt);
  const RowBasis collapsed(g, kBurst, f, m, span, ev.bias);
  EXPECT_FALSE(full.collapsed());
  EXPECT_TRUE(collapsed.collapsed());
  const auto a = run_acquisition(full, std::span(&ev, 1));
  const auto b = run_acquisition(collapsed, std::span(&ev, 1));
  const double scale = peak_abs(a.data.samples.flat());
  for (std::size_t i = 0; i < a.data.samples.size(); ++i)
    ASSERT_NEAR(a.data.samples.flat()[i], b.data.samples.flat()[i], 1e-12 * scale);

  auto other = ev;
  other.bias = {1, 1, 1, 1};
  EXPECT_THROW(run_acquisition(collapsed, std::span(&other, 1)), std::invalid_argument);
  auto chirped = ev;
  chirped.pulse = Chirp{4e6, 8e6, 2e-6, Window::rectangular, 0.0};
  EXPECT_THROW(full.assemble(chirped), std::invalid_argument);
}

TEST(RowBasis, TruncatedSpanMatchesShorterBasis) {
  const auto g = test::small_array(4, 4);
  const auto m = test::medium();
  const auto f = two_points();
  const auto ev = plane_event(4, 8e-9);
  const double span = required_time_span(g, std::span(&ev, 1), f, m);
  const RowBasis longer(g, kBurst, f, m, span + 2e-6, ev.bias);
  const RowBasis exact(g, kBurst, f, m, span, ev.bias);
  EXPECT_EQ(run_acquisition(longer, std::span(&ev, 1), 1, span).data.samples,
            run_acquisition(exact, std::span(&ev, 1)).data.samples);
  EXPECT_THROW(run_acquisition(exact, std::span(&ev, 1), 1, span + 1e-6), std::invalid_argument);
}

TEST(Acquisition, EngineSelection) {
  const auto g = test::small_array(4, 4);
  std::vector<TransmitEvent> few{plane_event(4, 1e-9), plane_event(4, 2e-9), plane_event(4, 3e-9)};
  EXPECT_EQ(resolve_engine(g, few, SimulationEngine::automatic), SimulationEngine::direct);
  auto enough = few;
  enough.push_back(plane_event(4, 4e-9));
  EXPECT_EQ(resolve_engine(g, enough, SimulationEngine::automatic), SimulationEngine::row_basis);
  EXPECT_EQ(resolve_engine(g, enough, SimulationEngine::direct), SimulationEngine::direct);
  auto mixed_bias = enough;
  mixed_bias[2].bias[0] = -1;
  EXPECT_EQ(resolve_engine(g, mixed_bias, SimulationEngine::automatic), SimulationEngine::direct);
  auto repeated = few;
  repeated.push_back(few[0]);
  EXPECT_EQ(resolve_engine(g, repeated, SimulationEngine::automatic), SimulationEngine::direct);
}

TEST(Acquisition, HeroSetCostsOneSimulation) {
  const auto g = test::small_array(8, 4);
  const auto m = test::medium();
  const auto H = hadamard(8);
  std::vector<TransmitEvent> events;
  for (std::size_t e = 0; e < 8; ++e) {
    auto ev = plane_event(8, 6e-9);
    ev.bias = bias_schedule(H, e);
    ev.row_polarity = ev.bias;  // effective transmit is all +1
    events.push_back(ev);
  }
  const auto acq = run_acquisition(g, events, two_points(), m);
  EXPECT_EQ(acq.stats.simulations, 1u);
  EXPECT_EQ(acq.stats.cache_hits, 7u);
  EXPECT_EQ(acq.data.event_count(), 8u);
}

TEST(Acquisition, RejectsMixedPulses) {
  const auto g = test::small_array(4, 4);
  auto a = plane_event(4), b = plane_event(4);
  b.pulse = ToneBurst{5e6, 2, Window::hann};
  std::vector<TransmitEvent> events{a, b};
  EXPECT_THROW(run_acquisition(g, events, two_points(), test::medium()), std::invalid_argument);
  EXPECT_THROW(run_acquisition(g, std::span<const TransmitEvent>(), two_points(), test::medium()),
               std::invalid_argument);
}

TEST(Simulate, ZeroAndCancellingFieldsAreSilent) {
  const auto g = test::small_array(4, 4);
  const auto m = test::medium();
  const auto ev = plane_event(4);
  ScattererField f;
  f.add({0, 0, 3e-3}, 0.0);
  const double span = required_time_span(g, std::span(&ev, 1), f, m);
  EXPECT_EQ(peak_abs(simulate_patch_signals(g, ev, f, m, span).samples.flat()), 0.0);
  f.amplitudes[0] = 0.8;
  f.add({0, 0, 3e-3}, -0.8);
  EXPECT_EQ(peak_abs(simulate_patch_signals(g, ev, f, m, span).samples.flat()), 0.0);
}

TEST(Simulate, OnAxisAmplitudeFallsWithBothLegs) {
  // One crossing under an on-axis scatterer, at depths that put both legs on
  // whole samples so no interpolation loss enters the ratio.
  const auto g = test::small_array(1, 1);
  const auto m = test::medium();
  const auto ev = plane_event(1);
  SimulationOptions opt;
  opt.directivity = Directivity::omni;
  ScattererField near, far;
  const double step = m.speed_of_sound / m.sampling_frequency;
  near.add({0, 0, 130 * step}, 1.0);
  far.add({0, 0, 260 * step}, 1.0);
  const double span = required_time_span(g, std::span(&ev, 1), far, m);
  auto rms = [&](const ScattererField& f) {
    double e = 0.0;
    for (double v : simulate_patch_signals(g, ev, f, m, span, opt).samples.flat()) e += v * v;
    return std::sqrt(e);
  };
  EXPECT_NEAR(rms(near) / rms(far), 4.0, 1e-9);
}

TEST(Measure, BiasSelectsAndSumsRows) {
  PatchSignals s;
  s.samples = test::random_array<double>(4, 3, 10, 21);
  s.sample_rate = 50e6;
  auto ev = plane_event(4);
  const auto all = measure_event(s, ev);
  ev.bias = {0, 0, 1, 0};
  const auto one = measure_event(s, ev);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t n = 0; n < 10; ++n) {
      double sum = 0.0;
      for (std::size_t r = 0; r < 4; ++r) sum += s.samples(r, c, n);
      EXPECT_NEAR(all.samples(0, c, n), sum, 1e-14);
      EXPECT_EQ(one.samples(0, c, n), s.samples(2, c, n));
    }
  ev.bias = {1, 1};
  EXPECT_THROW(measure_event(s, ev), std::invalid_argument);
}

TEST(Measure, HadamardBiasMatchesEncoder) {
  ApertureData<double> s;
  s.samples = test::random_array<double>(16, 5, 12, 22);
  s.sample_rate = 50e6;
  const auto H = hadamard(16);
  const auto g = hero_encode(s, H);
  auto ev = plane_event(16);
  for (std::size_t e = 0; e < 16; ++e) {
    ev.bias = bias_schedule(H, e);
    const auto m = measure_event(s, ev);
    for (std::size_t i = 0; i < m.samples.size(); ++i) ASSERT_EQ(m.samples.flat()[i], g.samples.slab(e)[i]);
  }
}

TEST(Acquisition, HeroSequenceEqualsEncodedPatchSignals) {
  const auto g = test::small_array(16, 16);
  const auto m = test::medium();
  const auto f = two_points();
  const auto H = hadamard(16);
  std::vector<TransmitEvent> events;
  for (std::size_t e = 0; e < 16; ++e) {
    auto ev = plane_event(16, 4.4e-9);
    ev.bias = ev.row_polarity = bias_schedule(H, e);
    events.push_back(ev);
  }
  const auto acq = run_acquisition(g, events, f, m);
  EXPECT_EQ(acq.stats.simulations, 1u);
  const auto unit = plane_event(16, 4.4e-9);
  const double span = static_cast<double>(acq.data.sample_count()) / m.sampling_frequency;
  const auto ref = hero_encode(simulate_patch_signals(g, unit, f, m, span), H);
  ASSERT_EQ(ref.samples.size(), acq.data.samples.size());
  EXPECT_LE(test::relative_rms<double>(acq.data.samples.flat(), ref.samples.flat()), 1e-12);
}
