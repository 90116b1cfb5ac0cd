#include <benchmark/benchmark.h>

#include "rcaus/beamform.hpp"
#include "rcaus/encoding.hpp"
#include "rcaus/pipeline.hpp"
#include "rcaus/rng.hpp"

using namespace rcaus;

namespace {

const MediumSpec kMedium{1540.0, 50e6};
const PulseSpec kPulse = ToneBurst{6.25e6, 1, Window::rectangular};

ArrayGeometry array(int n) { return ArrayGeometry{n, n, 250e-6, 30e-6, 6.25e6}; }

EventChannelData<double> noise(std::size_t events, std::size_t cols, std::size_t samples) {
  Philox4x64 rng(1, 0);
  EventChannelData<double> g;
  g.samples = Array3<double>(events, cols, samples);
  for (double& v : g.samples.flat()) v = rng.normal();
  g.sample_rate = kMedium.sampling_frequency;
  return g;
}

// Dense (1/E) H g, the product the fast transform replaces.
void dense_decode(const EventChannelData<double>& g, const EncodingMatrix& H, Array3<double>& out) {
  const std::size_t E = H.rows(), C = g.samples.dim(1), T = g.samples.dim(2);
  const double scale = 1.0 / static_cast<double>(E);
  for (std::size_t r = 0; r < E; ++r)
    for (std::size_t c = 0; c < C; ++c)
      for (std::size_t t = 0; t < T; ++t) {
        double acc = 0.0;
        for (std::size_t e = 0; e < E; ++e) acc += H(r, e) * g.samples(e, c, t);
        out(r, c, t) = acc * scale;
      }
}

void BM_DecodeFast(benchmark::State& state) {
  const auto E = static_cast<std::size_t>(state.range(0));
  const auto g = noise(E, E, 512);
  const auto H = hadamard(E);
  for (auto _ : state) benchmark::DoNotOptimize(hero_decode(g, H));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.samples.size()));
}
BENCHMARK(BM_DecodeFast)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_DecodeDense(benchmark::State& state) {
  const auto E = static_cast<std::size_t>(state.range(0));
  const auto g = noise(E, E, 512);
  const auto H = hadamard(E);
  Array3<double> out(E, E, 512);
  for (auto _ : state) {
    dense_decode(g, H, out);
    benchmark::DoNotOptimize(out.flat().data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * g.samples.size()));
}
BENCHMARK(BM_DecodeDense)->Arg(16)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);

// Voxels per second for a decoded 32x32 aperture with `range(0)` transmit angles.
void BM_Beamform(benchmark::State& state) {
  const auto g = array(32);
  SchemeSpec spec;
  spec.angle_count = static_cast<int>(state.range(0));
  const auto seq = build_sequence(spec, g, kPulse, kMedium.speed_of_sound);
  ScattererField f;
  f.add({0, 0, 8e-3}, 1.0);
  const auto acq = run_acquisition(g, seq.events, f, kMedium);
  const auto decoded = hero_decode(process_traces(acq.data, kPulse, ProcessingConfig{}, 1), *seq.encoding);
  const auto grid = VolumeGrid::centered({0, 0, 8e-3}, {50e-6, 50e-6, 20e-6}, {16, 16, 16});
  const auto models = seq.dataset_models();
  for (auto _ : state) benchmark::DoNotOptimize(das_volume(decoded, g, models, grid, BeamformConfig{}, 1540.0));
  state.counters["voxels_per_second"] =
      benchmark::Counter(static_cast<double>(grid.voxel_count()), benchmark::Counter::kIsIterationInvariantRate);
}
BENCHMARK(BM_Beamform)->Arg(1)->Arg(9)->Unit(benchmark::kMillisecond);

ScattererField speckle(std::size_t n) {
  Philox4x64 rng(5, 0);
  ScattererField f;
  for (std::size_t i = 0; i < n; ++i)
    f.add({(rng.uniform() - 0.5) * 6e-3, (rng.uniform() - 0.5) * 6e-3, 5e-3 + 4e-3 * rng.uniform()}, rng.normal());
  return f;
}

// One direct patch simulation (a HERO set) on a 32x32 array.
void BM_SimulatePatch(benchmark::State& state) {
  const auto g = array(32);
  const auto seq = build_sequence(SchemeSpec{}, g, kPulse, kMedium.speed_of_sound);
  const auto f = speckle(static_cast<std::size_t>(state.range(0)));
  const double span = required_time_span(g, seq.events, f, kMedium);
  for (auto _ : state) benchmark::DoNotOptimize(simulate_patch_signals(g, seq.events.front(), f, kMedium, span));
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations()) * state.range(0));
}
BENCHMARK(BM_SimulatePatch)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

// Assembling plane-wave events from a prebuilt collapsed row basis.
void BM_RowBasisAssemble(benchmark::State& state) {
  const auto g = array(32);
  SchemeSpec spec;
  spec.kind = SchemeKind::tpw;
  spec.angle_count = 32;
  const auto seq = build_sequence(spec, g, kPulse, kMedium.speed_of_sound);
  const auto f = speckle(200);
  const double span = required_time_span(g, seq.events, f, kMedium);
  const RowBasis basis(g, kPulse, f, kMedium, span, std::vector<int>(32, 1));
  std::size_t i = 0;
  for (auto _ : state) benchmark::DoNotOptimize(basis.assemble(seq.events[i++ % seq.events.size()]));
}
BENCHMARK(BM_RowBasisAssemble)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
