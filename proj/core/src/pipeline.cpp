#include "rcaus/pipeline.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <stdexcept>

#include "rcaus/dataset_io.hpp"
#include "rcaus/encoding.hpp"
#include "rcaus/hash.hpp"
#include "rcaus/image_io.hpp"
#include "rcaus/parallel.hpp"

namespace fs = std::filesystem;

namespace rcaus {

void StageLog::record(const std::string& stage, const std::string& scheme, double seconds, const std::string& detail) {
  if (!out_) return;
  std::ostringstream line;
  line << "stage=" << stage;
  if (!scheme.empty()) line << " scheme=" << scheme;
  line << " seconds=" << std::fixed << std::setprecision(3) << seconds;
  if (!detail.empty()) line << ' ' << detail;
  *out_ << line.str() << '\n' << std::flush;
}

void StageLog::warn(const std::string& message) {
  if (out_) *out_ << "warning: " << message << '\n' << std::flush;
}

namespace {

class Stopwatch {
 public:
  double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count(); }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <class F>
auto in_stage(const std::string& stage, F&& f) {
  try {
    return f();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, e.what());
  }
}

}  // namespace

ScattererField make_phantom(const RunConfig& cfg, std::vector<std::string>* warnings) {
  switch (cfg.phantom.kind) {
    case PhantomKind::none: return {};
    case PhantomKind::grid: return make_grid(cfg.phantom.grid);
    case PhantomKind::cyst: {
      auto spec = cfg.phantom.cyst;
      spec.seed = cfg.run.seed;
      auto out = make_cyst(spec);
      if (warnings) warnings->insert(warnings->end(), out.warnings.begin(), out.warnings.end());
      return std::move(out.field);
    }
    case PhantomKind::file: return read_scatterers(fs::path(cfg.phantom.path));
  }
  return {};
}

Sequence scheme_sequence(const RunConfig& cfg, const SchemeEntry& scheme) {
  return build_sequence(scheme.spec, cfg.geometry, cfg.pulse, cfg.medium.speed_of_sound);
}

SchemeArtifacts scheme_artifacts(const RunConfig& cfg, const fs::path& dir, const SchemeEntry& scheme) {
  const bool cyst = cfg.phantom.kind == PhantomKind::cyst;
  return {dir / (scheme.name + ".events.bin"), dir / (scheme.name + ".decoded.bin"),
          dir / (scheme.name + ".volume.bin"), dir / (scheme.name + (cyst ? ".gcnr.csv" : ".resolution.csv"))};
}

EventChannelData<cplx> process_traces(const EventChannelData<double>& rf, const PulseSpec& pulse,
                                      const ProcessingConfig& processing, int threads) {
  const auto wave = synthesize(pulse, rf.sample_rate);
  const double f0 = center_frequency(pulse);
  double t0 = rf.t0;
  if (!processing.matched_filter) t0 -= 0.5 * static_cast<double>(wave.samples.size() - 1) / rf.sample_rate;

  const std::size_t E = rf.event_count(), C = rf.column_count();
  const std::size_t T_out =
      (rf.sample_count() + static_cast<std::size_t>(processing.decimation) - 1) / static_cast<std::size_t>(processing.decimation);
  EventChannelData<cplx> iq;
  iq.samples = Array3<cplx>(E, C, T_out);
  iq.sample_rate = rf.sample_rate / processing.decimation;
  iq.t0 = t0;
  iq.carrier = f0;
  parallel_for(E * C, threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t x = begin; x < end; ++x) {
      const auto lane = rf.samples.lane(x / C, x % C);
      std::vector<double> filtered;
      std::span<const double> src = lane;
      if (processing.matched_filter) {
        filtered = matched_filter(lane, rf.sample_rate, wave);
        src = filtered;
      }
      const auto bb = demodulate(src, f0, rf.sample_rate, processing.decimation, t0);
      std::copy(bb.samples.begin(), bb.samples.end(), iq.samples.lane(x / C, x % C).begin());
    }
  });
  return iq;
}

namespace {

SimulationOptions simulation_options(const RunConfig& cfg) {
  SimulationOptions opt;
  opt.directivity = cfg.simulate.directivity;
  opt.oversample = cfg.simulate.oversample;
  opt.threads = cfg.run.threads;
  opt.engine = cfg.simulate.engine;
  return opt;
}

}  // namespace

void BasisPool::reserve(const std::optional<std::vector<int>>& bias, double t_span) {
  auto& e = entries_[bias];
  if (e.basis) throw std::logic_error("basis pool: reserve after the basis was built");
  e.t_span = std::max(e.t_span, t_span);
}

const RowBasis& BasisPool::get(const RunConfig& cfg, const ScattererField& field,
                               const std::optional<std::vector<int>>& bias, bool* built) {
  auto it = entries_.find(bias);
  if (it == entries_.end()) throw std::logic_error("basis pool: no basis reserved for this receive bias");
  auto& e = it->second;
  if (built) *built = !e.basis;
  if (!e.basis)
    e.basis = std::make_unique<RowBasis>(cfg.geometry, cfg.pulse, field, cfg.medium, e.t_span, bias,
                                         simulation_options(cfg));
  return *e.basis;
}

double scheme_time_span(const RunConfig& cfg, const Sequence& seq, const ScattererField& field) {
  return cfg.simulate.t_span > 0 ? cfg.simulate.t_span
                                 : required_time_span(cfg.geometry, seq.events, field, cfg.medium);
}

std::optional<std::optional<std::vector<int>>> basis_key(const RunConfig& cfg, const Sequence& seq) {
  if (resolve_engine(cfg.geometry, seq.events, cfg.simulate.engine) != SimulationEngine::row_basis) return std::nullopt;
  const auto& bias = seq.events.front().bias;
  const bool shared = std::all_of(seq.events.begin(), seq.events.end(),
                                  [&](const TransmitEvent& ev) { return ev.bias == bias; });
  return shared ? std::optional<std::vector<int>>(bias) : std::nullopt;
}

AcquisitionStats simulate_stage(const RunConfig& cfg, const SchemeEntry& scheme, const ScattererField& field,
                                const fs::path& out, StageLog& log, BasisPool* pool) {
  return in_stage("simulate", [&] {
    Stopwatch sw;
    const auto seq = scheme_sequence(cfg, scheme);
    const auto opt = simulation_options(cfg);
    const double t_span = scheme_time_span(cfg, seq, field);
    const auto key = basis_key(cfg, seq);
    Acquisition acq;
    std::string basis_note;
    if (pool && key && pool->reserved(*key)) {
      bool built = false;
      const auto& basis = pool->get(cfg, field, *key, &built);
      acq = run_acquisition(basis, seq.events, opt.threads, t_span);
      basis_note = built ? " basis=built" : " basis=shared";
    } else {
      acq = run_acquisition(cfg.geometry, seq.events, field, cfg.medium, t_span, opt);
    }
    save(out, acq.data);
    log.record("simulate", scheme.name, sw.seconds(),
               "events=" + std::to_string(seq.events.size()) + " scatterers=" + std::to_string(field.size()) +
                   " simulations=" + std::to_string(acq.stats.simulations) +
                   " cache_hits=" + std::to_string(acq.stats.cache_hits) +
                   " basis_rows=" + std::to_string(acq.stats.basis_rows) + basis_note);
    return acq.stats;
  });
}

void decode_stage(const RunConfig& cfg, const SchemeEntry& scheme, const fs::path& in, const fs::path& out,
                  DecodeCode code, StageLog& log) {
  in_stage("decode", [&] {
    Stopwatch sw;
    const auto header = read_header(in);
    if (header.kind != DatasetKind::event_channel)
      throw FormatError(in.string() + " holds " + to_string(header.kind) + " data; decode expects event-channel data");
    EventChannelData<cplx> iq = header.format == SampleFormat::f32_real
                                    ? process_traces(load_event_channel_rf(in), cfg.pulse, cfg.processing, cfg.run.threads)
                                    : load_event_channel_iq(in);
    if (code == DecodeCode::automatic) code = scheme.spec.encoded() ? DecodeCode::hadamard : DecodeCode::identity;
    if (code == DecodeCode::hadamard) {
      const auto H = hadamard(static_cast<std::size_t>(cfg.geometry.row_count));
      save(out, hero_decode(iq, H, cfg.run.threads));
    } else {
      save(out, iq);
    }
    log.record("decode", scheme.name, sw.seconds(), code == DecodeCode::hadamard ? "code=hadamard" : "code=identity");
  });
}

void beamform_stage(const RunConfig& cfg, const SchemeEntry& scheme, const fs::path& in, const fs::path& out,
                    StageLog& log) {
  in_stage("beamform", [&] {
    Stopwatch sw;
    const auto header = read_header(in);
    const auto seq = scheme_sequence(cfg, scheme);
    Volume vol;
    if (header.kind == DatasetKind::decoded_aperture) {
      const auto models = seq.dataset_models();
      vol = das_volume(load_decoded(in), cfg.geometry, models, cfg.grid, cfg.beamform, cfg.medium.speed_of_sound);
    } else if (header.kind == DatasetKind::event_channel) {
      if (header.format != SampleFormat::f32_complex)
        throw FormatError(in.string() + " holds RF traces; beamforming needs demodulated IQ (run decode first)");
      vol = das_volume(load_event_channel_iq(in), cfg.geometry, seq.event_models, cfg.grid, cfg.beamform,
                       cfg.medium.speed_of_sound);
    } else {
      throw FormatError(in.string() + " holds " + to_string(header.kind) + " data; beamform expects channel data");
    }
    save(out, vol);
    const double s = sw.seconds();
    log.record("beamform", scheme.name, s,
               "voxels=" + std::to_string(cfg.grid.voxel_count()) +
                   " voxels_per_second=" + num(std::round(static_cast<double>(cfg.grid.voxel_count()) / std::max(s, 1e-9))));
  });
}

MetricsSummary metrics_stage(const RunConfig& cfg, const ScattererField& phantom, const fs::path& volume,
                             const fs::path& out, StageLog& log) {
  return in_stage("metrics", [&] {
    Stopwatch sw;
    const auto vol = load_volume(volume);
    MetricsSummary summary;
    std::ofstream csv(out, std::ios::binary | std::ios::trunc);
    if (!csv) throw Error("cannot write " + out.string());
    if (cfg.phantom.kind == PhantomKind::cyst) {
      GcnrOptions opt{cfg.metrics.bins, cfg.metrics.erosion};
      for (const auto& s : cfg.phantom.cyst.spheres) {
        try {
          summary.gcnr.push_back(gcnr_target(vol, s, cfg.geometry, cfg.medium.speed_of_sound, opt));
        } catch (const std::invalid_argument& e) {
          summary.warnings.push_back(std::string("gcnr skipped for a sphere: ") + e.what());
        }
      }
      if (cfg.phantom.cyst.spheres.empty()) summary.warnings.push_back("cyst phantom has no spheres; no gCNR targets");
      write_gcnr_csv(csv, summary.gcnr);
    } else {
      constexpr std::size_t kMaxTargets = 1000;
      ScattererField targets = phantom.size() <= kMaxTargets ? phantom : ScattererField{};
      if (phantom.size() > kMaxTargets)
        summary.warnings.push_back("phantom has " + std::to_string(phantom.size()) +
                                   " scatterers; too many for point resolution analysis");
      summary.resolution = resolution_report(vol, targets, cfg.geometry, cfg.medium.speed_of_sound,
                                             ResolutionOptions{cfg.metrics.search_radius});
      if (targets.empty()) summary.warnings.push_back("no point targets; resolution report has no peaks");
      if (summary.resolution->excluded > 0)
        summary.warnings.push_back(std::to_string(summary.resolution->excluded) +
                                   " point(s) unresolved and excluded from resolution statistics");
      write_resolution_csv(csv, *summary.resolution);
    }
    for (const auto& w : summary.warnings) log.warn(w);
    log.record("metrics", "", sw.seconds(), "output=" + out.filename().string());
    return summary;
  });
}

std::vector<fs::path> render_stage(const RunConfig& cfg, const fs::path& volume, const fs::path& out_dir,
                                   const RenderOptions& options) {
  return in_stage("render", [&] {
    const auto vol = load_volume(volume);
    const auto a = static_cast<std::size_t>(options.axis);
    std::vector<double> centers;
    if (options.center) {
      centers.push_back(*options.center);
    } else if (cfg.phantom.kind == PhantomKind::grid) {
      std::set<double> planes;
      for (const Vec3& p : make_grid(cfg.phantom.grid).positions) planes.insert(a == 0 ? p.x : a == 1 ? p.y : p.z);
      centers.assign(planes.begin(), planes.end());
    } else {
      centers.push_back(vol.grid.coordinate(options.axis, vol.grid.counts[a] / 2));
    }
    fs::create_directories(out_dir);
    std::string stem = volume.filename().string();
    if (const auto dot = stem.find('.'); dot != std::string::npos) stem = stem.substr(0, dot);
    const char axis_name = "xyz"[a];
    std::vector<fs::path> written;
    for (std::size_t i = 0; i < centers.size(); ++i) {
      double center = centers[i];
      double thickness = options.slab;
      if (!options.projection) {
        // Snap to the nearest layer and take exactly that layer.
        const double idx = std::round((center - vol.grid.coordinate(options.axis, 0)) / vol.grid.spacing[a]);
        const double clamped = std::clamp(idx, 0.0, static_cast<double>(vol.grid.counts[a] - 1));
        center = vol.grid.coordinate(options.axis, static_cast<std::size_t>(clamped));
        thickness = 0.0;
      }
      const auto img = mip(vol, options.axis, center, thickness);
      const std::string base = stem + "." + (options.projection ? "mip_" : "slice_") + axis_name + std::to_string(i);
      write_pgm(out_dir / (base + ".pgm"), img, options.db_range);
      write_image_csv(out_dir / (base + ".csv"), img);
      written.push_back(out_dir / (base + ".pgm"));
      written.push_back(out_dir / (base + ".csv"));
    }
    return written;
  });
}

std::string describe(const RunConfig& cfg) {
  std::ostringstream o;
  o << "geometry rows=" << cfg.geometry.row_count << " cols=" << cfg.geometry.col_count
    << " pitch=" << num(cfg.geometry.pitch) << " f0=" << num(cfg.geometry.center_frequency) << '\n';
  for (const auto& s : cfg.schemes) {
    const auto seq = scheme_sequence(cfg, s);
    const double rate = acquisition_rate(seq.events.size(), cfg.run.prf);
    char rate_text[32];
    std::snprintf(rate_text, sizeof rate_text, "%.2f", rate);
    o << "scheme " << s.name << " kind=" << to_string(s.spec.kind) << " events=" << seq.events.size()
      << " datasets=" << seq.dataset_models().size() << " prf=" << num(cfg.run.prf)
      << " acquisition_rate=" << rate_text << " Hz\n";
  }
  return o.str();
}

std::vector<ManifestEntry> write_manifest(const fs::path& dir, std::vector<std::string> files) {
  std::sort(files.begin(), files.end());
  files.erase(std::unique(files.begin(), files.end()), files.end());
  std::vector<ManifestEntry> entries;
  std::ofstream out(dir / "manifest.txt", std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write manifest in " + dir.string());
  for (const auto& f : files) {
    entries.push_back({f, fnv1a64_file(dir / f)});
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(entries.back().hash));
    out << hex << "  " << f << '\n';
  }
  return entries;
}

std::vector<ManifestEntry> read_manifest(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read manifest " + path.string());
  std::vector<ManifestEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    if (line.size() < 19) throw FormatError("manifest: malformed line '" + line + "'");
    ManifestEntry e;
    auto [p, ec] = std::from_chars(line.data(), line.data() + 16, e.hash, 16);
    if (ec != std::errc{} || p != line.data() + 16) throw FormatError("manifest: bad hash in '" + line + "'");
    e.path = line.substr(18);
    entries.push_back(std::move(e));
  }
  return entries;
}

RunResult run_pipeline(const RunConfig& cfg, std::ostream* log_stream) {
  const fs::path dir = cfg.run.output_dir;
  fs::create_directories(dir);
  std::ofstream run_log(dir / "run.log", std::ios::trunc);
  std::ostringstream buffer;
  StageLog log(&buffer);
  auto flush = [&] {
    run_log << buffer.str() << std::flush;
    if (log_stream) *log_stream << buffer.str() << std::flush;
    buffer.str({});
  };

  RunResult result;
  std::vector<std::string> files;
  std::vector<fs::path> completed;
  auto done = [&](const fs::path& p) {
    files.push_back(fs::relative(p, dir).generic_string());
    completed.push_back(p);
    flush();
  };

  try {
    Stopwatch sw;
    const auto phantom = in_stage("phantom", [&] { return make_phantom(cfg, &result.warnings); });
    for (const auto& w : result.warnings) log.warn(w);
    in_stage("phantom", [&] {
      write_scatterers(dir / "phantom.txt", phantom);
      return 0;
    });
    log.record("phantom", "", sw.seconds(), "scatterers=" + std::to_string(phantom.size()));
    done(dir / "phantom.txt");

    BasisPool pool;
    in_stage("simulate", [&] {
      for (const auto& s : cfg.schemes) {
        const auto seq = scheme_sequence(cfg, s);
        if (const auto key = basis_key(cfg, seq)) pool.reserve(*key, scheme_time_span(cfg, seq, phantom));
      }
      return 0;
    });

    std::ostringstream summary;
    summary << "scheme,kind,events,acquisition_rate,gcnr,norm_x,norm_y,norm_z,excluded\n";
    for (const auto& s : cfg.schemes) {
      const auto paths = scheme_artifacts(cfg, dir, s);
      SchemeResult sr;
      sr.name = s.name;
      sr.events = scheme_sequence(cfg, s).events.size();
      sr.acquisition_rate = acquisition_rate(sr.events, cfg.run.prf);
      sr.stats = simulate_stage(cfg, s, phantom, paths.events, log, &pool);
      done(paths.events);
      decode_stage(cfg, s, paths.events, paths.decoded, DecodeCode::automatic, log);
      done(paths.decoded);
      beamform_stage(cfg, s, paths.decoded, paths.volume, log);
      done(paths.volume);
      sr.metrics = metrics_stage(cfg, phantom, paths.volume, paths.metrics, log);
      done(paths.metrics);
      result.warnings.insert(result.warnings.end(), sr.metrics.warnings.begin(), sr.metrics.warnings.end());

      summary << s.name << ',' << to_string(s.spec.kind) << ',' << sr.events << ',' << num(sr.acquisition_rate) << ',';
      if (!sr.metrics.gcnr.empty()) summary << num(sr.metrics.gcnr.front().value);
      summary << ',';
      if (sr.metrics.resolution && sr.metrics.resolution->normalized[0].count > 0) {
        const auto& n = sr.metrics.resolution->normalized;
        summary << num(n[0].mean) << ',' << num(n[1].mean) << ',' << num(n[2].mean) << ','
                << sr.metrics.resolution->excluded;
      } else {
        summary << ",,," << (sr.metrics.resolution ? std::to_string(sr.metrics.resolution->excluded) : "");
      }
      summary << '\n';
      result.schemes.push_back(std::move(sr));
    }
    {
      std::ofstream out(dir / "summary.csv", std::ios::binary | std::ios::trunc);
      out << summary.str();
    }
    done(dir / "summary.csv");
    result.manifest = write_manifest(dir, files);
    flush();
  } catch (const StageError& e) {
    flush();
    throw StageError(e.stage(), e.detail(), completed);
  }
  return result;
}

}  // namespace rcaus
