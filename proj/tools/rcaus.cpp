// rcaus: command-line front end for simulation, decoding, beamforming and metrics.
// Exit codes: 0 success, 2 config or usage error, 3 stage error.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "rcaus/pipeline.hpp"

namespace fs = std::filesystem;
using namespace rcaus;

namespace {

constexpr int kUsageError = 2;
constexpr int kStageError = 3;

struct Common {
  std::string config;
  std::string scheme;
  int threads = -1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("config", c.config, "Run configuration file")->required()->check(CLI::ExistingFile);
  cmd->add_option("--scheme", c.scheme, "Scheme name from the config (default: first)");
  cmd->add_option("--threads", c.threads, "Worker threads (0 = all cores); overrides run.threads")
      ->check(CLI::NonNegativeNumber);
}

RunConfig load(const Common& c) {
  auto cfg = load_config(c.config);
  if (c.threads >= 0) {
    cfg.run.threads = c.threads;
    cfg.beamform.threads = c.threads;
  }
  return cfg;
}

const SchemeEntry& pick(const RunConfig& cfg, const Common& c) {
  if (c.scheme.empty()) return cfg.schemes.front();
  try {
    return cfg.scheme(c.scheme);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(0, e.what());
  }
}

Axis parse_axis(const std::string& s) {
  if (s == "x") return Axis::x;
  if (s == "y") return Axis::y;
  return Axis::z;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Row-column array volumetric imaging toolkit"};
  app.require_subcommand(1);

  Common common;
  std::string out, input, output, code = "auto", mip_axis, slice_axis;
  std::optional<double> prf, center;
  double slab = 5e-3, db_range = 40.0;

  auto* describe_cmd = app.add_subcommand("describe", "Print sequence lengths and acquisition rates");
  add_common(describe_cmd, common);
  describe_cmd->add_option("--prf", prf, "Pulse repetition frequency in Hz; overrides run.prf")
      ->check(CLI::PositiveNumber);

  auto* simulate_cmd = app.add_subcommand("simulate", "Generate the phantom and simulate RF column traces");
  add_common(simulate_cmd, common);
  simulate_cmd->add_option("--out", out, "Output dataset (default <output_dir>/<scheme>.events.bin)");

  auto* decode_cmd = app.add_subcommand("decode", "Matched filter, demodulate and HERO-decode");
  add_common(decode_cmd, common);
  decode_cmd->add_option("--input", input, "Event-channel dataset")->required()->check(CLI::ExistingFile);
  decode_cmd->add_option("--output", output, "Output dataset")->required();
  decode_cmd->add_option("--code", code, "Decoding matrix")->check(CLI::IsMember({"auto", "hadamard", "identity"}));

  auto* beamform_cmd = app.add_subcommand("beamform", "Delay-and-sum a decoded or column IQ dataset");
  add_common(beamform_cmd, common);
  beamform_cmd->add_option("--input", input, "Decoded dataset")->required()->check(CLI::ExistingFile);
  beamform_cmd->add_option("--output", output, "Output volume")->required();

  auto* metrics_cmd = app.add_subcommand("metrics", "Resolution or gCNR report for a volume");
  add_common(metrics_cmd, common);
  metrics_cmd->add_option("--input", input, "Volume dataset")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--output", output, "Report CSV")->required();

  auto* render_cmd = app.add_subcommand("render", "Write MIPs or slices as P5 graymaps plus CSV");
  add_common(render_cmd, common);
  render_cmd->add_option("--input", input, "Volume dataset")->required()->check(CLI::ExistingFile);
  render_cmd->add_option("--out", out, "Output directory")->required();
  auto* mip_opt = render_cmd->add_option("--mip", mip_axis, "Projection axis")->check(CLI::IsMember({"x", "y", "z"}));
  auto* slice_opt =
      render_cmd->add_option("--slice", slice_axis, "Slice axis")->check(CLI::IsMember({"x", "y", "z"}));
  mip_opt->excludes(slice_opt);
  render_cmd->add_option("--slab", slab, "Projection slab thickness in m")->check(CLI::PositiveNumber);
  render_cmd->add_option("--center", center, "Slab or slice center in m (default: each phantom plane)");
  render_cmd->add_option("--db-range", db_range, "Displayed dynamic range in dB")->check(CLI::PositiveNumber);

  auto* run_cmd = app.add_subcommand("run", "Run every stage for every scheme");
  add_common(run_cmd, common);
  run_cmd->add_option("--out", out, "Output directory; overrides run.output_dir");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsageError;
  }

  StageLog log(&std::cerr);
  try {
    auto cfg = load(common);
    if (describe_cmd->parsed()) {
      if (prf) cfg.run.prf = *prf;
      std::cout << describe(cfg);
    } else if (simulate_cmd->parsed()) {
      const auto& s = pick(cfg, common);
      fs::path target = out.empty() ? scheme_artifacts(cfg, cfg.run.output_dir, s).events : fs::path(out);
      if (target.has_parent_path()) fs::create_directories(target.parent_path());
      std::vector<std::string> warnings;
      const auto field = make_phantom(cfg, &warnings);
      for (const auto& w : warnings) log.warn(w);
      write_scatterers(target.parent_path() / "phantom.txt", field);
      simulate_stage(cfg, s, field, target, log);
    } else if (decode_cmd->parsed()) {
      const auto c = code == "hadamard" ? DecodeCode::hadamard : code == "identity" ? DecodeCode::identity : DecodeCode::automatic;
      decode_stage(cfg, pick(cfg, common), input, output, c, log);
    } else if (beamform_cmd->parsed()) {
      beamform_stage(cfg, pick(cfg, common), input, output, log);
    } else if (metrics_cmd->parsed()) {
      std::vector<std::string> warnings;
      const auto field = make_phantom(cfg, &warnings);
      metrics_stage(cfg, field, input, output, log);
    } else if (render_cmd->parsed()) {
      RenderOptions opt;
      opt.projection = slice_axis.empty();
      opt.axis = parse_axis(opt.projection ? (mip_axis.empty() ? "z" : mip_axis) : slice_axis);
      opt.slab = slab;
      opt.center = center;
      opt.db_range = db_range;
      for (const auto& p : render_stage(cfg, input, out, opt)) std::cout << p.string() << '\n';
    } else if (run_cmd->parsed()) {
      if (!out.empty()) cfg.run.output_dir = out;
      const auto result = run_pipeline(cfg, &std::cerr);
      std::cout << "wrote " << result.manifest.size() << " artifacts to " << cfg.run.output_dir << '\n';
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsageError;
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    for (const auto& p : e.completed()) std::cerr << "  completed: " << p.string() << '\n';
    return kStageError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kStageError;
  }
  return 0;
}
