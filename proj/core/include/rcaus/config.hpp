#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rcaus/beamform.hpp"
#include "rcaus/geometry.hpp"
#include "rcaus/phantoms.hpp"
#include "rcaus/pulse.hpp"
#include "rcaus/schemes.hpp"
#include "rcaus/simulate.hpp"

namespace rcaus {

/// Config problem; line() is 1-based, or 0 when the problem spans the file.
class ConfigError : public Error {
 public:
  ConfigError(int line, const std::string& what)
      : Error(line > 0 ? "config line " + std::to_string(line) + ": " + what : "config: " + what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct SchemeEntry {
  std::string name;  // [a-z0-9_-]+, used in artifact file names
  SchemeSpec spec;
  friend bool operator==(const SchemeEntry&, const SchemeEntry&) = default;
};

enum class PhantomKind { none, grid, cyst, file };

struct PhantomConfig {
  PhantomKind kind = PhantomKind::none;
  GridPhantomSpec grid;
  CystPhantomSpec cyst;  // seed comes from run.seed
  std::string path;      // file phantoms
  friend bool operator==(const PhantomConfig&, const PhantomConfig&) = default;
};

struct ProcessingConfig {
  bool matched_filter = true;
  int decimation = 2;
  friend bool operator==(const ProcessingConfig&, const ProcessingConfig&) = default;
};

struct SimulateConfig {
  SimulationEngine engine = SimulationEngine::automatic;
  Directivity directivity = Directivity::rectangular;
  double t_span = 0.0;  // 0 = just long enough
  int oversample = 4;
  friend bool operator==(const SimulateConfig&, const SimulateConfig&) = default;
};

struct MetricsConfig {
  std::size_t bins = 256;
  double erosion = 0.0;  // 0 = one theoretical FWHM
  double search_radius = 0.5e-3;
  friend bool operator==(const MetricsConfig&, const MetricsConfig&) = default;
};

struct RunSettings {
  std::uint64_t seed = 1;
  int threads = 1;
  double prf = 10000.0;
  std::string output_dir = "out";
  friend bool operator==(const RunSettings&, const RunSettings&) = default;
};

struct RunConfig {
  ArrayGeometry geometry;
  MediumSpec medium{1540.0, 0.0};
  PulseSpec pulse;
  std::vector<SchemeEntry> schemes;
  PhantomConfig phantom;
  VolumeGrid grid;
  BeamformConfig beamform;  // threads is taken from run.threads
  ProcessingConfig processing;
  SimulateConfig simulate;
  MetricsConfig metrics;
  RunSettings run;

  const SchemeEntry& scheme(std::string_view name) const;
  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parse and validate. Throws ConfigError on syntax errors, unknown keys,
/// duplicate keys, non-SI values ("250 um") and missing required keys.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Every key, in canonical order; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& cfg);

}  // namespace rcaus
