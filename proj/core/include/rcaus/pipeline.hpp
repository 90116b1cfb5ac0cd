#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcaus/config.hpp"
#include "rcaus/metrics.hpp"

namespace rcaus {

/// A pipeline stage failed. completed() lists artifacts already written.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what, std::vector<std::filesystem::path> completed = {})
      : Error("stage '" + stage + "' failed: " + what),
        stage_(std::move(stage)),
        detail_(what),
        completed_(std::move(completed)) {}
  const std::string& stage() const { return stage_; }
  const std::string& detail() const { return detail_; }
  const std::vector<std::filesystem::path>& completed() const { return completed_; }

 private:
  std::string stage_;
  std::string detail_;
  std::vector<std::filesystem::path> completed_;
};

/// Line-oriented progress log: "stage=<name> scheme=<name> seconds=<t> <detail>".
class StageLog {
 public:
  explicit StageLog(std::ostream* out) : out_(out) {}
  void record(const std::string& stage, const std::string& scheme, double seconds, const std::string& detail = {});
  void warn(const std::string& message);

 private:
  std::ostream* out_;
};

/// Scatterers described by the config's phantom section.
ScattererField make_phantom(const RunConfig& cfg, std::vector<std::string>* warnings = nullptr);

Sequence scheme_sequence(const RunConfig& cfg, const SchemeEntry& scheme);

/// Artifact names for one scheme inside an output directory.
struct SchemeArtifacts {
  std::filesystem::path events;   // <scheme>.events.bin, RF column traces
  std::filesystem::path decoded;  // <scheme>.decoded.bin, IQ (decoded aperture or column data)
  std::filesystem::path volume;   // <scheme>.volume.bin
  std::filesystem::path metrics;  // <scheme>.resolution.csv or <scheme>.gcnr.csv
};
SchemeArtifacts scheme_artifacts(const RunConfig& cfg, const std::filesystem::path& dir, const SchemeEntry& scheme);

/// Matched filter (optional) then IQ demodulation of every trace. Without the
/// matched filter the time axis is shifted so t0 marks the pulse center.
EventChannelData<cplx> process_traces(const EventChannelData<double>& rf, const PulseSpec& pulse,
                                      const ProcessingConfig& processing, int threads);

enum class DecodeCode { automatic, hadamard, identity };

/// Row bases shared by the schemes of one run, keyed by receive bias (nullopt
/// for an uncollapsed basis). Each is built once, on first use, long enough for
/// every scheme that reserved it.
class BasisPool {
 public:
  void reserve(const std::optional<std::vector<int>>& bias, double t_span);
  bool reserved(const std::optional<std::vector<int>>& bias) const { return entries_.count(bias) != 0; }
  /// Sets *built when this call simulated the basis.
  const RowBasis& get(const RunConfig& cfg, const ScattererField& field, const std::optional<std::vector<int>>& bias,
                      bool* built = nullptr);

 private:
  struct Entry {
    double t_span = 0.0;
    std::unique_ptr<RowBasis> basis;
  };
  std::map<std::optional<std::vector<int>>, Entry> entries_;
};

/// Trace duration for a scheme: simulate.t_span, or just long enough.
double scheme_time_span(const RunConfig& cfg, const Sequence& seq, const ScattererField& field);

/// Receive-bias key of the row basis a scheme would simulate from, if its
/// events resolve to the row-basis engine.
std::optional<std::optional<std::vector<int>>> basis_key(const RunConfig& cfg, const Sequence& seq);

/// With a pool, schemes that reserved a basis there assemble from it; the
/// traces are identical to a standalone simulation.
AcquisitionStats simulate_stage(const RunConfig& cfg, const SchemeEntry& scheme, const ScattererField& field,
                                const std::filesystem::path& out, StageLog& log, BasisPool* pool = nullptr);

/// RF input is processed first; IQ input is decoded as is. hadamard inverts the
/// HERO code into a decoded aperture, identity leaves column data untouched.
void decode_stage(const RunConfig& cfg, const SchemeEntry& scheme, const std::filesystem::path& in,
                  const std::filesystem::path& out, DecodeCode code, StageLog& log);

void beamform_stage(const RunConfig& cfg, const SchemeEntry& scheme, const std::filesystem::path& in,
                    const std::filesystem::path& out, StageLog& log);

struct MetricsSummary {
  std::optional<ResolutionReport> resolution;
  std::vector<GcnrTarget> gcnr;
  std::vector<std::string> warnings;
};

/// Grid and file phantoms yield a resolution CSV, cyst phantoms a gCNR CSV.
MetricsSummary metrics_stage(const RunConfig& cfg, const ScattererField& phantom, const std::filesystem::path& volume,
                             const std::filesystem::path& out, StageLog& log);

struct RenderOptions {
  Axis axis = Axis::z;
  bool projection = true;  // false renders single-layer slices
  double slab = 5e-3;      // m, projections only
  std::optional<double> center;
  double db_range = 40.0;
};

/// Without a center, one image per phantom grid plane along the axis (or the
/// middle layer for other phantoms). Writes <stem>.<axis><i>.pgm and .csv pairs.
std::vector<std::filesystem::path> render_stage(const RunConfig& cfg, const std::filesystem::path& volume,
                                                const std::filesystem::path& out_dir, const RenderOptions& options);

/// "events=... acquisition_rate=... Hz" and related lines per scheme.
std::string describe(const RunConfig& cfg);

struct ManifestEntry {
  std::string path;  // relative to the output directory
  std::uint64_t hash;
  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

/// Hash every listed artifact and write manifest.txt ("<16 hex digits>  <path>", sorted by path).
std::vector<ManifestEntry> write_manifest(const std::filesystem::path& dir, std::vector<std::string> files);
std::vector<ManifestEntry> read_manifest(const std::filesystem::path& path);

struct SchemeResult {
  std::string name;
  std::size_t events = 0;
  double acquisition_rate = 0.0;
  AcquisitionStats stats;
  MetricsSummary metrics;
};

struct RunResult {
  std::vector<SchemeResult> schemes;
  std::vector<std::string> warnings;
  std::vector<ManifestEntry> manifest;
};

/// phantom -> simulate -> decode -> beamform -> metrics for every scheme, then
/// summary.csv and manifest.txt. Stage logs also go to run.log (not hashed).
RunResult run_pipeline(const RunConfig& cfg, std::ostream* log = nullptr);

}  // namespace rcaus
