#include "rcaus/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

namespace rcaus {

const SchemeEntry& RunConfig::scheme(std::string_view name) const {
  for (const auto& s : schemes)
    if (s.name == name) return s;
  throw std::invalid_argument("no scheme named '" + std::string(name) + "' in the config");
}

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

bool valid_key(std::string_view k) {
  if (k.empty()) return false;
  return std::all_of(k.begin(), k.end(), [](char ch) {
    return (ch >= 'a' && ch <= 'z') || (ch >= '0' && ch <= '9') || ch == '_' || ch == '-' || ch == '.';
  });
}

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

class Reader {
 public:
  explicit Reader(std::string_view text) {
    int lineno = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      const auto nl = text.find('\n', pos);
      std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
      pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
      ++lineno;
      if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
      line = trim(line);
      if (line.empty()) continue;
      const auto eq = line.find('=');
      if (eq == std::string_view::npos) throw ConfigError(lineno, "expected 'section.key = value'");
      const auto key = trim(line.substr(0, eq));
      const auto value = trim(line.substr(eq + 1));
      if (!valid_key(key) || key.find('.') == std::string_view::npos)
        throw ConfigError(lineno, "malformed key '" + std::string(key) + "'");
      if (value.empty()) throw ConfigError(lineno, "key '" + std::string(key) + "' has no value");
      auto [it, fresh] = entries_.try_emplace(std::string(key), Entry{std::string(value), lineno});
      if (!fresh)
        throw ConfigError(lineno, "duplicate key '" + std::string(key) + "' (first set on line " +
                                      std::to_string(it->second.line) + ")");
    }
  }

  bool has(const std::string& key) const { return entries_.count(key) != 0; }

  int line(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  const Entry* find(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return nullptr;
    it->second.used = true;
    return &it->second;
  }

  const Entry& require(const std::string& key) {
    const Entry* e = find(key);
    if (!e) throw ConfigError(0, "missing required key '" + key + "'");
    return *e;
  }

  static double to_double(const Entry& e, const std::string& key) {
    double v = 0.0;
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || p != end || !std::isfinite(v))
      throw ConfigError(e.line, key + ": expected a plain number in SI base units, got '" + e.value +
                                    "' (unit suffixes are not accepted; write e.g. 250e-6)");
    return v;
  }

  template <class Int>
  static Int to_int(const Entry& e, const std::string& key) {
    Int v{};
    const char* b = e.value.data();
    const char* end = b + e.value.size();
    auto [p, ec] = std::from_chars(b, end, v);
    if (ec != std::errc{} || p != end) throw ConfigError(e.line, key + ": expected an integer, got '" + e.value + "'");
    return v;
  }

  double real(const std::string& key) { return to_double(require(key), key); }
  double real(const std::string& key, double fallback) {
    const Entry* e = find(key);
    return e ? to_double(*e, key) : fallback;
  }
  std::optional<double> optional_real(const std::string& key) {
    const Entry* e = find(key);
    if (!e) return std::nullopt;
    return to_double(*e, key);
  }

  template <class Int>
  Int integer(const std::string& key, Int fallback) {
    const Entry* e = find(key);
    return e ? to_int<Int>(*e, key) : fallback;
  }
  template <class Int>
  Int integer(const std::string& key) {
    return to_int<Int>(require(key), key);
  }

  bool boolean(const std::string& key, bool fallback) {
    const Entry* e = find(key);
    if (!e) return fallback;
    if (e->value == "true") return true;
    if (e->value == "false") return false;
    throw ConfigError(e->line, key + ": expected true or false, got '" + e->value + "'");
  }

  std::string text(const std::string& key, const std::string& fallback) {
    const Entry* e = find(key);
    return e ? e->value : fallback;
  }

  template <std::size_t N>
  std::array<double, N> reals(const std::string& key, std::optional<std::array<double, N>> fallback = std::nullopt) {
    const Entry* e = fallback ? find(key) : &require(key);
    if (!e) return *fallback;
    const auto parts = split_ws(e->value);
    if (parts.size() != N)
      throw ConfigError(e->line, key + ": expected " + std::to_string(N) + " numbers, got '" + e->value + "'");
    std::array<double, N> out{};
    for (std::size_t i = 0; i < N; ++i) out[i] = to_double(Entry{std::string(parts[i]), e->line}, key);
    return out;
  }

  template <class Enum>
  Enum choice(const std::string& key, Enum fallback, std::initializer_list<std::pair<const char*, Enum>> options) {
    const Entry* e = find(key);
    if (!e) return fallback;
    std::string allowed;
    for (const auto& [name, value] : options) {
      if (e->value == name) return value;
      allowed += allowed.empty() ? name : std::string(", ") + name;
    }
    throw ConfigError(e->line, key + ": unknown value '" + e->value + "' (expected one of " + allowed + ")");
  }

  /// Scheme names in order of first appearance.
  std::vector<std::string> scheme_names() const {
    std::vector<std::pair<int, std::string>> seen;
    for (const auto& [key, e] : entries_) {
      if (key.rfind("scheme.", 0) != 0) continue;
      const auto dot = key.find('.', 7);
      if (dot == std::string::npos) continue;
      const auto name = key.substr(7, dot - 7);
      auto it = std::find_if(seen.begin(), seen.end(), [&](const auto& s) { return s.second == name; });
      if (it == seen.end())
        seen.emplace_back(e.line, name);
      else
        it->first = std::min(it->first, e.line);
    }
    std::sort(seen.begin(), seen.end());
    std::vector<std::string> names;
    for (auto& s : seen) names.push_back(s.second);
    return names;
  }

  void reject_unused() const {
    const Entry* first = nullptr;
    std::string key;
    for (const auto& [k, e] : entries_)
      if (!e.used && (!first || e.line < first->line)) {
        first = &e;
        key = k;
      }
    if (first) throw ConfigError(first->line, "unknown key '" + key + "'");
  }

 private:
  std::map<std::string, Entry> entries_;
};

template <class F>
void checked(Reader& rd, const std::string& key, F&& f) {
  try {
    f();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(rd.line(key), e.what());
  }
}

Extent extent(const std::array<double, 2>& v) { return {v[0], v[1]}; }
Vec3 vec(const std::array<double, 3>& v) { return {v[0], v[1], v[2]}; }

std::vector<Sphere> parse_spheres(const Entry& e) {
  std::vector<Sphere> out;
  std::string_view rest = e.value;
  while (!rest.empty()) {
    const auto semi = rest.find(';');
    const auto part = trim(rest.substr(0, semi));
    rest = semi == std::string_view::npos ? std::string_view{} : rest.substr(semi + 1);
    if (part.empty()) continue;
    const auto nums = split_ws(part);
    if (nums.size() != 4) throw ConfigError(e.line, "phantom.spheres: each sphere is 'x y z radius', separated by ';'");
    double v[4];
    for (int i = 0; i < 4; ++i) v[i] = Reader::to_double(Entry{std::string(nums[i]), e.line}, "phantom.spheres");
    out.push_back({{v[0], v[1], v[2]}, v[3]});
  }
  return out;
}

}  // namespace

RunConfig parse_config(std::string_view text) {
  Reader rd(text);
  RunConfig cfg;

  auto& g = cfg.geometry;
  g.row_count = rd.integer<int>("geometry.rows");
  g.col_count = rd.integer<int>("geometry.cols");
  g.pitch = rd.real("geometry.pitch");
  g.kerf = rd.real("geometry.kerf", 0.0);
  g.center_frequency = rd.real("geometry.center_frequency");
  checked(rd, "geometry.rows", [&] { g.validate(); });

  cfg.medium.speed_of_sound = rd.real("medium.speed_of_sound", 1540.0);
  cfg.medium.sampling_frequency = rd.real("medium.sampling_frequency");
  checked(rd, "medium.sampling_frequency", [&] { cfg.medium.validate(); });

  enum class PulseKind { tone_burst, chirp };
  const auto pk = rd.choice("pulse.kind", PulseKind::tone_burst,
                            {{"tone_burst", PulseKind::tone_burst}, {"chirp", PulseKind::chirp}});
  if (pk == PulseKind::tone_burst) {
    ToneBurst tb;
    tb.frequency = rd.real("pulse.frequency", g.center_frequency);
    tb.cycles = rd.integer<int>("pulse.cycles", 1);
    tb.window = rd.choice("pulse.window", Window::rectangular,
                          {{"rectangular", Window::rectangular}, {"hann", Window::hann}});
    cfg.pulse = tb;
  } else {
    Chirp ch;
    ch.f_low = rd.real("pulse.f_low");
    ch.f_high = rd.real("pulse.f_high");
    ch.duration = rd.real("pulse.duration");
    ch.window = rd.choice("pulse.window", Window::tukey,
                          {{"rectangular", Window::rectangular}, {"tukey", Window::tukey}});
    ch.tukey_alpha = rd.real("pulse.tukey_alpha", 0.2);
    cfg.pulse = ch;
  }
  checked(rd, "pulse.kind", [&] {
    validate(cfg.pulse);
    synthesize(cfg.pulse, cfg.medium.sampling_frequency);
  });

  for (const auto& name : rd.scheme_names()) {
    const std::string p = "scheme." + name + ".";
    if (!valid_key(name) || name.find('.') != std::string::npos)
      throw ConfigError(rd.line(p + "kind"), "malformed scheme name '" + name + "'");
    SchemeEntry s;
    s.name = name;
    const auto& kind = rd.require(p + "kind");
    try {
      s.spec.kind = parse_scheme_kind(kind.value);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(kind.line, e.what());
    }
    s.spec.angle_count = rd.integer<int>(p + "angle_count", s.spec.angle_count);
    s.spec.max_angle = rd.real(p + "max_angle", s.spec.max_angle);
    s.spec.source_count = rd.integer<int>(p + "source_count", 0);
    s.spec.source_depth = rd.optional_real(p + "source_depth");
    s.spec.encoding_order = rd.integer<int>(p + "encoding_order", 0);
    checked(rd, p + "kind", [&] { s.spec.validate(g); });
    cfg.schemes.push_back(std::move(s));
  }
  if (cfg.schemes.empty()) throw ConfigError(0, "at least one scheme.<name>.kind is required");

  auto& ph = cfg.phantom;
  ph.kind = rd.choice("phantom.kind", PhantomKind::none,
                      {{"none", PhantomKind::none},
                       {"grid", PhantomKind::grid},
                       {"cyst", PhantomKind::cyst},
                       {"file", PhantomKind::file}});
  switch (ph.kind) {
    case PhantomKind::none: break;
    case PhantomKind::grid:
      ph.grid.extents = {extent(rd.reals<2>("phantom.x_extent")), extent(rd.reals<2>("phantom.y_extent")),
                         extent(rd.reals<2>("phantom.z_extent"))};
      ph.grid.spacing = rd.reals<3>("phantom.spacing");
      ph.grid.amplitude = rd.real("phantom.amplitude", 1.0);
      checked(rd, "phantom.kind", [&] { make_grid(ph.grid); });
      break;
    case PhantomKind::cyst:
      ph.cyst.density = rd.real("phantom.density");
      ph.cyst.region_min = vec(rd.reals<3>("phantom.region_min"));
      ph.cyst.region_max = vec(rd.reals<3>("phantom.region_max"));
      if (const Entry* e = rd.find("phantom.spheres")) ph.cyst.spheres = parse_spheres(*e);
      ph.cyst.stream = rd.integer<std::uint64_t>("phantom.stream", 0);
      break;
    case PhantomKind::file:
      ph.path = rd.require("phantom.path").value;
      if (!std::filesystem::exists(ph.path))
        throw ConfigError(rd.line("phantom.path"), "phantom file '" + ph.path + "' does not exist");
      break;
  }

  cfg.grid.origin = vec(rd.reals<3>("grid.origin"));
  cfg.grid.spacing = rd.reals<3>("grid.spacing");
  {
    const auto& e = rd.require("grid.counts");
    const auto parts = split_ws(e.value);
    if (parts.size() != 3) throw ConfigError(e.line, "grid.counts: expected 3 integers");
    for (std::size_t a = 0; a < 3; ++a)
      cfg.grid.counts[a] = Reader::to_int<std::size_t>(Entry{std::string(parts[a]), e.line}, "grid.counts");
  }

  auto& bf = cfg.beamform;
  bf.f_number = rd.real("beamform.f_number", bf.f_number);
  bf.apodization = rd.choice("beamform.apodization", Apodization::hann,
                             {{"none", Apodization::none}, {"hann", Apodization::hann}});
  rd.choice("beamform.compounding", 0, {{"coherent", 0}});
  rd.choice("beamform.interpolation", 0, {{"linear-iq", 0}});
  bf.max_voxels = rd.integer<std::size_t>("beamform.max_voxels", bf.max_voxels);
  if (bf.f_number < 0) throw ConfigError(rd.line("beamform.f_number"), "beamform.f_number must be >= 0");
  checked(rd, "grid.counts", [&] { cfg.grid.validate(bf.max_voxels); });

  cfg.processing.matched_filter = rd.boolean("processing.matched_filter", true);
  cfg.processing.decimation = rd.integer<int>("processing.decimation", 2);
  checked(rd, "processing.decimation", [&] {
    if (cfg.processing.decimation < 1) throw std::invalid_argument("processing.decimation must be >= 1");
    if (cfg.medium.sampling_frequency / cfg.processing.decimation < center_frequency(cfg.pulse))
      throw std::invalid_argument("processing.decimation aliases the pulse band (fs / decimation < f0)");
  });

  auto& sim = cfg.simulate;
  sim.engine = rd.choice("simulate.engine", SimulationEngine::automatic,
                         {{"auto", SimulationEngine::automatic},
                          {"direct", SimulationEngine::direct},
                          {"row_basis", SimulationEngine::row_basis}});
  sim.directivity = rd.choice("simulate.directivity", Directivity::rectangular,
                              {{"rectangular", Directivity::rectangular}, {"omni", Directivity::omni}});
  sim.t_span = rd.real("simulate.t_span", 0.0);
  sim.oversample = rd.integer<int>("simulate.oversample", 4);
  if (sim.t_span < 0) throw ConfigError(rd.line("simulate.t_span"), "simulate.t_span must be >= 0");
  if (sim.oversample < 1) throw ConfigError(rd.line("simulate.oversample"), "simulate.oversample must be >= 1");

  cfg.metrics.bins = rd.integer<std::size_t>("metrics.bins", 256);
  cfg.metrics.erosion = rd.real("metrics.erosion", 0.0);
  cfg.metrics.search_radius = rd.real("metrics.search_radius", 0.5e-3);
  if (cfg.metrics.bins == 0) throw ConfigError(rd.line("metrics.bins"), "metrics.bins must be > 0");
  if (!(cfg.metrics.search_radius > 0))
    throw ConfigError(rd.line("metrics.search_radius"), "metrics.search_radius must be > 0");

  cfg.run.seed = rd.integer<std::uint64_t>("run.seed", 1);
  cfg.run.threads = rd.integer<int>("run.threads", 1);
  cfg.run.prf = rd.real("run.prf", 10000.0);
  cfg.run.output_dir = rd.text("run.output_dir", "out");
  if (cfg.run.threads < 0) throw ConfigError(rd.line("run.threads"), "run.threads must be >= 0 (0 = all cores)");
  if (!(cfg.run.prf > 0)) throw ConfigError(rd.line("run.prf"), "run.prf must be > 0");
  cfg.beamform.threads = cfg.run.threads;
  cfg.phantom.cyst.seed = cfg.run.seed;
  if (cfg.phantom.kind == PhantomKind::cyst) checked(rd, "phantom.kind", [&] {
      CystPhantomSpec probe = cfg.phantom.cyst;
      probe.density = 1.0;  // validate geometry without drawing
      make_cyst(probe);
    });

  rd.reject_unused();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError(0, "cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

namespace {

std::string num(double v) {
  char buf[32];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

template <std::size_t N>
std::string nums(const std::array<double, N>& v) {
  std::string s;
  for (std::size_t i = 0; i < N; ++i) s += (i ? " " : "") + num(v[i]);
  return s;
}

std::string nums(Vec3 v) { return nums(std::array<double, 3>{v.x, v.y, v.z}); }

const char* window_name(Window w) {
  switch (w) {
    case Window::rectangular: return "rectangular";
    case Window::hann: return "hann";
    case Window::tukey: return "tukey";
  }
  return "?";
}

}  // namespace

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream o;
  auto kv = [&](const std::string& k, const std::string& v) { o << k << " = " << v << '\n'; };
  const auto& g = cfg.geometry;
  kv("geometry.rows", std::to_string(g.row_count));
  kv("geometry.cols", std::to_string(g.col_count));
  kv("geometry.pitch", num(g.pitch));
  kv("geometry.kerf", num(g.kerf));
  kv("geometry.center_frequency", num(g.center_frequency));
  o << '\n';
  kv("medium.speed_of_sound", num(cfg.medium.speed_of_sound));
  kv("medium.sampling_frequency", num(cfg.medium.sampling_frequency));
  o << '\n';
  if (const auto* tb = std::get_if<ToneBurst>(&cfg.pulse)) {
    kv("pulse.kind", "tone_burst");
    kv("pulse.frequency", num(tb->frequency));
    kv("pulse.cycles", std::to_string(tb->cycles));
    kv("pulse.window", window_name(tb->window));
  } else {
    const auto& ch = std::get<Chirp>(cfg.pulse);
    kv("pulse.kind", "chirp");
    kv("pulse.f_low", num(ch.f_low));
    kv("pulse.f_high", num(ch.f_high));
    kv("pulse.duration", num(ch.duration));
    kv("pulse.window", window_name(ch.window));
    kv("pulse.tukey_alpha", num(ch.tukey_alpha));
  }
  for (const auto& s : cfg.schemes) {
    o << '\n';
    const std::string p = "scheme." + s.name + ".";
    kv(p + "kind", std::string(to_string(s.spec.kind)));
    kv(p + "angle_count", std::to_string(s.spec.angle_count));
    kv(p + "max_angle", num(s.spec.max_angle));
    kv(p + "source_count", std::to_string(s.spec.source_count));
    if (s.spec.source_depth) kv(p + "source_depth", num(*s.spec.source_depth));
    kv(p + "encoding_order", std::to_string(s.spec.encoding_order));
  }
  o << '\n';
  const auto& ph = cfg.phantom;
  switch (ph.kind) {
    case PhantomKind::none: kv("phantom.kind", "none"); break;
    case PhantomKind::grid:
      kv("phantom.kind", "grid");
      kv("phantom.x_extent", num(ph.grid.extents[0].min) + " " + num(ph.grid.extents[0].max));
      kv("phantom.y_extent", num(ph.grid.extents[1].min) + " " + num(ph.grid.extents[1].max));
      kv("phantom.z_extent", num(ph.grid.extents[2].min) + " " + num(ph.grid.extents[2].max));
      kv("phantom.spacing", nums(ph.grid.spacing));
      kv("phantom.amplitude", num(ph.grid.amplitude));
      break;
    case PhantomKind::cyst: {
      kv("phantom.kind", "cyst");
      kv("phantom.density", num(ph.cyst.density));
      kv("phantom.region_min", nums(ph.cyst.region_min));
      kv("phantom.region_max", nums(ph.cyst.region_max));
      std::string spheres;
      for (const auto& s : ph.cyst.spheres)
        spheres += (spheres.empty() ? "" : "; ") + nums(s.center) + " " + num(s.radius);
      if (!spheres.empty()) kv("phantom.spheres", spheres);
      kv("phantom.stream", std::to_string(ph.cyst.stream));
      break;
    }
    case PhantomKind::file:
      kv("phantom.kind", "file");
      kv("phantom.path", ph.path);
      break;
  }
  o << '\n';
  kv("grid.origin", nums(cfg.grid.origin));
  kv("grid.spacing", nums(cfg.grid.spacing));
  kv("grid.counts", std::to_string(cfg.grid.counts[0]) + " " + std::to_string(cfg.grid.counts[1]) + " " +
                        std::to_string(cfg.grid.counts[2]));
  o << '\n';
  kv("beamform.f_number", num(cfg.beamform.f_number));
  kv("beamform.apodization", cfg.beamform.apodization == Apodization::hann ? "hann" : "none");
  kv("beamform.compounding", "coherent");
  kv("beamform.interpolation", "linear-iq");
  kv("beamform.max_voxels", std::to_string(cfg.beamform.max_voxels));
  o << '\n';
  kv("processing.matched_filter", cfg.processing.matched_filter ? "true" : "false");
  kv("processing.decimation", std::to_string(cfg.processing.decimation));
  o << '\n';
  const auto& sim = cfg.simulate;
  kv("simulate.engine", sim.engine == SimulationEngine::automatic ? "auto"
                        : sim.engine == SimulationEngine::direct  ? "direct"
                                                                  : "row_basis");
  kv("simulate.directivity", sim.directivity == Directivity::omni ? "omni" : "rectangular");
  kv("simulate.t_span", num(sim.t_span));
  kv("simulate.oversample", std::to_string(sim.oversample));
  o << '\n';
  kv("metrics.bins", std::to_string(cfg.metrics.bins));
  kv("metrics.erosion", num(cfg.metrics.erosion));
  kv("metrics.search_radius", num(cfg.metrics.search_radius));
  o << '\n';
  kv("run.seed", std::to_string(cfg.run.seed));
  kv("run.threads", std::to_string(cfg.run.threads));
  kv("run.prf", num(cfg.run.prf));
  kv("run.output_dir", cfg.run.output_dir);
  return o.str();
}

}  // namespace rcaus
