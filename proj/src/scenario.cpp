#include "polyprobe/scenario.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

struct Entry {
  std::string key;
  std::string value;
  std::size_t line;
  std::size_t value_column;
};

struct Block {
  std::string name;
  std::size_t line;
  std::vector<Entry> entries;
};

class Parser {
 public:
  Parser(std::string_view text, std::string_view source) : text_(text), source_(source) {}

  [[noreturn]] void fail(std::size_t line, std::size_t column, const std::string& msg) const {
    throw Error(ErrorKind::ConfigParseError, std::string(source_) + ":" + std::to_string(line) +
                                                 ":" + std::to_string(column) + ": " + msg);
  }

  std::vector<Block> blocks() {
    std::vector<Block> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text_.size()) {
      const std::size_t eol = std::min(text_.find('\n', pos), text_.size());
      std::string_view line = text_.substr(pos, eol - pos);
      ++line_no;
      pos = eol + 1;
      if (const auto hash = line.find('#'); hash != std::string_view::npos)
        line = line.substr(0, hash);
      if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
      const std::size_t first = line.find_first_not_of(" \t");
      if (first == std::string_view::npos) continue;
      const std::size_t last = line.find_last_not_of(" \t");
      const std::string_view body = line.substr(first, last - first + 1);

      if (body.front() == '[') {
        if (body.back() != ']') fail(line_no, first + body.size(), "expected ']'");
        std::string name(trim(body.substr(1, body.size() - 2)));
        if (!kKnownBlocks.count(name)) fail(line_no, first + 2, "unknown block [" + name + "]");
        out.push_back({name, line_no, {}});
        continue;
      }
      const std::size_t eq = body.find('=');
      if (eq == std::string_view::npos) fail(line_no, first + 1, "expected 'key = value'");
      if (out.empty()) fail(line_no, first + 1, "entry outside of any block");
      const std::string key(trim(body.substr(0, eq)));
      if (key.empty()) fail(line_no, first + 1, "missing key before '='");
      const std::string_view raw = body.substr(eq + 1);
      const std::size_t vstart = raw.find_first_not_of(" \t");
      if (vstart == std::string_view::npos) fail(line_no, first + eq + 2, "missing value");
      out.back().entries.push_back(
          {key, std::string(trim(raw)), line_no, first + eq + 1 + vstart + 1});
    }
    return out;
  }

  static std::string_view trim(std::string_view s) {
    const std::size_t a = s.find_first_not_of(" \t");
    if (a == std::string_view::npos) return {};
    const std::size_t b = s.find_last_not_of(" \t");
    return s.substr(a, b - a + 1);
  }

  std::vector<double> numbers(const Entry& e) const {
    std::vector<double> out;
    std::size_t i = 0;
    const std::string& v = e.value;
    while (i < v.size()) {
      while (i < v.size() && (v[i] == ' ' || v[i] == '\t')) ++i;
      if (i >= v.size()) break;
      std::size_t j = i;
      while (j < v.size() && v[j] != ' ' && v[j] != '\t') ++j;
      double x = 0.0;
      const char* begin = v.data() + i;
      const char* end = v.data() + j;
      if (*begin == '+') ++begin;
      auto [ptr, ec] = std::from_chars(begin, end, x);
      if (ec != std::errc() || ptr != end || !std::isfinite(x))
        fail(e.line, e.value_column + i, "'" + v.substr(i, j - i) + "' is not a finite number");
      out.push_back(x);
      i = j;
    }
    return out;
  }

  double number(const Entry& e) const {
    const auto v = numbers(e);
    if (v.size() != 1) fail(e.line, e.value_column, "'" + e.key + "' takes one number");
    return v[0];
  }

  std::size_t index(const Entry& e, double x) const {
    if (x < 0.0 || x != std::floor(x) || x > 1e15)
      fail(e.line, e.value_column, "'" + e.key + "' needs non-negative integers");
    return static_cast<std::size_t>(x);
  }

  std::vector<std::size_t> indices(const Entry& e) const {
    std::vector<std::size_t> out;
    for (double x : numbers(e)) out.push_back(index(e, x));
    return out;
  }

  bool boolean(const Entry& e) const {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return false;
    fail(e.line, e.value_column, "'" + e.key + "' expects true or false");
  }

  cdouble complex_value(const Entry& e) const {
    const auto v = numbers(e);
    if (v.empty() || v.size() > 2)
      fail(e.line, e.value_column, "'" + e.key + "' takes 're' or 're im'");
    return {v[0], v.size() == 2 ? v[1] : 0.0};
  }

  [[noreturn]] void unknown(const Block& b, const Entry& e) const {
    fail(e.line, 1, "unknown key '" + e.key + "' in [" + b.name + "]");
  }

 private:
  inline static const std::set<std::string> kKnownBlocks{"geometry", "medium", "ray",
                                                         "vertex_probe", "detection"};
  std::string_view text_;
  std::string_view source_;
};

VertexCriterion parse_criterion(const Parser& p, const Entry& e) {
  if (e.value == "coupled_mode") return VertexCriterion::CoupledMode;
  if (e.value == "cascade") return VertexCriterion::Cascade;
  if (e.value == "fwm") return VertexCriterion::Fwm;
  p.fail(e.line, e.value_column, "criterion must be coupled_mode, cascade or fwm");
}

Point unit(const Parser& p, const Entry& e, std::vector<double> v) {
  double n2 = 0.0;
  for (double x : v) n2 += x * x;
  if (!(n2 > 0.0)) p.fail(e.line, e.value_column, "direction must be nonzero");
  const double n = std::sqrt(n2);
  for (double& x : v) x /= n;
  return v;
}

}  // namespace

WaveKind ScenarioConfig::wave_kind() const {
  return media.empty() ? WaveKind::Em : wave_kind_of(media.front().medium);
}

MediaTable ScenarioConfig::media_table() const {
  MediaTable t;
  for (const MediumRecord& r : media) t.emplace(r.name, r.medium);
  return t;
}

ScenarioConfig parse_scenario(std::string_view text, std::string_view source) {
  Parser p(text, source);
  ScenarioConfig cfg;
  bool have_geometry = false;
  bool have_detection = false;
  std::size_t geometry_line = 0;

  for (const Block& b : p.blocks()) {
    if (b.name == "geometry") {
      if (have_geometry) p.fail(b.line, 1, "[geometry] given twice");
      have_geometry = true;
      geometry_line = b.line;
      std::optional<std::size_t> dim;
      for (const Entry& e : b.entries) {
        if (e.key == "dimension") {
          dim = p.index(e, p.number(e));
        } else if (e.key == "vertex") {
          cfg.vertices.push_back(p.numbers(e));
        } else if (e.key == "simplex") {
          cfg.simplices.push_back(p.indices(e));
        } else {
          p.unknown(b, e);
        }
      }
      if (!dim || *dim == 0) p.fail(b.line, 1, "[geometry] needs dimension >= 1");
      cfg.dimension = *dim;
    } else if (b.name == "medium") {
      MediumRecord rec;
      std::string kind;
      std::map<std::string, const Entry*> seen;
      for (const Entry& e : b.entries) {
        if (seen.count(e.key)) p.fail(e.line, 1, "duplicate key '" + e.key + "'");
        seen[e.key] = &e;
      }
      auto num = [&](const char* key) -> std::optional<double> {
        auto it = seen.find(key);
        if (it == seen.end()) return std::nullopt;
        return p.number(*it->second);
      };
      static const std::set<std::string> keys{"name",   "kind",      "index",       "permittivity",
                                              "permeability", "chi3", "impedance",
                                              "sound_speed",  "density", "simplices"};
      for (const Entry& e : b.entries)
        if (!keys.count(e.key)) p.unknown(b, e);
      if (!seen.count("name")) p.fail(b.line, 1, "[medium] needs a name");
      rec.name = seen["name"]->value;
      kind = seen.count("kind") ? seen["kind"]->value : "em";
      if (seen.count("simplices")) rec.simplices = p.indices(*seen["simplices"]);
      try {
        if (kind == "em") {
          EmMedium m;
          const auto n = num("index");
          if (!n) p.fail(b.line, 1, "EM medium '" + rec.name + "' needs an index");
          m.index = *n;
          m.permittivity = num("permittivity");
          m.permeability = num("permeability");
          m.chi3 = num("chi3");
          for (const char* k : {"impedance", "sound_speed", "density"})
            if (seen.count(k)) p.fail(seen[k]->line, 1, std::string("'") + k + "' is acoustic-only");
          validate(m);
          rec.medium = m;
        } else if (kind == "acoustic") {
          AcousticMedium m;
          const auto z = num("impedance");
          const auto c = num("sound_speed");
          m.density = num("density");
          if (!c) p.fail(b.line, 1, "acoustic medium '" + rec.name + "' needs sound_speed");
          m.sound_speed = *c;
          if (z)
            m.impedance = *z;
          else if (m.density)
            m.impedance = *m.density * *c;
          else
            p.fail(b.line, 1, "acoustic medium '" + rec.name + "' needs impedance or density");
          for (const char* k : {"index", "permittivity", "permeability", "chi3"})
            if (seen.count(k)) p.fail(seen[k]->line, 1, std::string("'") + k + "' is EM-only");
          validate(m);
          rec.medium = m;
        } else {
          p.fail(seen["kind"]->line, seen["kind"]->value_column, "kind must be em or acoustic");
        }
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::ConfigParseError) throw;
        p.fail(b.line, 1, "medium '" + rec.name + "': " + err.what());
      }
      for (const MediumRecord& other : cfg.media)
        if (other.name == rec.name) p.fail(b.line, 1, "medium '" + rec.name + "' defined twice");
      cfg.media.push_back(std::move(rec));
    } else if (b.name == "ray") {
      Ray ray;
      std::optional<double> samples;
      for (const Entry& e : b.entries) {
        if (e.key == "origin")
          ray.origin = p.numbers(e);
        else if (e.key == "direction")
          ray.direction = unit(p, e, p.numbers(e));
        else if (e.key == "length")
          ray.length = p.number(e);
        else if (e.key == "grid_step")
          ray.grid_step = p.number(e);
        else if (e.key == "samples")
          samples = static_cast<double>(p.index(e, p.number(e)));
        else
          p.unknown(b, e);
      }
      if (samples) {
        if (*samples < 2) p.fail(b.line, 1, "a ray needs at least 2 samples");
        ray.grid_step = ray.length / (*samples - 1.0);
      }
      try {
        validate(ray);
      } catch (const Error& err) {
        p.fail(b.line, 1, std::string("invalid ray: ") + err.what());
      }
      cfg.rays.push_back(std::move(ray));
    } else if (b.name == "vertex_probe") {
      VertexProbe probe;
      bool have_vertex = false;
      for (const Entry& e : b.entries) {
        if (e.key == "name") probe.name = e.value;
        else if (e.key == "vertex") { probe.vertex = p.index(e, p.number(e)); have_vertex = true; }
        else if (e.key == "criterion") probe.criterion = parse_criterion(p, e);
        else if (e.key == "kappa") probe.kappas = p.numbers(e);
        else if (e.key == "delay_phase") probe.delay_phases = p.numbers(e);
        else if (e.key == "beta") probe.beta = p.number(e);
        else if (e.key == "x1") probe.x1 = p.complex_value(e);
        else if (e.key == "x2") probe.x2 = p.complex_value(e);
        else if (e.key == "samples_per_section") probe.samples_per_section = p.index(e, p.number(e));
        else if (e.key == "grid_step") probe.grid_step = p.number(e);
        else if (e.key == "gain") probe.gain = p.number(e);
        else if (e.key == "amplitude") probe.amplitude = p.number(e);
        else if (e.key == "length") probe.length = p.number(e);
        else if (e.key == "direction") probe.direction = unit(p, e, p.numbers(e));
        else if (e.key == "chi3") probe.chi3 = p.number(e);
        else if (e.key == "medium") probe.medium = e.value;
        else if (e.key == "pumps") {
          const auto v = p.numbers(e);
          if (v.size() != 3) p.fail(e.line, e.value_column, "pumps takes three amplitudes");
          probe.pumps = {v[0], v[1], v[2]};
        } else p.unknown(b, e);
      }
      if (!have_vertex) p.fail(b.line, 1, "[vertex_probe] needs a vertex");
      if (probe.name.empty()) probe.name = "probe" + std::to_string(cfg.probes.size());
      if (!(probe.grid_step > 0.0)) p.fail(b.line, 1, "probe grid_step must be positive");
      if (probe.criterion == VertexCriterion::Fwm && probe.direction.empty())
        p.fail(b.line, 1, "fwm probe needs a direction");
      cfg.probes.push_back(std::move(probe));
    } else if (b.name == "detection") {
      if (have_detection) p.fail(b.line, 1, "[detection] given twice");
      have_detection = true;
      DetectionParams& d = cfg.detection.params;
      for (const Entry& e : b.entries) {
        if (e.key == "tol") d.interface_tol.rel = p.number(e);
        else if (e.key == "tol_floor") d.interface_tol.floor = p.number(e);
        else if (e.key == "vertex_tol") d.vertex_tol = p.number(e);
        else if (e.key == "kappa_threshold") d.kappa_threshold = p.number(e);
        else if (e.key == "noise") d.noise = p.number(e);
        else if (e.key == "seed") d.seed = p.index(e, p.number(e));
        else if (e.key == "paper_exact") d.paper_exact = p.boolean(e);
        else if (e.key == "candidate") {
          const auto v = p.numbers(e);
          if (v.size() != 2) p.fail(e.line, e.value_column, "candidate takes two values");
          cfg.detection.candidates.emplace_back(v[0], v[1]);
        } else p.unknown(b, e);
      }
      if (!(d.interface_tol.rel > 0.0) || !(d.noise >= 0.0))
        p.fail(b.line, 1, "tol must be positive and noise non-negative");
    }
  }

  if (!have_geometry) p.fail(1, 1, "missing [geometry] block");

  // Every simplex has exactly one medium; all media share one wave kind.
  std::vector<int> owner(cfg.simplices.size(), -1);
  for (std::size_t m = 0; m < cfg.media.size(); ++m) {
    for (std::size_t s : cfg.media[m].simplices) {
      if (s >= cfg.simplices.size())
        p.fail(geometry_line, 1,
               "medium '" + cfg.media[m].name + "' lists unknown simplex " + std::to_string(s));
      if (owner[s] >= 0)
        p.fail(geometry_line, 1, "simplex " + std::to_string(s) + " has two media");
      owner[s] = static_cast<int>(m);
    }
    if (wave_kind_of(cfg.media[m].medium) != cfg.wave_kind())
      p.fail(geometry_line, 1, "scenario mixes EM and acoustic media");
  }
  for (std::size_t s = 0; s < owner.size(); ++s)
    if (owner[s] < 0) p.fail(geometry_line, 1, "simplex " + std::to_string(s) + " has no medium");
  return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ConfigParseError, path.string() + ":0:0: cannot open file");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.string());
}

SimplicialComplex build_scenario_complex(const ScenarioConfig& cfg) {
  std::map<std::size_t, MediumId> media;
  for (const MediumRecord& r : cfg.media)
    for (std::size_t s : r.simplices) media[s] = r.name;
  return build_complex(cfg.dimension, cfg.vertices, cfg.simplices, std::move(media));
}

}  // namespace polyprobe
