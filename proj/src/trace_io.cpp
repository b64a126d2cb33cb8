#include "polyprobe/trace_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"
#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

using json = nlohmann::ordered_json;

constexpr const char* kTraceHeader =
    "trace,z,incident_re,incident_im,reflected_re,reflected_im,medium";
constexpr const char* kReportHeader =
    "kind,source,vertex,z,position,t_re,t_im,r_re,r_im,pair_a,pair_b,criterion,residual,"
    "degenerate,note";

[[noreturn]] void mismatch(const std::filesystem::path& p, const std::string& msg) {
  throw Error(ErrorKind::SchemaMismatch, p.string() + ": " + msg);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_double(const std::filesystem::path& p, std::size_t line, const std::string& s) {
  double x = 0.0;
  const char* b = s.data();
  const char* e = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(b, e, x);
  if (ec != std::errc() || ptr != e)
    mismatch(p, "line " + std::to_string(line) + ": '" + s + "' is not a number");
  return x;
}

std::size_t parse_index(const std::filesystem::path& p, std::size_t line, const std::string& s) {
  std::size_t x = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc() || ptr != s.data() + s.size())
    mismatch(p, "line " + std::to_string(line) + ": '" + s + "' is not an index");
  return x;
}

std::string sanitize(std::string s) {
  for (char& c : s)
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  return s;
}

std::string join_point(const Point& p) {
  std::string out;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += format_number(p[i]);
  }
  return out;
}

Point parse_point(const std::filesystem::path& path, std::size_t line, const std::string& s) {
  Point p;
  for (const std::string& tok : split(s, ' '))
    if (!tok.empty()) p.push_back(parse_double(path, line, tok));
  return p;
}

json point_json(const Point& p) {
  json a = json::array();
  for (double x : p) a.push_back(x);
  return a;
}

json read_json(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) mismatch(p, "missing metadata file");
  try {
    return json::parse(in);
  } catch (const json::exception& e) {
    mismatch(p, std::string("invalid JSON: ") + e.what());
  }
}

std::ofstream open_out(const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + p.string());
  return out;
}

std::vector<std::string> read_lines(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) mismatch(p, "cannot open file");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

WaveKind parse_kind(const std::filesystem::path& p, const std::string& s) {
  if (s == "em") return WaveKind::Em;
  if (s == "acoustic") return WaveKind::Acoustic;
  mismatch(p, "unknown wave kind '" + s + "'");
}

VertexCriterion parse_criterion(const std::filesystem::path& p, const std::string& s) {
  if (s == "coupled_mode") return VertexCriterion::CoupledMode;
  if (s == "cascade") return VertexCriterion::Cascade;
  if (s == "fwm") return VertexCriterion::Fwm;
  mismatch(p, "unknown criterion '" + s + "'");
}

const char* transmission_formula(bool paper_exact) {
  return paper_exact ? "4(Z2/Z1)/((Z2/Z1)-1)^2" : "4(Z2/Z1)/((Z2/Z1)+1)^2";
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".json");
}

void write_traces(const std::filesystem::path& path, const TraceSet& set) {
  std::ofstream csv = open_out(path);
  csv << kTraceHeader << '\n';
  json meta;
  meta["schema"] = kTraceSchema;
  meta["wave_kind"] = std::string(to_string(set.wave_kind));
  meta["noise"] = set.noise;
  meta["seed"] = set.seed;
  json list = json::array();
  for (const TraceRecord& r : set.traces) {
    for (const TraceSample& s : r.trace.samples)
      csv << r.id << ',' << format_number(s.z) << ',' << format_number(s.incident.real()) << ','
          << format_number(s.incident.imag()) << ',' << format_number(s.reflected.real()) << ','
          << format_number(s.reflected.imag()) << ',' << sanitize(s.medium) << '\n';
    json t;
    t["id"] = r.id;
    t["source"] = r.source == TraceSource::Ray ? "ray" : "probe";
    t["index"] = r.index;
    if (r.source == TraceSource::Probe) t["probe"] = r.probe;
    t["wave_kind"] = std::string(to_string(r.trace.wave_kind));
    t["origin"] = point_json(r.trace.ray.origin);
    t["direction"] = point_json(r.trace.ray.direction);
    t["length"] = r.trace.ray.length;
    t["grid_step"] = r.trace.ray.grid_step;
    t["samples"] = r.trace.samples.size();
    list.push_back(std::move(t));
  }
  meta["traces"] = std::move(list);
  if (!csv) throw Error(ErrorKind::Io, "failed writing " + path.string());
  std::ofstream side = open_out(sidecar_path(path));
  side << meta.dump(2) << '\n';
}

TraceSet read_traces(const std::filesystem::path& path) {
  const auto meta_path = sidecar_path(path);
  const json meta = read_json(meta_path);
  TraceSet set;
  std::map<std::size_t, std::size_t> slot;  // trace id -> position in set.traces
  try {
    if (meta.at("schema").get<std::string>() != kTraceSchema)
      mismatch(meta_path, "unexpected schema '" + meta.at("schema").get<std::string>() + "'");
    set.wave_kind = parse_kind(meta_path, meta.at("wave_kind").get<std::string>());
    set.noise = meta.at("noise").get<double>();
    set.seed = meta.at("seed").get<std::uint64_t>();
    for (const json& t : meta.at("traces")) {
      TraceRecord r;
      r.id = t.at("id").get<std::size_t>();
      const std::string src = t.at("source").get<std::string>();
      if (src != "ray" && src != "probe") mismatch(meta_path, "unknown trace source " + src);
      r.source = src == "ray" ? TraceSource::Ray : TraceSource::Probe;
      r.index = t.at("index").get<std::size_t>();
      if (r.source == TraceSource::Probe) r.probe = t.at("probe").get<std::string>();
      r.trace.wave_kind = parse_kind(meta_path, t.at("wave_kind").get<std::string>());
      r.trace.ray.origin = t.at("origin").get<std::vector<double>>();
      r.trace.ray.direction = t.at("direction").get<std::vector<double>>();
      r.trace.ray.length = t.at("length").get<double>();
      r.trace.ray.grid_step = t.at("grid_step").get<double>();
      r.trace.samples.reserve(t.at("samples").get<std::size_t>());
      if (!slot.emplace(r.id, set.traces.size()).second)
        mismatch(meta_path, "duplicate trace id " + std::to_string(r.id));
      set.traces.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    mismatch(meta_path, std::string("missing or mistyped field: ") + e.what());
  }

  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kTraceHeader) mismatch(path, "unexpected CSV header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    if (f.size() != 7) mismatch(path, "line " + std::to_string(i + 1) + ": expected 7 fields");
    const std::size_t id = parse_index(path, i + 1, f[0]);
    auto it = slot.find(id);
    if (it == slot.end()) mismatch(path, "line " + std::to_string(i + 1) + ": unknown trace id");
    TraceSample s;
    s.z = parse_double(path, i + 1, f[1]);
    s.incident = {parse_double(path, i + 1, f[2]), parse_double(path, i + 1, f[3])};
    s.reflected = {parse_double(path, i + 1, f[4]), parse_double(path, i + 1, f[5])};
    s.medium = f[6];
    set.traces[it->second].trace.samples.push_back(std::move(s));
  }
  for (std::size_t k = 0; k < set.traces.size(); ++k) {
    const std::size_t want = meta["traces"][k]["samples"].get<std::size_t>();
    if (set.traces[k].trace.samples.size() != want)
      mismatch(path, "trace " + std::to_string(set.traces[k].id) + " has " +
                         std::to_string(set.traces[k].trace.samples.size()) +
                         " samples, metadata says " + std::to_string(want));
  }
  return set;
}

void write_report(const std::filesystem::path& path, const DetectionReport& report,
                  WaveKind kind, std::span<const ProbeOutcome> probes) {
  std::ofstream csv = open_out(path);
  csv << kReportHeader << '\n';
  for (const InterfaceHit& h : report.interface_hits)
    csv << "interface," << h.trace_id << ",," << format_number(h.z) << ','
        << join_point(h.position) << ',' << format_number(h.t_measured.real()) << ','
        << format_number(h.t_measured.imag()) << ',' << format_number(h.r_measured.real()) << ','
        << format_number(h.r_measured.imag()) << ',' << format_number(h.pair.first) << ','
        << format_number(h.pair.second) << ",," << format_number(h.residual) << ",,\n";
  for (const VertexHit& h : report.vertex_hits)
    csv << "vertex," << sanitize(h.source) << ',' << h.vertex << ",," << join_point(h.position)
        << ",,,,,,," << to_string(h.criterion) << ',' << format_number(h.residual) << ','
        << (h.degenerate ? "true" : "false") << ',' << sanitize(h.note) << '\n';
  if (!csv) throw Error(ErrorKind::Io, "failed writing " + path.string());

  const DetectionParams& p = report.params;
  json meta;
  meta["schema"] = kReportSchema;
  meta["wave_kind"] = std::string(to_string(kind));
  meta["tol"] = p.interface_tol.rel;
  meta["tol_floor"] = p.interface_tol.floor;
  meta["vertex_tol"] = p.vertex_tol;
  meta["kappa_threshold"] = p.kappa_threshold;
  meta["noise"] = p.noise;
  meta["seed"] = p.seed;
  meta["paper_exact"] = p.paper_exact;
  if (kind == WaveKind::Acoustic) meta["transmission_formula"] = transmission_formula(p.paper_exact);
  meta["interface_hits"] = report.interface_hits.size();
  meta["vertex_hits"] = report.vertex_hits.size();
  json verdicts = json::array();
  for (const ProbeOutcome& o : probes) {
    json v;
    v["probe"] = o.probe;
    v["vertex"] = o.vertex;
    v["criterion"] = std::string(to_string(o.verdict.criterion));
    v["is_vertex"] = o.verdict.is_vertex;
    v["residual"] = o.verdict.residual;
    v["degenerate"] = o.verdict.degenerate;
    v["note"] = o.verdict.note;
    json stages = json::array();
    for (const CoupledModeFit& f : o.verdict.stage_fits)
      stages.push_back({{"beta1", f.beta1},
                        {"beta2", f.beta2},
                        {"kappa12", f.kappa12},
                        {"kappa21", f.kappa21},
                        {"residual", f.residual}});
    if (!stages.empty()) v["stages"] = std::move(stages);
    if (o.verdict.gain) {
      v["g_s"] = o.verdict.gain->model.g_s;
      v["es0"] = std::abs(o.verdict.gain->model.es0);
    }
    verdicts.push_back(std::move(v));
  }
  meta["probes"] = std::move(verdicts);
  std::ofstream side = open_out(sidecar_path(path));
  side << meta.dump(2) << '\n';
}

DetectionReport read_report(const std::filesystem::path& path) {
  const auto meta_path = sidecar_path(path);
  const json meta = read_json(meta_path);
  DetectionReport r;
  try {
    if (meta.at("schema").get<std::string>() != kReportSchema)
      mismatch(meta_path, "unexpected schema");
    DetectionParams& p = r.params;
    p.interface_tol.rel = meta.at("tol").get<double>();
    p.interface_tol.floor = meta.at("tol_floor").get<double>();
    p.vertex_tol = meta.at("vertex_tol").get<double>();
    p.kappa_threshold = meta.at("kappa_threshold").get<double>();
    p.noise = meta.at("noise").get<double>();
    p.seed = meta.at("seed").get<std::uint64_t>();
    p.paper_exact = meta.at("paper_exact").get<bool>();
  } catch (const json::exception& e) {
    mismatch(meta_path, std::string("missing or mistyped field: ") + e.what());
  }

  const auto lines = read_lines(path);
  if (lines.empty() || lines[0] != kReportHeader) mismatch(path, "unexpected CSV header");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = split(lines[i], ',');
    const std::size_t ln = i + 1;
    if (f.size() != 15) mismatch(path, "line " + std::to_string(ln) + ": expected 15 fields");
    if (f[0] == "interface") {
      InterfaceHit h;
      h.trace_id = parse_index(path, ln, f[1]);
      h.z = parse_double(path, ln, f[3]);
      h.position = parse_point(path, ln, f[4]);
      h.t_measured = {parse_double(path, ln, f[5]), parse_double(path, ln, f[6])};
      h.r_measured = {parse_double(path, ln, f[7]), parse_double(path, ln, f[8])};
      h.pair = {parse_double(path, ln, f[9]), parse_double(path, ln, f[10])};
      h.residual = parse_double(path, ln, f[12]);
      r.interface_hits.push_back(std::move(h));
    } else if (f[0] == "vertex") {
      VertexHit h;
      h.source = f[1];
      h.vertex = parse_index(path, ln, f[2]);
      h.position = parse_point(path, ln, f[4]);
      h.criterion = parse_criterion(path, f[11]);
      h.residual = parse_double(path, ln, f[12]);
      h.degenerate = f[13] == "true";
      h.note = f[14];
      r.vertex_hits.push_back(std::move(h));
    } else {
      mismatch(path, "line " + std::to_string(ln) + ": unknown row kind '" + f[0] + "'");
    }
  }
  return r;
}

}  // namespace polyprobe
