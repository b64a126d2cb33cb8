#include "polyprobe/cli.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "polyprobe/coupled_mode.hpp"
#include "polyprobe/fwm.hpp"
#include "polyprobe/waveguide.hpp"

namespace polyprobe {

namespace {

Point centroid(const SimplicialComplex& c, const Simplex& s) {
  Point p(c.dimension(), 0.0);
  for (std::size_t v : s)
    for (std::size_t i = 0; i < p.size(); ++i) p[i] += c.vertices()[v][i];
  for (double& x : p) x /= static_cast<double>(s.size());
  return p;
}

Point unit_from(const Point& from, const Point& to) {
  Point d(from.size());
  double n2 = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    d[i] = to[i] - from[i];
    n2 += d[i] * d[i];
  }
  const double n = std::sqrt(n2);
  if (n == 0.0) return {};
  for (double& x : d) x /= n;
  return d;
}

[[noreturn]] void probe_error(const VertexProbe& p, const std::string& msg) {
  throw Error(ErrorKind::ConfigParseError, "probe '" + p.name + "': " + msg);
}

// Rays leaving the probe vertex, one per interface of its star: towards the
// interface centroid, or into the far-side simplex when the interface is the
// vertex itself. Reused cyclically when the star has fewer interfaces than
// the probe needs traces.
std::vector<Ray> star_rays(const SimplicialComplex& c, const FacetClassification& f,
                           const VertexProbe& probe, std::size_t count) {
  if (probe.vertex >= c.vertices().size()) probe_error(probe, "unknown vertex");
  const Point& v = c.vertices()[probe.vertex];
  const auto star = vertex_star_interfaces(c, f, probe.vertex);
  if (star.empty()) probe_error(probe, "vertex lies on no interface");
  std::vector<Point> dirs;
  for (const Interface& i : star) {
    Point d = unit_from(v, centroid(c, i.facet));
    if (d.empty()) d = unit_from(v, centroid(c, c.simplices()[i.simplex_b]));
    dirs.push_back(std::move(d));
  }
  std::vector<Ray> rays(count);
  for (std::size_t k = 0; k < count; ++k) {
    rays[k].origin = v;
    rays[k].direction = dirs[k % dirs.size()];
    rays[k].grid_step = probe.grid_step;
    rays[k].length = static_cast<double>(probe.samples_per_section) * probe.grid_step;
  }
  return rays;
}

std::optional<double> probe_chi3(const ScenarioConfig& cfg, const VertexProbe& p) {
  if (p.chi3) return p.chi3;
  if (!p.medium) return std::nullopt;
  for (const MediumRecord& m : cfg.media) {
    if (m.name != *p.medium) continue;
    if (const auto* em = std::get_if<EmMedium>(&m.medium)) return em->chi3;
    return std::nullopt;
  }
  probe_error(p, "unknown medium '" + *p.medium + "'");
}

std::vector<FieldTrace> simulate_probe(const ScenarioConfig& cfg, const SimplicialComplex& c,
                                       const FacetClassification& f, const VertexProbe& p) {
  switch (p.criterion) {
    case VertexCriterion::CoupledMode: {
      CoupledModeParams cm;
      cm.beta1 = cm.beta2 = p.beta;
      const double kappa = p.kappas.empty() ? 0.0 : p.kappas.front();
      cm.kappa12 = cm.kappa21 = kappa;
      const auto rays = star_rays(c, f, p, 2);
      return synthesize_coupled_pair(cm, p.x1, p.x2, rays);
    }
    case VertexCriterion::Cascade: {
      if (p.kappas.empty()) probe_error(p, "cascade probe needs kappa values");
      StarCouplerSpec spec;
      spec.kappas = p.kappas;
      spec.delay_phases = p.delay_phases;
      spec.beta = p.beta;
      spec.x1 = p.x1;
      spec.x2 = p.x2;
      spec.samples_per_section = p.samples_per_section;
      spec.grid_step = p.grid_step;
      const auto rays = star_rays(c, f, p, p.kappas.size() + 1);
      return synthesize_star_coupler(spec, rays, cfg.wave_kind());
    }
    case VertexCriterion::Fwm: {
      if (p.vertex >= c.vertices().size()) probe_error(p, "unknown vertex");
      if (p.direction.size() != c.dimension()) probe_error(p, "direction has wrong dimension");
      Ray ray;
      ray.direction = p.direction;
      ray.origin = c.vertices()[p.vertex];
      for (std::size_t i = 0; i < ray.origin.size(); ++i)
        ray.origin[i] -= 0.5 * p.length * p.direction[i];
      ray.length = p.length;
      ray.grid_step = p.grid_step;
      return {synthesize_gain_trace(GainModel{p.amplitude, p.gain}, ray)};
    }
  }
  return {};
}

VertexVerdict judge_probe(const ScenarioConfig& cfg, const VertexProbe& p,
                          std::span<const FieldTrace> traces, const DetectionParams& d) {
  if (traces.empty()) throw Error(ErrorKind::SchemaMismatch, "probe '" + p.name + "' has no traces");
  const ZWindow window{0.0, traces.front().ray.length};
  switch (p.criterion) {
    case VertexCriterion::CoupledMode:
      if (traces.size() != 2)
        throw Error(ErrorKind::SchemaMismatch, "coupled-mode probe '" + p.name + "' needs 2 traces");
      return detect_vertex_coupled_mode(traces[0], traces[1], window,
                                        CoupledModeOptions{d.vertex_tol, d.kappa_threshold});
    case VertexCriterion::Cascade:
      return detect_vertex_cascade(traces, window, CascadeOptions{d.vertex_tol, d.kappa_threshold});
    case VertexCriterion::Fwm: {
      FwmVertexOptions opt;
      opt.chi3 = probe_chi3(cfg, p).value_or(0.0);
      opt.e1 = p.pumps[0];
      opt.e2 = p.pumps[1];
      opt.e3 = p.pumps[2];
      opt.tol = d.vertex_tol;
      return detect_vertex_fwm(traces.front(), window, opt);
    }
  }
  return {};
}

bool same_point(const Point& a, const Point& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (std::abs(a[i] - b[i]) > 1e-9 * (1.0 + std::abs(a[i]))) return false;
  return true;
}

cdouble parse_complex(const std::string& s) {
  const auto comma = s.find(',');
  std::size_t used = 0;
  const double re = std::stod(s.substr(0, comma), &used);
  if (comma == std::string::npos) {
    if (used != s.size()) throw std::invalid_argument(s);
    return {re, 0.0};
  }
  const std::string rest = s.substr(comma + 1);
  const double im = std::stod(rest, &used);
  if (used != rest.size()) throw std::invalid_argument(s);
  return {re, im};
}

double parse_real(const std::string& field, const std::string& stage) {
  try {
    std::size_t used = 0;
    const double x = std::stod(field, &used);
    if (used == field.size() && std::isfinite(x)) return x;
  } catch (const std::exception&) {
  }
  throw Error(ErrorKind::MalformedSpec, "stage '" + stage + "': '" + field + "' is not a number");
}

CascadeSpec parse_stages(const std::vector<std::string>& args) {
  CascadeSpec spec;
  for (const std::string& a : args) {
    std::vector<std::string> f;
    std::stringstream ss(a);
    for (std::string tok; std::getline(ss, tok, ':');) f.push_back(tok);
    if (f.size() == 3 && f[0] == "c") {
      spec.stages.push_back(CouplerStage{parse_real(f[1], a), parse_real(f[2], a)});
    } else if (f.size() == 4 && f[0] == "d") {
      spec.stages.push_back(DelayStage{parse_real(f[1], a), parse_real(f[2], a), parse_real(f[3], a)});
    } else {
      throw Error(ErrorKind::MalformedSpec,
                  "stage '" + a + "' is neither c:KAPPA:L nor d:BETA:L1:L2");
    }
  }
  validate(spec);
  return spec;
}

std::string num(double x) { return format_number(x); }

void write_simulation(const std::string& config, const std::string& out_path,
                      std::optional<std::uint64_t> seed, std::optional<double> noise,
                      std::ostream& out) {
  ScenarioConfig cfg = load_scenario(config);
  if (seed) cfg.detection.params.seed = *seed;
  if (noise) {
    if (!(*noise >= 0.0)) throw Error(ErrorKind::ConfigParseError, "--noise must be >= 0");
    cfg.detection.params.noise = *noise;
  }
  const TraceSet set = simulate_scenario(cfg);
  write_traces(out_path, set);
  std::size_t samples = 0;
  for (const TraceRecord& r : set.traces) samples += r.trace.samples.size();
  out << "traces: " << set.traces.size() << " samples: " << samples << '\n';
}

void write_detection(const std::string& config, const std::string& traces_path,
                     const std::string& out_path, std::optional<double> tol, bool paper_exact,
                     std::ostream& out) {
  ScenarioConfig cfg = load_scenario(config);
  const TraceSet traces = read_traces(traces_path);
  if (tol) {
    if (!(*tol > 0.0)) throw Error(ErrorKind::ConfigParseError, "--tol must be positive");
    cfg.detection.params.interface_tol.rel = *tol;
  }
  if (paper_exact) cfg.detection.params.paper_exact = true;
  const DetectionRun run = detect_scenario(cfg, traces);
  write_report(out_path, run.report, cfg.wave_kind(), run.probes);
  out << "interfaces: " << run.report.interface_hits.size()
      << " vertices: " << run.report.vertex_hits.size() << '\n';
}

}  // namespace

int exit_code_for(ErrorKind k) noexcept {
  switch (k) {
    case ErrorKind::ConfigParseError:
      return 2;
    case ErrorKind::DimensionalInhomogeneity:
    case ErrorKind::FacetOvercount:
    case ErrorKind::DegenerateSimplex:
    case ErrorKind::KOutOfRange:
    case ErrorKind::UnknownVertex:
    case ErrorKind::RayOutsideComplex:
    case ErrorKind::ObliqueCrossing:
      return 3;
    case ErrorKind::SchemaMismatch:
      return 4;
    case ErrorKind::MalformedSpec:
      return 5;
    default:
      return 1;
  }
}

TraceSet simulate_scenario(const ScenarioConfig& cfg) {
  const SimplicialComplex c = build_scenario_complex(cfg);
  const MediaTable media = cfg.media_table();
  const DetectionParams& d = cfg.detection.params;
  TraceSet set;
  set.wave_kind = cfg.wave_kind();
  set.noise = d.noise;
  set.seed = d.seed;
  for (std::size_t i = 0; i < cfg.rays.size(); ++i) {
    TraceRecord r;
    r.id = set.traces.size();
    r.source = TraceSource::Ray;
    r.index = i;
    r.trace = synthesize_ray_trace(c, media, cfg.rays[i], d.noise, d.seed + r.id);
    set.traces.push_back(std::move(r));
  }
  if (!cfg.probes.empty()) {
    const FacetClassification f = classify_facets(c);
    for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
      for (FieldTrace& t : simulate_probe(cfg, c, f, cfg.probes[i])) {
        TraceRecord r;
        r.id = set.traces.size();
        r.source = TraceSource::Probe;
        r.index = i;
        r.probe = cfg.probes[i].name;
        if (d.noise > 0.0) apply_noise(t, d.noise, d.seed + r.id);
        r.trace = std::move(t);
        set.traces.push_back(std::move(r));
      }
    }
  }
  return set;
}

DetectionRun detect_scenario(const ScenarioConfig& cfg, const TraceSet& traces) {
  const SimplicialComplex c = build_scenario_complex(cfg);
  const MediaTable media = cfg.media_table();
  const WaveKind kind = cfg.wave_kind();
  if (!cfg.media.empty() && traces.wave_kind != kind)
    throw Error(ErrorKind::SchemaMismatch, "traces are " + std::string(to_string(traces.wave_kind)) +
                                               " but the scenario is " + std::string(to_string(kind)));

  DetectionRun run;
  run.report.params = cfg.detection.params;
  const DetectionParams& d = run.report.params;
  const std::vector<CandidatePair> candidates =
      cfg.detection.candidates.empty() ? candidate_pairs(media, kind) : cfg.detection.candidates;
  const TransmissionVariant variant =
      d.paper_exact ? TransmissionVariant::Printed : TransmissionVariant::EnergyConserving;

  std::vector<std::vector<FieldTrace>> probe_traces(cfg.probes.size());
  for (const TraceRecord& r : traces.traces) {
    if (r.source == TraceSource::Ray) {
      if (r.index >= cfg.rays.size())
        throw Error(ErrorKind::SchemaMismatch, "trace " + std::to_string(r.id) + " names ray " +
                                                   std::to_string(r.index) + " not in the config");
      if (!same_point(r.trace.ray.origin, cfg.rays[r.index].origin) ||
          !same_point(r.trace.ray.direction, cfg.rays[r.index].direction))
        throw Error(ErrorKind::SchemaMismatch,
                    "trace " + std::to_string(r.id) + " does not follow its configured ray");
      auto hits = kind == WaveKind::Em
                      ? detect_interfaces_em(r.trace, candidates, d.interface_tol, r.id)
                      : detect_interfaces_acoustic(r.trace, candidates, d.interface_tol, variant, r.id);
      for (InterfaceHit& h : hits) run.report.interface_hits.push_back(std::move(h));
    } else {
      if (r.index >= cfg.probes.size() || cfg.probes[r.index].name != r.probe)
        throw Error(ErrorKind::SchemaMismatch,
                    "trace " + std::to_string(r.id) + " names unknown probe '" + r.probe + "'");
      probe_traces[r.index].push_back(r.trace);
    }
  }

  for (std::size_t i = 0; i < cfg.probes.size(); ++i) {
    const VertexProbe& p = cfg.probes[i];
    if (p.vertex >= c.vertices().size())
      throw Error(ErrorKind::UnknownVertex, "probe '" + p.name + "'");
    ProbeOutcome o{p.name, p.vertex, judge_probe(cfg, p, probe_traces[i], d)};
    if (o.verdict.is_vertex)
      run.report.vertex_hits.push_back(VertexHit{p.name, p.vertex, c.vertices()[p.vertex],
                                                 o.verdict.criterion, o.verdict.residual,
                                                 o.verdict.degenerate, o.verdict.note});
    run.probes.push_back(std::move(o));
  }
  return run;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interface and vertex detection on polyhedral wave-propagation domains", "polyprobe"};
  app.require_subcommand(1);

  std::string config, out_path, traces_path;
  std::optional<std::uint64_t> seed;
  std::optional<double> noise, tol;
  bool paper_exact = false;

  auto* sim = app.add_subcommand("simulate", "Synthesize field traces for every ray and probe");
  sim->add_option("--config", config, "Scenario file")->required();
  sim->add_option("--out", out_path, "Trace CSV (metadata goes to <out>.json)")->required();
  sim->add_option("--seed", seed, "Noise seed (overrides the config)");
  sim->add_option("--noise", noise, "Multiplicative noise sigma (overrides the config)");

  auto* det = app.add_subcommand("detect", "Locate interfaces and vertices in recorded traces");
  det->add_option("--config", config, "Scenario file")->required();
  det->add_option("--traces", traces_path, "Trace CSV written by simulate")->required();
  det->add_option("--out", out_path, "Report CSV (metadata goes to <out>.json)")->required();
  det->add_option("--tol", tol, "Relative interface tolerance (overrides the config)");
  det->add_flag("--paper-exact", paper_exact, "Use the printed acoustic transmission formula");

  std::vector<std::string> stages;
  std::string x1 = "1", x2 = "0";
  auto* cpl = app.add_subcommand("coupler", "Transfer matrix of a coupler/delay cascade");
  cpl->add_option("stages", stages, "c:KAPPA:L and d:BETA:L1:L2 in propagation order");
  cpl->add_option("--x1", x1, "Input amplitude of arm 1 (re or re,im)");
  cpl->add_option("--x2", x2, "Input amplitude of arm 2 (re or re,im)");

  SlabSpec slab;
  double wavelength = 1.55e-6;
  int max_modes = 32;
  auto* sm = app.add_subcommand("slab-modes", "Guided TE modes of a symmetric slab");
  sm->add_option("--n-core", slab.n_core, "Core index")->capture_default_str();
  sm->add_option("--n-clad", slab.n_clad, "Cladding index")->capture_default_str();
  sm->add_option("--thickness", slab.thickness, "Core thickness (m)")->capture_default_str();
  sm->add_option("--wavelength", wavelength, "Vacuum wavelength (m)")->capture_default_str();
  sm->add_option("--max-modes", max_modes, "Highest mode order + 1")->capture_default_str();

  double fw_wavelength = 1.55e-6, fw_index = 1.5, fw_chi3 = 1e-20, fw_dk = 0.0, fw_length = 1e-2;
  std::vector<double> pumps{1e6, 1e6, 1e6};
  std::size_t fw_samples = 11;
  auto* fw = app.add_subcommand("fwm", "Signal growth under degenerate four-wave mixing");
  fw->add_option("--wavelength", fw_wavelength, "Signal vacuum wavelength (m)")->capture_default_str();
  fw->add_option("--index", fw_index, "Refractive index at the signal")->capture_default_str();
  fw->add_option("--chi3", fw_chi3, "Effective chi3 (m^2/V^2)")->capture_default_str();
  fw->add_option("--pumps", pumps, "Pump amplitudes E1 E2 E3 (V/m)")->expected(3);
  fw->add_option("--delta-k", fw_dk, "Phase mismatch along z (rad/m)")->capture_default_str();
  fw->add_option("--length", fw_length, "Propagation length (m)")->capture_default_str();
  fw->add_option("--samples", fw_samples, "Output points")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    if (*cpl && stages.empty()) {
      err << "coupler: " << e.what() << '\n';
      return 5;
    }
    err << e.what() << '\n' << "run with --help for usage\n";
    return 2;
  }

  try {
    if (*sim) {
      write_simulation(config, out_path, seed, noise, out);
    } else if (*det) {
      write_detection(config, traces_path, out_path, tol, paper_exact, out);
    } else if (*cpl) {
      if (stages.empty()) {
        err << "usage: polyprobe coupler c:KAPPA:L [d:BETA:L1:L2 c:KAPPA:L ...] [--x1 A] [--x2 B]\n";
        return 5;
      }
      const CascadeSpec spec = parse_stages(stages);
      cdouble in1, in2;
      try {
        in1 = parse_complex(x1);
        in2 = parse_complex(x2);
      } catch (const std::exception&) {
        throw Error(ErrorKind::InvalidArgument, "--x1/--x2 take re or re,im");
      }
      const Eigen::Matrix2cd t = cascade_transfer(spec);
      const Eigen::Vector2cd y = t * Eigen::Vector2cd(in1, in2);
      for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j)
          out << 'T' << i + 1 << j + 1 << ' ' << num(t(i, j).real()) << ' ' << num(t(i, j).imag())
              << '\n';
      out << "P1 " << num(std::norm(y(0))) << '\n' << "P2 " << num(std::norm(y(1))) << '\n';
    } else if (*sm) {
      if (!(wavelength > 0.0)) throw Error(ErrorKind::InvalidArgument, "--wavelength must be positive");
      slab.k0 = 2.0 * std::numbers::pi / wavelength;
      const auto modes = solve_te_slab_modes(slab, max_modes);
      out << "order parity beta n_eff residual\n";
      for (const GuidedMode& m : modes)
        out << m.order << ' ' << (m.parity == Parity::Even ? "even" : "odd") << ' ' << num(m.beta)
            << ' ' << num(m.beta / slab.k0) << ' ' << num(m.residual) << '\n';
    } else if (*fw) {
      if (!(fw_wavelength > 0.0) || !(fw_index > 0.0) || !(fw_length > 0.0) || fw_samples < 2)
        throw Error(ErrorKind::InvalidArgument, "wavelength, index and length must be positive, samples >= 2");
      FwmParams p;
      p.omega_s = 2.0 * std::numbers::pi * kSpeedOfLight / fw_wavelength;
      p.k_s = fw_index * p.omega_s / kSpeedOfLight;
      p.chi3_eff = fw_chi3;
      p.e1 = pumps[0];
      p.e2 = pumps[1];
      p.e3 = pumps[2];
      p.delta_k_z = fw_dk;
      const double step = fw_length / static_cast<double>(fw_samples - 1);
      const auto sig = integrate_signal(p, fw_length, step / 64.0);
      out << (fw_dk != 0.0 ? "z re im abs abs_sinc2\n" : "z re im abs\n");
      for (std::size_t j = 0; j < fw_samples; ++j) {
        const SignalSample& s = sig[std::min(j * 64, sig.size() - 1)];
        out << num(s.z) << ' ' << num(s.field.real()) << ' ' << num(s.field.imag()) << ' '
            << num(std::abs(s.field));
        if (fw_dk != 0.0)
          out << ' ' << (s.z > 0.0 ? num(std::abs(signal_field_sinc_squared(p, s.z))) : num(0.0));
        out << '\n';
      }
    }
  } catch (const Error& e) {
    err << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace polyprobe
