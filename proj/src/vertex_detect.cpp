#include "polyprobe/vertex_detect.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

constexpr cdouble kI{0.0, 1.0};
constexpr std::size_t kMinWindowSamples = 8;
constexpr int kMaxEvaluations = 10000;

using Params = std::array<double, 4>;  // beta1, beta2, kappa12, kappa21

Eigen::Matrix2cd rk4_step_map(const Params& p, double h) {
  Eigen::Matrix2cd m;
  m << p[0], p[2], p[3], p[1];
  const Eigen::Matrix2cd a = -kI * h * m;
  const Eigen::Matrix2cd a2 = a * a;
  const Eigen::Matrix2cd a3 = a2 * a;
  return Eigen::Matrix2cd::Identity() + a + a2 / 2.0 + a3 / 6.0 + a3 * a / 24.0;
}

struct Samples {
  std::vector<double> z;
  std::vector<cdouble> a;
  std::vector<cdouble> b;
  double power = 0.0;  // sum of |a|^2 + |b|^2
};

double misfit(const Params& p, double h, const Samples& s) {
  const Eigen::Matrix2cd step = rk4_step_map(p, h);
  Eigen::Vector2cd x(s.a[0], s.b[0]);
  double sq = 0.0;
  for (std::size_t j = 1; j < s.z.size(); ++j) {
    x = step * x;
    sq += std::norm(x(0) - s.a[j]) + std::norm(x(1) - s.b[j]);
  }
  return s.power > 0.0 ? std::sqrt(sq / s.power) : 0.0;
}

// Principal logarithm of a 2x2 matrix through its Schur form.
Eigen::Matrix2cd log2x2(const Eigen::Matrix2cd& p) {
  Eigen::ComplexSchur<Eigen::Matrix2cd> schur(p);
  const Eigen::Matrix2cd& t = schur.matrixT();
  const cdouble t11 = t(0, 0), t22 = t(1, 1);
  const cdouble l11 = std::log(t11), l22 = std::log(t22);
  cdouble l12;
  if (std::abs(t11 - t22) > 1e-8 * std::max(std::abs(t11), std::abs(t22)))
    l12 = t(0, 1) * (l11 - l22) / (t11 - t22);
  else
    l12 = t(0, 1) / t11;
  Eigen::Matrix2cd l;
  l << l11, l12, 0.0, l22;
  const Eigen::Matrix2cd& q = schur.matrixU();
  return q * l * q.adjoint();
}

double uniform_spacing(std::span<const double> z) {
  const double h = z[1] - z[0];
  if (!(h > 0.0)) throw Error(ErrorKind::GridMismatch, "z must be strictly increasing");
  for (std::size_t j = 1; j < z.size(); ++j)
    if (std::abs((z[j] - z[j - 1]) - h) > 1e-6 * h)
      throw Error(ErrorKind::GridMismatch, "coupled-mode fit needs a uniform z grid");
  return h;
}

Samples window_samples(const FieldTrace& ta, const FieldTrace& tb, const ZWindow& w) {
  if (ta.samples.size() != tb.samples.size())
    throw Error(ErrorKind::GridMismatch, "traces have different sample counts");
  Samples s;
  const double eps = 1e-9 * std::max(std::abs(w.end - w.begin), 1e-300);
  for (std::size_t j = 0; j < ta.samples.size(); ++j) {
    const double z = ta.samples[j].z;
    if (std::abs(z - tb.samples[j].z) > 1e-9 * std::max(std::abs(z), 1.0))
      throw Error(ErrorKind::GridMismatch, "traces are sampled on different grids");
    if (z < w.begin - eps || z > w.end + eps) continue;
    s.z.push_back(z);
    s.a.push_back(ta.samples[j].incident);
    s.b.push_back(tb.samples[j].incident);
  }
  return s;
}

void check_kinds(std::span<const FieldTrace> traces) {
  for (const FieldTrace& t : traces)
    if (t.wave_kind != traces.front().wave_kind)
      throw Error(ErrorKind::WrongWaveKind, "vertex traces mix wave kinds");
}

double power_error(const Eigen::Vector2cd& predicted, cdouble y1, cdouble y2, double input) {
  if (!(input > 0.0)) return 0.0;
  return std::max(std::abs(std::norm(predicted(0)) - std::norm(y1)),
                  std::abs(std::norm(predicted(1)) - std::norm(y2))) /
         input;
}

}  // namespace

std::string_view to_string(VertexCriterion c) noexcept {
  switch (c) {
    case VertexCriterion::CoupledMode: return "coupled_mode";
    case VertexCriterion::Cascade: return "cascade";
    case VertexCriterion::Fwm: return "fwm";
  }
  return "unknown";
}

CoupledModeFit fit_coupled_modes(std::span<const double> z, std::span<const cdouble> a,
                                 std::span<const cdouble> b) {
  const std::size_t n = z.size();
  if (a.size() != n || b.size() != n)
    throw Error(ErrorKind::GridMismatch, "a, b and z must have equal length");
  if (n < kMinWindowSamples)
    throw Error(ErrorKind::WindowTooSmall, "coupled-mode fit needs at least " +
                                               std::to_string(kMinWindowSamples) +
                                               " samples, got " + std::to_string(n));
  const double h = uniform_spacing(z);

  Samples s;
  s.z.assign(z.begin(), z.end());
  s.a.assign(a.begin(), a.end());
  s.b.assign(b.begin(), b.end());
  for (std::size_t j = 0; j < n; ++j) s.power += std::norm(a[j]) + std::norm(b[j]);

  CoupledModeFit fit;
  if (!(s.power > 0.0)) {
    fit.degenerate = true;
    return fit;
  }

  // One-step propagator from consecutive sample pairs.
  Eigen::MatrixXcd xs(2, n - 1), ys(2, n - 1);
  for (std::size_t j = 0; j + 1 < n; ++j) {
    xs(0, j) = a[j];
    xs(1, j) = b[j];
    ys(0, j) = a[j + 1];
    ys(1, j) = b[j + 1];
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(xs, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const Eigen::Index rank = (sv(1) > 1e-10 * sv(0)) ? 2 : 1;
  const Eigen::MatrixXcd u = svd.matrixU().leftCols(rank);
  const Eigen::MatrixXcd v = svd.matrixV().leftCols(rank);
  Eigen::VectorXd inv_s = sv.head(rank).cwiseInverse();
  const Eigen::Matrix2cd projector = u * u.adjoint();
  const Eigen::Matrix2cd propagator =
      ys * v * inv_s.asDiagonal() * u.adjoint() + (Eigen::Matrix2cd::Identity() - projector);
  const Eigen::Matrix2cd m = kI * log2x2(propagator) / h;

  Params p{m(0, 0).real(), m(1, 1).real(), m(0, 1).real(), m(1, 0).real()};
  double best = misfit(p, h, s);
  int evals = 1;

  double scale = 1.0 / (h * static_cast<double>(n - 1));
  for (double x : p) scale = std::max(scale, std::abs(x));
  Params step;
  step.fill(1e-4 * scale);
  const double stop = 1e-9 * scale;

  while (evals < kMaxEvaluations &&
         *std::max_element(step.begin(), step.end()) >= stop && best > 0.0) {
    for (std::size_t i = 0; i < p.size() && evals < kMaxEvaluations; ++i) {
      bool moved = false;
      for (double sign : {1.0, -1.0}) {
        Params trial = p;
        trial[i] += sign * step[i];
        const double f = misfit(trial, h, s);
        ++evals;
        if (f < best) {
          best = f;
          p = trial;
          moved = true;
          break;
        }
        if (evals >= kMaxEvaluations) break;
      }
      step[i] *= moved ? 2.0 : 0.5;
    }
  }

  fit.beta1 = p[0];
  fit.beta2 = p[1];
  fit.kappa12 = p[2];
  fit.kappa21 = p[3];
  fit.residual = best;
  fit.evaluations = evals;

  double dynamics = 0.0;
  for (std::size_t j = 1; j < n; ++j)
    dynamics = std::max(dynamics, std::norm(a[j] - a[0]) + std::norm(b[j] - b[0]));
  fit.degenerate = rank < 2 || dynamics <= 1e-24 * (std::norm(a[0]) + std::norm(b[0]));
  return fit;
}

VertexVerdict detect_vertex_coupled_mode(const FieldTrace& trace_a, const FieldTrace& trace_b,
                                         const ZWindow& window, const CoupledModeOptions& opt) {
  if (trace_a.wave_kind != trace_b.wave_kind)
    throw Error(ErrorKind::WrongWaveKind, "vertex traces mix wave kinds");
  const Samples s = window_samples(trace_a, trace_b, window);
  if (s.z.size() < kMinWindowSamples)
    throw Error(ErrorKind::WindowTooSmall, "window holds " + std::to_string(s.z.size()) +
                                               " samples, need " +
                                               std::to_string(kMinWindowSamples));
  const CoupledModeFit fit = fit_coupled_modes(s.z, s.a, s.b);

  VertexVerdict v;
  v.criterion = VertexCriterion::CoupledMode;
  v.residual = fit.residual;
  v.degenerate = fit.degenerate;
  v.stage_fits.push_back(fit);
  const double coupling = std::max(std::abs(fit.kappa12), std::abs(fit.kappa21));
  const bool coupled = coupling > opt.kappa_threshold;
  v.is_vertex = fit.residual <= opt.tol && coupled && !fit.degenerate;
  if (fit.degenerate)
    v.note = "degenerate: no z-dynamics in window";
  else if (!coupled)
    v.note = "coupling below threshold";
  else if (fit.residual > opt.tol)
    v.note = "coupled-mode equations not satisfied";
  return v;
}

VertexVerdict detect_vertex_cascade(std::span<const FieldTrace> traces, const ZWindow& window,
                                    const CascadeOptions& opt) {
  if (traces.size() < 2)
    throw Error(ErrorKind::TooFewTraces, "cascade criterion needs at least two traces");
  check_kinds(traces);
  const std::size_t stages = traces.size() - 1;

  // Window on the common grid, taken from t_0 against each t_k.
  std::vector<Samples> columns;
  for (std::size_t k = 1; k <= stages; ++k)
    columns.push_back(window_samples(traces[0], traces[k], window));
  const std::size_t n = columns[0].z.size();
  if (n < 2 || (n - 1) / stages + 1 < kMinWindowSamples)
    throw Error(ErrorKind::WindowTooSmall,
                "window holds " + std::to_string(n) + " samples for " + std::to_string(stages) +
                    " sections of at least " + std::to_string(kMinWindowSamples));

  std::vector<std::size_t> bounds(stages + 1);
  for (std::size_t k = 0; k <= stages; ++k)
    bounds[k] = static_cast<std::size_t>(
        std::llround(static_cast<double>(k) * static_cast<double>(n - 1) / stages));

  const std::vector<cdouble>& arm1 = columns[0].a;
  const double input = std::norm(arm1[0]) + std::norm(columns[0].b[0]);

  VertexVerdict v;
  v.criterion = VertexCriterion::Cascade;
  double error = 0.0;
  bool coupled = true;
  CascadeSpec spec;

  for (std::size_t k = 0; k < stages; ++k) {
    const std::size_t i0 = bounds[k], i1 = bounds[k + 1];
    const Samples& col = columns[k];
    const std::span<const double> z(col.z.data() + i0, i1 - i0 + 1);
    const std::span<const cdouble> a(arm1.data() + i0, i1 - i0 + 1);
    const std::span<const cdouble> b(col.b.data() + i0, i1 - i0 + 1);
    const CoupledModeFit fit = fit_coupled_modes(z, a, b);
    v.stage_fits.push_back(fit);
    v.degenerate = v.degenerate || fit.degenerate;
    coupled = coupled && std::max(std::abs(fit.kappa12), std::abs(fit.kappa21)) >
                             opt.kappa_threshold;
    error = std::max(error, fit.residual);

    const double length = z.back() - z.front();
    const CouplerStage coupler{fit.kappa(), length};
    const Eigen::Vector2cd x(a.front(), b.front());
    const Eigen::Vector2cd predicted = coupler_matrix(coupler.kappa, coupler.length) * x;
    error = std::max(error, power_error(predicted, a.back(), b.back(), input));

    if (k > 0) {
      // arm 2 hands over from t_k to t_{k+1} at the shared boundary sample
      const cdouble before = columns[k - 1].b[i0];
      const cdouble after = col.b[i0];
      error = std::max(error, std::abs(std::norm(after) - std::norm(before)) / input);
      double lag = 0.0;
      if (before != 0.0 && after != 0.0) {
        lag = -std::arg(after / before);
        if (lag < 0.0) lag += 2.0 * std::numbers::pi;
      }
      spec.stages.push_back(DelayStage{1.0, 0.0, lag});
    }
    spec.stages.push_back(coupler);
  }

  const Eigen::Matrix2cd transfer = cascade_transfer(spec);
  const Eigen::Vector2cd x(arm1[0], columns[0].b[0]);
  const Eigen::Vector2cd y = transfer * x;
  error = std::max(error, power_error(y, arm1[n - 1], columns.back().b[n - 1], input));

  v.residual = error;
  v.is_vertex = error <= opt.tol && coupled && !v.degenerate;
  if (v.degenerate)
    v.note = "degenerate: no z-dynamics in some section";
  else if (!coupled)
    v.note = "a section shows no coupling";
  else if (error > opt.tol)
    v.note = "cascade prediction does not match the traces";
  return v;
}

VertexVerdict detect_vertex_fwm(const FieldTrace& trace, const ZWindow& window,
                                const FwmVertexOptions& opt) {
  if (trace.wave_kind != WaveKind::Em)
    throw Error(ErrorKind::WrongWaveKind, "four-wave-mixing criterion needs an EM trace");
  std::vector<SignalSample> samples;
  const double eps = 1e-9 * std::max(std::abs(window.end - window.begin), 1e-300);
  for (const TraceSample& s : trace.samples)
    if (s.z >= window.begin - eps && s.z <= window.end + eps) samples.push_back({s.z, s.incident});
  const GainFit fit = fit_gain(samples);

  VertexVerdict v;
  v.criterion = VertexCriterion::Fwm;
  v.gain = fit;
  v.residual = fit.residual;
  const double span = samples.back().z - samples.front().z;
  v.degenerate = std::abs(fit.model.g_s) * span <= 1e-9;
  const bool mixing = opt.chi3 != 0.0 && opt.e1 != 0.0 && opt.e2 != 0.0 && opt.e3 != 0.0;
  v.is_vertex = mixing && fit.residual <= opt.tol;
  if (!mixing)
    v.note = "no third-order mixing (chi3 or a pump is zero)";
  else if (fit.residual > opt.tol)
    v.note = "trace is not exponential";
  else if (v.degenerate)
    v.note = "degenerate: zero gain";
  return v;
}

std::vector<FieldTrace> synthesize_coupled_pair(const CoupledModeParams& p, cdouble a0,
                                                cdouble b0, std::span<const Ray> rays) {
  if (rays.size() != 2) throw Error(ErrorKind::InvalidArgument, "coupled pair needs two rays");
  for (const Ray& r : rays) validate(r);
  const Ray& ray = rays[0];
  const ModeTrajectory traj = integrate_coupled_modes(p, ray.length, ray.grid_step, a0, b0);
  std::vector<FieldTrace> out(2);
  for (std::size_t k = 0; k < 2; ++k) {
    out[k].ray = rays[k];
    out[k].ray.length = ray.length;
    out[k].ray.grid_step = ray.grid_step;
    out[k].wave_kind = WaveKind::Em;
    for (std::size_t j = 0; j < traj.z.size(); ++j)
      out[k].samples.push_back({traj.z[j], k == 0 ? traj.a[j] : traj.b[j], {}, {}});
  }
  return out;
}

std::vector<FieldTrace> synthesize_star_coupler(const StarCouplerSpec& spec,
                                                std::span<const Ray> rays, WaveKind kind) {
  const std::size_t stages = spec.kappas.size();
  if (stages == 0) throw Error(ErrorKind::MalformedSpec, "star coupler needs a stage");
  if (spec.delay_phases.size() + 1 != stages)
    throw Error(ErrorKind::MalformedSpec, "need one delay phase between consecutive stages");
  if (rays.size() != stages + 1)
    throw Error(ErrorKind::TooFewTraces, "need one ray per trace");
  if (spec.samples_per_section < kMinWindowSamples)
    throw Error(ErrorKind::WindowTooSmall, "sections need at least 8 samples");
  if (!(spec.grid_step > 0.0)) throw Error(ErrorKind::NonPositiveStep, "grid step");

  const std::size_t per = spec.samples_per_section;
  const std::size_t n = stages * per + 1;
  const double section_length = static_cast<double>(per) * spec.grid_step;

  std::vector<FieldTrace> out(stages + 1);
  for (std::size_t k = 0; k <= stages; ++k) {
    out[k].ray = rays[k];
    out[k].ray.length = static_cast<double>(n - 1) * spec.grid_step;
    out[k].ray.grid_step = spec.grid_step;
    out[k].wave_kind = kind;
    out[k].samples.resize(n);
    for (std::size_t j = 0; j < n; ++j) out[k].samples[j].z = static_cast<double>(j) * spec.grid_step;
  }

  cdouble arm1 = spec.x1, arm2 = spec.x2;
  for (std::size_t k = 0; k < stages; ++k) {
    if (k > 0) arm2 *= std::exp(-kI * spec.delay_phases[k - 1]);
    CoupledModeParams p;
    p.beta1 = p.beta2 = spec.beta;
    p.kappa12 = p.kappa21 = spec.kappas[k];
    const ModeTrajectory traj =
        integrate_coupled_modes(p, section_length, spec.grid_step, arm1, arm2);
    if (traj.z.size() != per + 1)
      throw Error(ErrorKind::GridMismatch, "section grid does not match the trace grid");
    for (std::size_t j = 0; j <= per; ++j) {
      const std::size_t idx = k * per + j;
      out[0].samples[idx].incident = traj.a[j];
      out[k + 1].samples[idx].incident = traj.b[j];
    }
    arm1 = traj.a.back();
    arm2 = traj.b.back();
  }
  return out;
}

FieldTrace synthesize_gain_trace(const GainModel& m, const Ray& ray) {
  validate(ray);
  FieldTrace t;
  t.ray = ray;
  t.wave_kind = WaveKind::Em;
  const std::size_t n = ray.sample_count();
  for (std::size_t j = 0; j < n; ++j) {
    const double z = std::min(static_cast<double>(j) * ray.grid_step, ray.length);
    t.samples.push_back({z, degenerate_gain(m, z), {}, {}});
  }
  return t;
}

}  // namespace polyprobe
