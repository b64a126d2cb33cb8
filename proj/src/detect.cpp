#include "polyprobe/detect.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <set>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

constexpr double kBaryEps = 1e-9;

std::vector<double> bary_direction(const SimplicialComplex& c, std::size_t s,
                                   const Point& origin, const Point& dir,
                                   const std::vector<double>& at_origin) {
  Point ahead(origin.size());
  for (std::size_t i = 0; i < origin.size(); ++i) ahead[i] = origin[i] + dir[i];
  std::vector<double> d = c.barycentric(s, ahead);
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= at_origin[i];
  return d;
}

const Medium& lookup(const SimplicialComplex& c, const MediaTable& media, std::size_t s) {
  const MediumId id = c.medium_of(s);
  auto it = media.find(id);
  if (it == media.end())
    throw Error(ErrorKind::InvalidArgument,
                "simplex " + std::to_string(s) + " has no medium record ('" + id + "')");
  return it->second;
}

double constant_of(const Medium& m) {
  return std::visit(
      [](const auto& v) {
        using M = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<M, EmMedium>)
          return v.index;
        else
          return v.impedance;
      },
      m);
}

struct Coefficients {
  double t;
  double r;
};

template <typename CoefficientFn>
std::vector<InterfaceHit> scan(const FieldTrace& trace, std::span<const CandidatePair> candidates,
                               const InterfaceTolerance& tol, std::size_t trace_id,
                               CoefficientFn&& coefficients) {
  struct Prepared {
    CandidatePair pair;
    Coefficients c;
  };
  std::vector<Prepared> prepared;
  for (const CandidatePair& p : candidates) {
    if (p.first == p.second) continue;
    prepared.push_back({p, coefficients(p.first, p.second)});
  }
  std::sort(prepared.begin(), prepared.end(),
            [](const Prepared& x, const Prepared& y) { return x.pair < y.pair; });

  std::vector<InterfaceHit> hits;
  bool in_run = false;
  const auto& s = trace.samples;
  for (std::size_t j = 0; j + 1 < s.size(); ++j) {
    const std::complex<double> before = s[j].incident;
    if (before == 0.0) {
      in_run = false;
      continue;
    }
    const std::complex<double> t_hat = s[j + 1].incident / before;
    const std::complex<double> r_hat = s[j].reflected / before;

    const Prepared* best = nullptr;
    double best_residual = 0.0;
    for (const Prepared& p : prepared) {
      const double t_err = std::abs(t_hat - p.c.t) / std::abs(p.c.t);
      const double r_err = std::abs(r_hat - p.c.r) / std::max(std::abs(p.c.r), tol.floor);
      if (t_err > tol.rel || r_err > tol.rel) continue;
      const double residual = std::max(t_err, r_err);
      // strict < keeps the lexicographically smallest pair on ties
      if (!best || residual < best_residual) {
        best = &p;
        best_residual = residual;
      }
    }
    if (!best) {
      in_run = false;
      continue;
    }
    if (in_run) continue;
    in_run = true;
    InterfaceHit hit;
    hit.trace_id = trace_id;
    hit.z = s[j].z;
    hit.position = trace.ray.at(s[j].z);
    hit.t_measured = t_hat;
    hit.r_measured = r_hat;
    hit.pair = best->pair;
    hit.residual = best_residual;
    hits.push_back(std::move(hit));
  }
  return hits;
}

}  // namespace

std::string_view to_string(WaveKind k) noexcept {
  return k == WaveKind::Em ? "em" : "acoustic";
}

WaveKind wave_kind_of(const Medium& m) noexcept {
  return std::holds_alternative<EmMedium>(m) ? WaveKind::Em : WaveKind::Acoustic;
}

Point Ray::at(double z) const {
  Point p(origin.size());
  for (std::size_t i = 0; i < origin.size(); ++i) p[i] = origin[i] + z * direction[i];
  return p;
}

std::size_t Ray::sample_count() const {
  return static_cast<std::size_t>(std::floor(length / grid_step + 1e-9)) + 1;
}

void validate(const Ray& ray) {
  if (ray.origin.empty() || ray.origin.size() != ray.direction.size())
    throw Error(ErrorKind::InvalidArgument, "ray origin and direction must have equal size");
  double norm2 = 0.0;
  for (double d : ray.direction) norm2 += d * d;
  if (std::abs(std::sqrt(norm2) - 1.0) > 1e-12)
    throw Error(ErrorKind::InvalidArgument, "ray direction must be a unit vector");
  if (!(ray.grid_step > 0.0))
    throw Error(ErrorKind::NonPositiveStep, "ray grid step must be positive");
  if (!(ray.length >= ray.grid_step))
    throw Error(ErrorKind::InvalidArgument, "ray length must be at least one grid step");
}

std::vector<RayCrossing> trace_ray(const SimplicialComplex& c, const Ray& ray) {
  validate(ray);
  if (ray.origin.size() != c.dimension())
    throw Error(ErrorKind::InvalidArgument, "ray dimension differs from complex dimension");

  const double eps_z = 1e-9 * c.length_scale();

  // Starting simplex: contains the origin and is entered by the ray.
  std::optional<std::size_t> current;
  for (std::size_t s = 0; s < c.simplices().size() && !current; ++s) {
    const auto lambda = c.barycentric(s, ray.origin);
    if (std::any_of(lambda.begin(), lambda.end(), [](double l) { return l < -kBaryEps; }))
      continue;
    const auto d = bary_direction(c, s, ray.origin, ray.direction, lambda);
    bool enters = true;
    for (std::size_t i = 0; i < lambda.size(); ++i)
      if (std::abs(lambda[i]) <= kBaryEps && d[i] < -kBaryEps) enters = false;
    if (enters) current = s;
  }
  if (!current) throw Error(ErrorKind::RayOutsideComplex, "ray origin lies outside the complex");

  std::vector<RayCrossing> crossings;
  double z_cur = 0.0;
  for (std::size_t guard = 0; guard <= 4 * c.simplices().size() + 4; ++guard) {
    const std::size_t s = *current;
    const auto lambda = c.barycentric(s, ray.origin);
    const auto d = bary_direction(c, s, ray.origin, ray.direction, lambda);

    std::optional<std::size_t> exit_vertex;
    double z_exit = 0.0;
    for (std::size_t i = 0; i < lambda.size(); ++i) {
      if (!(d[i] < 0.0)) continue;
      const double zi = -lambda[i] / d[i];
      if (!exit_vertex || zi < z_exit) {
        exit_vertex = i;
        z_exit = zi;
      }
    }
    if (!exit_vertex) throw Error(ErrorKind::RayOutsideComplex, "ray does not leave simplex");
    if (z_exit >= ray.length - eps_z) return crossings;
    if (z_exit < z_cur - eps_z)
      throw Error(ErrorKind::RayOutsideComplex, "ray walk went backwards");

    for (std::size_t i = 0; i < lambda.size(); ++i) {
      if (i == *exit_vertex || !(d[i] < 0.0)) continue;
      if (std::abs(-lambda[i] / d[i] - z_exit) <= eps_z)
        throw Error(ErrorKind::ObliqueCrossing,
                    "ray passes through a lower-dimensional face at z = " +
                        std::to_string(z_exit));
    }

    Simplex facet;
    for (std::size_t i = 0; i < lambda.size(); ++i)
      if (i != *exit_vertex) facet.push_back(c.simplices()[s][i]);
    std::sort(facet.begin(), facet.end());
    const auto& owners = c.cofaces(facet);
    if (owners.size() != 2)
      throw Error(ErrorKind::RayOutsideComplex,
                  "ray leaves the complex at z = " + std::to_string(z_exit));

    const Point normal = c.facet_normal(s, *exit_vertex);
    double cosine = 0.0;
    for (std::size_t i = 0; i < normal.size(); ++i) cosine += normal[i] * ray.direction[i];
    if (std::abs(cosine) <= 1.0 - 1e-9)
      throw Error(ErrorKind::ObliqueCrossing,
                  "ray meets interface at z = " + std::to_string(z_exit) +
                      " with |cos| = " + std::to_string(std::abs(cosine)));

    const std::size_t next = owners[0] == s ? owners[1] : owners[0];
    crossings.push_back({z_exit, s, next, facet});
    current = next;
    z_cur = z_exit;
  }
  throw Error(ErrorKind::RayOutsideComplex, "ray walk did not terminate");
}

FieldTrace synthesize_ray_trace(const SimplicialComplex& c, const MediaTable& media,
                                const Ray& ray, double noise_sigma, std::uint64_t seed) {
  const std::vector<RayCrossing> crossings = trace_ray(c, ray);

  // Compartments along the ray: segment k lies between crossing k-1 and k.
  std::vector<std::size_t> segment_simplex;
  if (crossings.empty()) {
    const auto lambda_owner = [&] {
      for (std::size_t s = 0; s < c.simplices().size(); ++s) {
        const auto l = c.barycentric(s, ray.at(0.5 * ray.length));
        if (std::all_of(l.begin(), l.end(), [](double x) { return x >= -kBaryEps; })) return s;
      }
      throw Error(ErrorKind::RayOutsideComplex, "ray midpoint lies outside the complex");
    };
    segment_simplex.push_back(lambda_owner());
  } else {
    segment_simplex.push_back(crossings.front().from);
    for (const RayCrossing& x : crossings) segment_simplex.push_back(x.to);
  }

  const WaveKind kind = wave_kind_of(lookup(c, media, segment_simplex.front()));
  std::vector<Coefficients> step;  // per crossing: incident multiplier, reflected ratio
  for (const RayCrossing& x : crossings) {
    const Medium& a = lookup(c, media, x.from);
    const Medium& b = lookup(c, media, x.to);
    if (wave_kind_of(a) != kind || wave_kind_of(b) != kind)
      throw Error(ErrorKind::WrongWaveKind, "ray crosses media of different wave kinds");
    if (kind == WaveKind::Em) {
      const auto co = amplitude_coefficients_normal(constant_of(a), constant_of(b));
      step.push_back({co.t, co.r});
    } else {
      const auto co = intensity_coefficients(constant_of(a), constant_of(b));
      step.push_back({co.t_i, co.r_i});
    }
  }

  FieldTrace trace;
  trace.ray = ray;
  trace.wave_kind = kind;
  const std::size_t n = ray.sample_count();
  const double eps_z = 1e-9 * ray.grid_step;
  auto passed = [&](double z) {
    std::size_t k = 0;
    while (k < crossings.size() && crossings[k].z <= z + eps_z) ++k;
    return k;
  };

  trace.samples.resize(n);
  std::vector<double> prefix(crossings.size() + 1, 1.0);
  for (std::size_t k = 0; k < crossings.size(); ++k) prefix[k + 1] = prefix[k] * step[k].t;

  for (std::size_t j = 0; j < n; ++j) {
    const double z = std::min(static_cast<double>(j) * ray.grid_step, ray.length);
    const std::size_t k = passed(z);
    TraceSample& smp = trace.samples[j];
    smp.z = z;
    smp.incident = prefix[k];
    smp.medium = c.medium_of(segment_simplex[k]);
    if (j + 1 < n) {
      const double z_next = std::min(static_cast<double>(j + 1) * ray.grid_step, ray.length);
      if (passed(z_next) > k) smp.reflected = step[k].r * prefix[k];
    }
  }
  if (noise_sigma > 0.0) apply_noise(trace, noise_sigma, seed);
  return trace;
}

void apply_noise(FieldTrace& trace, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw Error(ErrorKind::InvalidArgument, "noise sigma must be >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (TraceSample& s : trace.samples) {
    s.incident *= 1.0 + sigma * normal(rng);
    s.reflected *= 1.0 + sigma * normal(rng);
  }
}

std::vector<InterfaceHit> detect_interfaces_em(const FieldTrace& trace,
                                               std::span<const CandidatePair> candidates,
                                               const InterfaceTolerance& tol,
                                               std::size_t trace_id) {
  if (trace.wave_kind != WaveKind::Em)
    throw Error(ErrorKind::WrongWaveKind, "EM interface test needs an EM trace");
  return scan(trace, candidates, tol, trace_id, [](double n1, double n2) {
    const auto c = amplitude_coefficients_normal(n1, n2);
    return Coefficients{c.t, c.r};
  });
}

std::vector<InterfaceHit> detect_interfaces_acoustic(const FieldTrace& trace,
                                                     std::span<const CandidatePair> candidates,
                                                     const InterfaceTolerance& tol,
                                                     TransmissionVariant variant,
                                                     std::size_t trace_id) {
  if (trace.wave_kind != WaveKind::Acoustic)
    throw Error(ErrorKind::WrongWaveKind, "acoustic interface test needs an acoustic trace");
  return scan(trace, candidates, tol, trace_id, [variant](double z1, double z2) {
    const auto c = intensity_coefficients(z1, z2, variant);
    return Coefficients{c.t_i, c.r_i};
  });
}

std::vector<CandidatePair> candidate_pairs(const MediaTable& media, WaveKind kind) {
  std::set<double> values;
  for (const auto& [id, m] : media)
    if (wave_kind_of(m) == kind) values.insert(constant_of(m));
  std::vector<CandidatePair> out;
  for (double a : values)
    for (double b : values)
      if (a != b) out.emplace_back(a, b);
  return out;
}

}  // namespace polyprobe
