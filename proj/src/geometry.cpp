#include "polyprobe/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <Eigen/Dense>

#include "polyprobe/error.hpp"

namespace polyprobe {

namespace {

// Visits every sorted (k+1)-subset of `s`.
template <typename Fn>
void for_each_face(const Simplex& sorted, std::size_t k, Fn&& fn) {
  const std::size_t m = sorted.size();
  const std::size_t r = k + 1;
  if (r > m) return;
  std::vector<std::size_t> idx(r);
  for (std::size_t i = 0; i < r; ++i) idx[i] = i;
  Simplex face(r);
  while (true) {
    for (std::size_t i = 0; i < r; ++i) face[i] = sorted[idx[i]];
    fn(face);
    std::size_t i = r;
    while (i > 0 && idx[i - 1] == m - r + i - 1) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < r; ++j) idx[j] = idx[j - 1] + 1;
  }
}

Simplex sorted_copy(Simplex s) {
  std::sort(s.begin(), s.end());
  return s;
}

Eigen::MatrixXd edge_matrix(const std::vector<Point>& verts, const Simplex& s) {
  const std::size_t n = s.size() - 1;
  Eigen::MatrixXd e(n, n);
  const Point& v0 = verts[s[0]];
  for (std::size_t j = 1; j <= n; ++j)
    for (std::size_t i = 0; i < n; ++i) e(i, j - 1) = verts[s[j]][i] - v0[i];
  return e;
}

std::string describe(const Simplex& s) {
  std::string out = "(";
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) out += ",";
    out += std::to_string(s[i]);
  }
  return out + ")";
}

}  // namespace

MediumId SimplicialComplex::medium_of(std::size_t s) const {
  auto it = media_.find(s);
  return it == media_.end() ? MediumId{} : it->second;
}

const std::vector<std::size_t>& SimplicialComplex::cofaces(const Simplex& facet) const {
  static const std::vector<std::size_t> none;
  auto it = facet_cofaces_.find(facet);
  return it == facet_cofaces_.end() ? none : it->second;
}

std::vector<double> SimplicialComplex::barycentric(std::size_t s, const Point& p) const {
  const Simplex& simplex = simplices_.at(s);
  const Eigen::MatrixXd e = edge_matrix(vertices_, simplex);
  Eigen::VectorXd rhs(dimension_);
  for (std::size_t i = 0; i < dimension_; ++i) rhs(i) = p[i] - vertices_[simplex[0]][i];
  const Eigen::VectorXd mu = e.partialPivLu().solve(rhs);
  std::vector<double> lambda(dimension_ + 1);
  lambda[0] = 1.0 - mu.sum();
  for (std::size_t i = 0; i < dimension_; ++i) lambda[i + 1] = mu(i);
  return lambda;
}

Point SimplicialComplex::facet_normal(std::size_t s, std::size_t opposite) const {
  const Simplex& simplex = simplices_.at(s);
  const std::size_t n = dimension_;
  std::vector<std::size_t> facet;
  for (std::size_t i = 0; i <= n; ++i)
    if (i != opposite) facet.push_back(simplex[i]);

  const Point& f0 = vertices_[facet[0]];
  Eigen::VectorXd w(n);
  for (std::size_t i = 0; i < n; ++i) w(i) = vertices_[simplex[opposite]][i] - f0[i];
  if (n > 1) {
    Eigen::MatrixXd e(n, n - 1);
    for (std::size_t j = 1; j < n; ++j)
      for (std::size_t i = 0; i < n; ++i) e(i, j - 1) = vertices_[facet[j]][i] - f0[i];
    w -= e * e.colPivHouseholderQr().solve(w);
  }
  // outward: away from the dropped vertex
  w = -w.normalized();
  return Point(w.data(), w.data() + n);
}

SimplicialComplex build_complex(std::size_t n, std::vector<Point> vertices,
                                std::vector<Simplex> simplices,
                                std::map<std::size_t, MediumId> media) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (vertices.empty() || simplices.empty())
    throw Error(ErrorKind::InvalidArgument, "complex needs vertices and simplices");
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].size() != n)
      throw Error(ErrorKind::InvalidArgument,
                  "vertex " + std::to_string(v) + " has " +
                      std::to_string(vertices[v].size()) + " coordinates, expected " +
                      std::to_string(n));

  std::vector<bool> used(vertices.size(), false);
  std::set<Simplex> seen;
  SimplicialComplex c;

  for (std::size_t s = 0; s < simplices.size(); ++s) {
    const Simplex& simplex = simplices[s];
    if (simplex.size() != n + 1)
      throw Error(ErrorKind::DegenerateSimplex,
                  "simplex " + std::to_string(s) + " needs " + std::to_string(n + 1) +
                      " vertices");
    for (std::size_t v : simplex) {
      if (v >= vertices.size())
        throw Error(ErrorKind::UnknownVertex,
                    "simplex " + std::to_string(s) + " references vertex " +
                        std::to_string(v));
      used[v] = true;
    }
    Simplex key = sorted_copy(simplex);
    if (std::adjacent_find(key.begin(), key.end()) != key.end())
      throw Error(ErrorKind::DegenerateSimplex,
                  "simplex " + std::to_string(s) + " repeats a vertex");
    if (!seen.insert(key).second)
      throw Error(ErrorKind::DegenerateSimplex,
                  "simplex " + std::to_string(s) + " duplicates " + describe(key));

    const Eigen::MatrixXd e = edge_matrix(vertices, simplex);
    double edge_product = 1.0;
    for (Eigen::Index j = 0; j < e.cols(); ++j) edge_product *= e.col(j).norm();
    if (edge_product == 0.0 || std::abs(e.determinant()) <= 1e-12 * edge_product)
      throw Error(ErrorKind::DegenerateSimplex,
                  "simplex " + std::to_string(s) + " has zero volume");

    for_each_face(key, n - 1, [&](const Simplex& facet) {
      auto& owners = c.facet_cofaces_[facet];
      owners.push_back(s);
      if (owners.size() > 2)
        throw Error(ErrorKind::FacetOvercount,
                    "facet " + describe(facet) + " is shared by more than two simplices");
    });
  }

  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (!used[v])
      throw Error(ErrorKind::DimensionalInhomogeneity,
                  "vertex " + std::to_string(v) + " lies in no " + std::to_string(n) +
                      "-simplex");

  for (const auto& [s, id] : media)
    if (s >= simplices.size())
      throw Error(ErrorKind::InvalidArgument,
                  "medium '" + id + "' assigned to unknown simplex " + std::to_string(s));

  double diag2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double lo = vertices[0][i], hi = vertices[0][i];
    for (const Point& p : vertices) {
      lo = std::min(lo, p[i]);
      hi = std::max(hi, p[i]);
    }
    diag2 += (hi - lo) * (hi - lo);
  }

  c.dimension_ = n;
  c.vertices_ = std::move(vertices);
  c.simplices_ = std::move(simplices);
  c.media_ = std::move(media);
  c.scale_ = diag2 > 0.0 ? std::sqrt(diag2) : 1.0;
  return c;
}

FacetClassification classify_facets(const SimplicialComplex& c) {
  FacetClassification out;
  for (const Simplex& facet : k_skeleton(c, c.dimension() - 1)) {
    const auto& owners = c.cofaces(facet);
    if (owners.size() == 2)
      out.interfaces.push_back({facet, owners[0], owners[1]});
    else
      out.boundary_facets.push_back({facet, owners.at(0)});
  }
  return out;
}

std::vector<Simplex> k_skeleton(const SimplicialComplex& c, std::size_t k) {
  if (k > c.dimension())
    throw Error(ErrorKind::KOutOfRange, "k = " + std::to_string(k) + " exceeds dimension " +
                                            std::to_string(c.dimension()));
  if (k == c.dimension()) return c.simplices();
  std::set<Simplex> faces;
  for (const Simplex& s : c.simplices())
    for_each_face(sorted_copy(s), k, [&](const Simplex& f) { faces.insert(f); });
  return {faces.begin(), faces.end()};
}

std::vector<Interface> vertex_star_interfaces(const SimplicialComplex& c,
                                              const FacetClassification& f,
                                              std::size_t v) {
  if (v >= c.vertices().size())
    throw Error(ErrorKind::UnknownVertex, "vertex " + std::to_string(v));
  std::vector<Interface> out;
  for (const Interface& i : f.interfaces)
    if (std::binary_search(i.facet.begin(), i.facet.end(), v)) out.push_back(i);
  return out;
}

}  // namespace polyprobe
