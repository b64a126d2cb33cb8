#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

namespace polyprobe {

using Point = std::vector<double>;
/// Vertex indices of a simplex. Facets and skeleton faces are always sorted.
using Simplex = std::vector<std::size_t>;
using MediumId = std::string;

struct Interface {
  Simplex facet;
  std::size_t simplex_a;
  std::size_t simplex_b;
};

struct BoundaryFacet {
  Simplex facet;
  std::size_t simplex;
};

/// Interfaces and boundary facets, each in ascending (lexicographic) facet
/// order. Together they partition the (n-1)-skeleton.
struct FacetClassification {
  std::vector<Interface> interfaces;
  std::vector<BoundaryFacet> boundary_facets;
};

/// A closed, dimensionally homogeneous, finite simplicial complex whose
/// n-simplices are the homogeneous compartments of the domain. Each simplex
/// carries the flat metric of its vertex coordinates.
class SimplicialComplex {
 public:
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<Point>& vertices() const noexcept { return vertices_; }
  const std::vector<Simplex>& simplices() const noexcept { return simplices_; }
  const std::map<std::size_t, MediumId>& media() const noexcept { return media_; }

  /// Medium of simplex `s`, or an empty id when none was assigned.
  MediumId medium_of(std::size_t s) const;

  /// n-simplices containing `facet` (sorted vertex tuple); one or two entries,
  /// empty if `facet` is not an (n-1)-face of the complex.
  const std::vector<std::size_t>& cofaces(const Simplex& facet) const;

  /// Barycentric coordinates of `p` with respect to simplex `s`.
  std::vector<double> barycentric(std::size_t s, const Point& p) const;

  /// Unit normal of the facet obtained by dropping local vertex `opposite`
  /// from simplex `s`.
  Point facet_normal(std::size_t s, std::size_t opposite) const;

  /// Length scale used for geometric tolerances (bounding-box diagonal).
  double length_scale() const noexcept { return scale_; }

 private:
  friend SimplicialComplex build_complex(std::size_t, std::vector<Point>,
                                         std::vector<Simplex>,
                                         std::map<std::size_t, MediumId>);

  std::size_t dimension_ = 0;
  std::vector<Point> vertices_;
  std::vector<Simplex> simplices_;
  std::map<std::size_t, MediumId> media_;
  std::map<Simplex, std::vector<std::size_t>> facet_cofaces_;
  double scale_ = 1.0;
};

/// Validates and builds a complex of dimension `n`.
///
/// Throws DimensionalInhomogeneity when a vertex belongs to no n-simplex,
/// FacetOvercount when an (n-1)-face is shared by more than two n-simplices
/// and DegenerateSimplex for zero-volume, repeated-index or duplicated
/// simplices.
SimplicialComplex build_complex(std::size_t n, std::vector<Point> vertices,
                                std::vector<Simplex> simplices,
                                std::map<std::size_t, MediumId> media = {});

FacetClassification classify_facets(const SimplicialComplex& c);

/// All distinct k-faces, sorted lexicographically. For k == n the input
/// simplex list is returned unchanged.
std::vector<Simplex> k_skeleton(const SimplicialComplex& c, std::size_t k);

/// Interfaces whose vertex set contains `v`, in ascending facet order.
std::vector<Interface> vertex_star_interfaces(const SimplicialComplex& c,
                                              const FacetClassification& f,
                                              std::size_t v);

}  // namespace polyprobe
