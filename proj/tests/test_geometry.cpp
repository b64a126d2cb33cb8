#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "polyprobe/error.hpp"
#include "polyprobe/geometry.hpp"

using namespace polyprobe;

namespace {

SimplicialComplex rod() {
  return build_complex(1, {{0.0}, {1.0}, {2.0}, {3.0}}, {{0, 1}, {1, 2}, {2, 3}});
}

SimplicialComplex two_triangles() {
  return build_complex(2, {{0, 0}, {1, 0}, {0, 1}, {1, -1}}, {{0, 1, 2}, {0, 3, 1}});
}

// Hub vertex 0 with four triangles fanned around it, open between the first
// and last triangle.
SimplicialComplex open_fan() {
  return build_complex(2, {{0, 0}, {1, 0}, {0, 1}, {-1, 0}, {0, -1}, {1, -1}},
                       {{0, 1, 2}, {0, 2, 3}, {0, 3, 4}, {0, 4, 5}});
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an Error");
  return ErrorKind::Io;
}

// Oracle: count how many simplices contain each (n-1)-face by brute force.
std::map<Simplex, int> facet_counts(const std::vector<Simplex>& simplices) {
  std::map<Simplex, int> count;
  for (const Simplex& s : simplices)
    for (std::size_t drop = 0; drop < s.size(); ++drop) {
      Simplex f;
      for (std::size_t i = 0; i < s.size(); ++i)
        if (i != drop) f.push_back(s[i]);
      std::sort(f.begin(), f.end());
      ++count[f];
    }
  return count;
}

}  // namespace

TEST_CASE("rod builds with three segments") {
  const auto c = rod();
  CHECK(c.dimension() == 1);
  CHECK(c.simplices().size() == 3);
  CHECK(c.vertices().size() == 4);
}

TEST_CASE("two glued triangles: one interface, four boundary edges") {
  const auto f = classify_facets(two_triangles());
  REQUIRE(f.interfaces.size() == 1);
  CHECK(f.interfaces[0].facet == Simplex{0, 1});
  CHECK(f.boundary_facets.size() == 4);
}

TEST_CASE("three triangles on one edge overcount the facet") {
  const std::vector<Simplex> simplices{{0, 1, 2}, {0, 1, 3}, {0, 1, 4}};
  CHECK(facet_counts(simplices).at({0, 1}) == 3);
  CHECK(kind_of([&] {
          build_complex(2, {{0, 0}, {1, 0}, {0, 1}, {0, -1}, {1, 1}}, simplices);
        }) == ErrorKind::FacetOvercount);
}

TEST_CASE("construction errors") {
  SUBCASE("collinear triangle") {
    CHECK(kind_of([] { build_complex(2, {{0, 0}, {1, 0}, {2, 0}}, {{0, 1, 2}}); }) ==
          ErrorKind::DegenerateSimplex);
  }
  SUBCASE("zero-length segment") {
    CHECK(kind_of([] { build_complex(1, {{0.0}, {0.0}}, {{0, 1}}); }) ==
          ErrorKind::DegenerateSimplex);
  }
  SUBCASE("repeated vertex index") {
    CHECK(kind_of([] { build_complex(1, {{0.0}, {1.0}}, {{0, 0}}); }) ==
          ErrorKind::DegenerateSimplex);
  }
  SUBCASE("duplicated simplex") {
    CHECK(kind_of([] { build_complex(1, {{0.0}, {1.0}}, {{0, 1}, {1, 0}}); }) ==
          ErrorKind::DegenerateSimplex);
  }
  SUBCASE("orphan vertex") {
    CHECK(kind_of([] { build_complex(1, {{0.0}, {1.0}, {5.0}}, {{0, 1}}); }) ==
          ErrorKind::DimensionalInhomogeneity);
  }
  SUBCASE("index out of range") {
    CHECK(kind_of([] { build_complex(1, {{0.0}, {1.0}}, {{0, 2}}); }) ==
          ErrorKind::UnknownVertex);
  }
}

TEST_CASE("classify_facets on the rod and a single simplex") {
  const auto f = classify_facets(rod());
  REQUIRE(f.interfaces.size() == 2);
  CHECK(f.interfaces[0].facet == Simplex{1});
  CHECK(f.interfaces[1].facet == Simplex{2});
  REQUIRE(f.boundary_facets.size() == 2);
  CHECK(f.boundary_facets[0].facet == Simplex{0});
  CHECK(f.boundary_facets[1].facet == Simplex{3});

  const auto tet = build_complex(3, {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}}, {{0, 1, 2, 3}});
  const auto ft = classify_facets(tet);
  CHECK(ft.interfaces.empty());
  CHECK(ft.boundary_facets.size() == 4);
}

TEST_CASE("classification partitions the (n-1)-skeleton") {
  for (const auto& c : {rod(), two_triangles(), open_fan()}) {
    const auto f = classify_facets(c);
    const auto counts = facet_counts(c.simplices());
    const auto skel = k_skeleton(c, c.dimension() - 1);
    CHECK(f.interfaces.size() + f.boundary_facets.size() == skel.size());
    for (const auto& i : f.interfaces) CHECK(counts.at(i.facet) == 2);
    for (const auto& b : f.boundary_facets) CHECK(counts.at(b.facet) == 1);
  }
}

TEST_CASE("k_skeleton") {
  const auto r = rod();
  CHECK(k_skeleton(r, 1) == r.simplices());
  CHECK(k_skeleton(r, 0) == std::vector<Simplex>{{0}, {1}, {2}, {3}});
  CHECK(k_skeleton(two_triangles(), 1).size() == 5);
  CHECK(k_skeleton(two_triangles(), 0).size() == 4);
  CHECK(kind_of([&] { k_skeleton(r, 2); }) == ErrorKind::KOutOfRange);
}

TEST_CASE("vertex_star_interfaces") {
  const auto r = rod();
  const auto f = classify_facets(r);
  CHECK(vertex_star_interfaces(r, f, 1).size() == 1);
  CHECK(vertex_star_interfaces(r, f, 0).empty());
  CHECK(kind_of([&] { vertex_star_interfaces(r, f, 9); }) == ErrorKind::UnknownVertex);

  const auto fan = open_fan();
  const auto ff = classify_facets(fan);
  const auto star = vertex_star_interfaces(fan, ff, 0);
  CHECK(star.size() == 3);
  for (const auto& i : star) CHECK(std::count(i.facet.begin(), i.facet.end(), 0u) == 1);
  CHECK(vertex_star_interfaces(fan, ff, 1).empty());
  CHECK(vertex_star_interfaces(fan, ff, 2).size() == 1);
}

TEST_CASE("barycentric coordinates and facet normals") {
  const auto c = two_triangles();
  const auto b = c.barycentric(0, {0.25, 0.25});
  REQUIRE(b.size() == 3);
  CHECK(b[0] == doctest::Approx(0.5));
  CHECK(b[1] == doctest::Approx(0.25));
  CHECK(b[2] == doctest::Approx(0.25));

  // Facet opposite vertex 2 of triangle (0,1,2) is the shared edge y = 0.
  const auto n = c.facet_normal(0, 2);
  CHECK(n[0] == doctest::Approx(0.0));
  CHECK(n[1] == doctest::Approx(-1.0));
}

TEST_CASE("media attach to simplices") {
  const auto c = build_complex(1, {{0.0}, {1.0}, {2.0}}, {{0, 1}, {1, 2}}, {{0, "a"}, {1, "b"}});
  CHECK(c.medium_of(0) == "a");
  CHECK(c.medium_of(1) == "b");
}
