#include <catch2/catch_amalgamated.hpp>

#include <dicube/generate.hpp>

using namespace dicube;

TEST_CASE("cylinder of the interval is the square") {
  auto A = representable(Site::Box, 1);
  Cylinder Y = cylinder(point_diagram(A));
  CHECK(Y.D.value[0].counts() == std::vector<int>{4, 4, 1});
  CHECK_FALSE(check_morphism(Y.end0[0], A, Y.D.value[0]));
  CHECK_FALSE(check_morphism(Y.projection[0], Y.D.value[0], A));
  CHECK(compose(Y.projection[0], Y.end0[0]) == identity_morphism(A));
  CHECK(compose(Y.projection[0], Y.end1[0]) == identity_morphism(A));
}

TEST_CASE("maps of the interval into itself form two classes") {
  auto A = representable(Site::Box, 1);
  auto G = classes(A, A);
  CHECK(G.nodes.size() == 3);
  // without connections the identity is isolated; the constants are joined by the second projection
  CHECK(G.class_count == 2);
}

TEST_CASE("a point into the arrow nerve") {
  auto N = nerve_cubical(preorder_of_shape(ordinal(1)), 2);
  auto G = classes(representable(Site::Box, 0), N);
  CHECK(G.nodes.size() == 2);
  CHECK(G.class_count == 1);
}

TEST_CASE("a point into two disjoint points") {
  auto G = classes(representable(Site::Box, 0), points(2));
  CHECK(G.class_count == 2);
  auto Gd = classes(representable(Site::Box, 0), nerve_cubical(discrete_preorder(2), 1));
  CHECK(Gd.class_count == 2);
}

TEST_CASE("homotopy edges point from the earlier end to the later") {
  auto A = representable(Site::Box, 1);
  auto P = representable(Site::Box, 0);
  auto G = classes(P, A);
  REQUIRE(G.nodes.size() == 2);
  int lo = G.nodes[0][0].map[0][0].id == 0 ? 0 : 1;
  CHECK(G.edges == std::set<std::pair<int, int>>{{lo, 1 - lo}});
}

namespace {

// Pinned dipaths of length 6 from (0,0) to (3,3), into qua tri X so that corner flips are homotopies.
HomotopyGraph corner_dipaths(const Complex& X) {
  Extension tX = triangulate(X.P);
  Qua Q = qua(tX.C.P, 2);
  Morphism eta = adjunction_unit(X.P, tX, Q);
  auto I = path_complex(6);
  Diagram B = pair_diagram(I.P, I.vertex_at({0}), I.vertex_at({6}));
  Diagram C = pair_diagram(Q.P(), eta.map[0][X.vertex_at({0, 0})].id, eta.map[0][X.vertex_at({3, 3})].id);
  REQUIRE_FALSE(check_diagram(B));
  REQUIRE_FALSE(check_diagram(C));
  return homotopy_graph(B, C, pinned_ends());
}

}  // namespace

TEST_CASE("staircases in the plain cubical annulus are all rigid") {
  auto Y = square_annulus();
  REQUIRE(Y.P.counts() == std::vector<int>{16, 24, 8});
  auto I = path_complex(6);
  Diagram B = pair_diagram(I.P, I.vertex_at({0}), I.vertex_at({6}));
  Diagram C = pair_diagram(Y.P, Y.vertex_at({0, 0}), Y.vertex_at({3, 3}));
  auto G = homotopy_graph(B, C, pinned_ends());
  // 20 staircases in the full grid, all of which avoid the open middle square
  CHECK(G.nodes.size() == 20);
  CHECK(G.class_count == 20);
}

TEST_CASE("pinned dipaths across the square annulus") {
  auto G = corner_dipaths(square_annulus());
  CHECK(G.class_count == 2);
}

TEST_CASE("the full grid has one dipath class") { CHECK(corner_dipaths(grid(3, 3)).class_count == 1); }

TEST_CASE("diagram checks catch a broken arrow") {
  auto Y = square_annulus();
  Diagram C = pair_diagram(Y.P, 0, 1);
  C.action[0].map[0].pop_back();
  CHECK(check_diagram(C));
}

TEST_CASE("equivalence probes") {
  auto A = representable(Site::Box, 1);
  auto P = representable(Site::Box, 0);
  std::vector<std::pair<std::string, Presheaf>> probes{{"point", P}, {"interval", A}};
  SECTION("collapsing the interval is refuted by the interval probe") {
    // the identity of the interval is its own class, so two classes go to one
    auto c = enumerate_morphisms(A, P).front();
    auto R = directed_equivalence_probe(A, P, c, probes);
    REQUIRE(R.probes.size() == 2);
    CHECK(R.probes[0].injective);
    CHECK(R.probes[0].surjective);
    CHECK(R.probes[1].source_classes == 2);
    CHECK_FALSE(R.probes[1].injective);
    CHECK(R.refuted());
  }
  SECTION("an identity passes every probe") {
    auto R = directed_equivalence_probe(A, A, identity_morphism(A), probes);
    CHECK_FALSE(R.refuted());
  }
  SECTION("two points into the interval are refuted") {
    auto two = points(2);
    Morphism ends;
    ends.map = {{A.cell(0, 0), A.cell(0, 1)}};
    REQUIRE_FALSE(check_morphism(ends, two, A));
    auto R = directed_equivalence_probe(two, A, ends, probes);
    CHECK_FALSE(R.probes[0].injective);
    CHECK(R.refuted());
  }
}
