#include <catch2/catch_amalgamated.hpp>

#include <dicube/generate.hpp>
#include <dicube/triangulation.hpp>
#include <dicube/verify.hpp>

using namespace dicube;

TEST_CASE("triangulated cubes have n! top simplices") {
  int fact = 1;
  for (int n = 1; n <= 4; ++n) {
    fact *= n;
    auto T = tri(representable(Site::Box, n));
    REQUIRE_FALSE(check_presheaf(T));
    CHECK(T.count(n) == fact);
    CHECK(T.count(0) == 1 << n);
  }
  // the square: 4 vertices, 5 edges (4 sides and the diagonal), 2 triangles
  CHECK(tri(representable(Site::Box, 2)).counts() == std::vector<int>{4, 5, 2});
}

TEST_CASE("triangulation of glued complexes") {
  CHECK(tri(path_complex(3).P).counts() == std::vector<int>{4, 3});
  CHECK(tri(square_annulus().P).counts() == std::vector<int>{16, 32, 16});
  CHECK(tri(grid(3, 3).P).counts() == std::vector<int>{16, 33, 18});
}

TEST_CASE("simplicial nerves of small orders") {
  CHECK(nerve_simplicial(preorder_of_shape(ordinal(1))).counts() == std::vector<int>{2, 1});
  CHECK(nerve_simplicial(preorder_of_shape(cube(2))).counts() == std::vector<int>{4, 5, 2});
  CHECK(nerve_simplicial(discrete_preorder(3)).counts() == std::vector<int>{3});
  // the triangulated square is the nerve of its vertex order
  CHECK(tri(representable(Site::Box, 2)).counts() == nerve_simplicial(preorder_of_shape(cube(2))).counts());
}

TEST_CASE("cubical nerve of the arrow") {
  CHECK(nerve_cubical(preorder_of_shape(ordinal(1)), 2).counts() == std::vector<int>{2, 1, 2});
  // the cubical nerve of the square order: every monotone square with a nondegenerate table
  auto N = nerve_cubical(preorder_of_shape(cube(2)), 2);
  REQUIRE_FALSE(check_presheaf(N));
  CHECK(N.count(0) == 4);
  CHECK(N.count(1) == 5);
}

TEST_CASE("qua counts") {
  auto Q1 = qua(tri(representable(Site::Box, 1)), 2);
  CHECK(Q1.P().counts() == std::vector<int>{2, 1, 2});
  auto Q2 = qua(tri(representable(Site::Box, 2)), 2);
  CHECK(Q2.P().counts() == std::vector<int>{4, 5, 22});
  auto QA = qua(tri(square_annulus().P), 2);
  CHECK(QA.P().counts() == std::vector<int>{16, 32, 160});
}

TEST_CASE("qua cells are simplicial maps out of triangulated cubes") {
  auto X = tri(representable(Site::Box, 1));
  auto Q = qua(X, 2);
  for (int k = 0; k <= 2; ++k)
    for (int i = 0; i < Q.P().count(k); ++i) {
      auto g = Q.as_map(Q.P().cell(k, i));
      CHECK_FALSE(check_morphism(g, Qua::cube_tri(k), X));
      CHECK(Q.cell_for(g, k) == Q.P().cell(k, i));
    }
  // the count at level k is the number of maps tri box[k] -> X
  for (int k = 0; k <= 2; ++k) CHECK(Q.P().cells_at(k).size() == enumerate_morphisms(Qua::cube_tri(k), X).size());
}

TEST_CASE("unit and counit satisfy the triangle identity on tri") {
  for (int n = 0; n <= 2; ++n) {
    auto B = representable(Site::Box, n);
    Extension triB = triangulate(B);
    Qua Q = qua(triB.C.P, n);
    Morphism eta = adjunction_unit(B, triB, Q);
    REQUIRE_FALSE(check_morphism(eta, B, Q.P()));
    Extension triQ = triangulate(Q.P());
    Morphism eps = adjunction_counit(Q, triQ);
    REQUIRE_FALSE(check_morphism(eps, triQ.C.P, triB.C.P));
    Morphism tri_eta = tri_morphism(triB, triQ, B, eta);
    INFO("n=" << n);
    CHECK(compose(eps, tri_eta) == identity_morphism(triB.C.P));
  }
}

TEST_CASE("tri is functorial on face maps") {
  auto B0 = representable(Site::Box, 0), B1 = representable(Site::Box, 1), B2 = representable(Site::Box, 2);
  auto t0 = triangulate(B0), t1 = triangulate(B1), t2 = triangulate(B2);
  for (auto& f : enumerate_morphisms(B0, B1))
    for (auto& g : enumerate_morphisms(B1, B2))
      CHECK(tri_morphism(t0, t2, B0, compose(g, f)) == compose(tri_morphism(t1, t2, B1, g), tri_morphism(t0, t1, B0, f)));
}

TEST_CASE("tri of sd against sd of tri") {
  for (int n = 0; n <= 2; ++n) {
    auto c = sd_tri_comparison(representable(Site::Box, n));
    INFO("n=" << n);
    CHECK(c.iso);
    CHECK(c.gamma_triangle);
    CHECK(c.gamma_bar_triangle);
  }
}

TEST_CASE("qua tri matches the glued cubical nerves") {
  for (auto& [name, B] : cubical_fixtures(false)) {
    if (B.dim() == 0) continue;
    auto q = qt_colimit_check(B, 2);
    INFO(name);
    CHECK(q.iso);
    CHECK(q.qua_counts == q.colimit_counts);
  }
}

TEST_CASE("level preorders of nerves against arrow nerves") {
  for (int pts = 1; pts <= 3; ++pts)
    for (auto& P : preorders_up_to_iso(pts))
      for (int n = 0; n <= 2; ++n) {
        auto g = graph_nerve_check(P, n);
        INFO(preorder_label(P) << " level " << n);
        CHECK(g.bijective);
      }
  // two-point chain at level 0: pairs (0,0) (0,1) (1,1)
  auto g = graph_nerve_check(preorder_of_shape(ordinal(1)), 0);
  CHECK(g.related_pairs == 3);
  CHECK(g.arrow_cells == 3);
}

TEST_CASE("preorder classes up to isomorphism") {
  CHECK(preorders_up_to_iso(1).size() == 1);
  CHECK(preorders_up_to_iso(2).size() == 3);
  CHECK(preorders_up_to_iso(3).size() == 9);
  for (auto& P : preorders_up_to_iso(3)) CHECK(is_preorder(P));
}
