#include <catch2/catch_amalgamated.hpp>

#include <dicube/generate.hpp>

using namespace dicube;

TEST_CASE("iterated subdivision of the interval") {
  auto A = representable(Site::Box, 1);
  SdTower T(A, 4);
  for (int k = 0; k <= 4; ++k) {
    CHECK(T.at(k).counts() == std::vector<int>{(1 << k) + 1, 1 << k});
    REQUIRE_FALSE(check_presheaf(T.at(k)));
  }
}

TEST_CASE("subdivided square is the two by two grid") {
  auto S = subdivide(representable(Site::Box, 2));
  REQUIRE_FALSE(check_presheaf(S.P));
  CHECK(S.P.counts() == std::vector<int>{9, 12, 4});
  CHECK(S.P.counts() == grid(2, 2).P.counts());
  auto S3 = subdivide(representable(Site::Box, 3));
  CHECK(S3.P.counts() == std::vector<int>{27, 54, 36, 8});
}

TEST_CASE("edgewise subdivision of simplices") {
  auto S1 = subdivide(representable(Site::Delta, 1));
  CHECK(S1.P.counts() == std::vector<int>{3, 2});
  auto S2 = subdivide(representable(Site::Delta, 2));
  REQUIRE_FALSE(check_presheaf(S2.P));
  CHECK(S2.P.count(2) == 4);
  CHECK(S2.P.count(0) == 6);
}

TEST_CASE("gamma and gamma-bar on the subdivided interval") {
  auto A = representable(Site::Box, 1);
  auto S = subdivide(A);
  auto pos = walk_positions(S.P);
  std::vector<int> g(3), gb(3);
  auto G = sd_gamma(A, S, false), GB = sd_gamma(A, S, true);
  REQUIRE_FALSE(check_morphism(G, S.P, A));
  REQUIRE_FALSE(check_morphism(GB, S.P, A));
  for (int v = 0; v < 3; ++v) {
    g[pos[v][0]] = G.map[0][v].id;
    gb[pos[v][0]] = GB.map[0][v].id;
  }
  CHECK(g == std::vector<int>{0, 0, 1});
  CHECK(gb == std::vector<int>{0, 1, 1});
}

TEST_CASE("gamma is natural for maps between cubes") {
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n) {
      auto Bm = representable(Site::Box, m), Bn = representable(Site::Box, n);
      auto Sm = subdivide(Bm), Sn = subdivide(Bn);
      for (bool barred : {false, true})
        for (auto& f : enumerate_morphisms(Bm, Bn)) {
          auto sdf = subdivide_morphism(Bm, Sm, Sn, f);
          REQUIRE_FALSE(check_morphism(sdf, Sm.P, Sn.P));
          CHECK(compose(sd_gamma(Bn, Sn, barred), sdf) == compose(f, sd_gamma(Bm, Sm, barred)));
        }
    }
}

TEST_CASE("subdivision preserves composition of morphisms") {
  auto B0 = representable(Site::Box, 0), B1 = representable(Site::Box, 1), B2 = representable(Site::Box, 2);
  auto S0 = subdivide(B0), S1 = subdivide(B1), S2 = subdivide(B2);
  for (auto& f : enumerate_morphisms(B0, B1))
    for (auto& g : enumerate_morphisms(B1, B2))
      CHECK(subdivide_morphism(B0, S0, S2, compose(g, f)) ==
            compose(subdivide_morphism(B1, S1, S2, g), subdivide_morphism(B0, S0, S1, f)));
}

TEST_CASE("subdivision commutes with tensor on cell counts") {
  auto A = representable(Site::Box, 1);
  auto sdA = subdivide(A).P;
  for (int a = 0; a <= 1; ++a) {
    auto L = a ? A : representable(Site::Box, 0);
    auto lhs = subdivide(tensor(L, A).P).P;
    auto rhs = tensor(subdivide(L).P, sdA).P;
    CHECK(lhs.counts() == rhs.counts());
  }
}

TEST_CASE("supports of cells of the subdivided square") {
  auto B = representable(Site::Box, 2);
  SdTower T(B, 1);
  const Presheaf& S = T.at(1);
  std::map<int, int> by_dim;  // dimension of the support, per vertex
  for (int v = 0; v < S.count(0); ++v) ++by_dim[sub_dim(T.support(1, atomic_hull(S, 0, v)))];
  // four corners, four edge midpoints, one centre
  CHECK(by_dim == std::map<int, int>{{0, 4}, {1, 4}, {2, 1}});
}

TEST_CASE("folding atomic pieces of the doubly subdivided interval") {
  auto A = representable(Site::Box, 1);
  SdTower T(A, 2);
  auto gg = fold_gamma(T);
  REQUIRE_FALSE(check_morphism(gg, T.at(2), A));
  const Presheaf& S2 = T.at(2);
  for (int k = 0; k <= 1; ++k)
    for (int i = 0; i < S2.count(k); ++i) {
      auto F = fold_atomic(T, gg, atomic_hull(S2, k, i));
      INFO("cell " << k << ":" << i);
      CHECK(F.ok());
    }
  // the middle vertex maps onto the end vertex
  int n_whole = 0;
  for (int i = 0; i < S2.count(0); ++i) n_whole += sub_dim(fold_atomic(T, gg, atomic_hull(S2, 0, i)).B) == 1;
  CHECK(n_whole == 3);
}

TEST_CASE("star collapse on the square") {
  auto B = representable(Site::Box, 2);
  SdTower T(B, 2);
  auto gg = fold_gamma(T);
  for (int v = 0; v < T.at(2).count(0); ++v) CHECK(star_collapse_check(T, gg, v).holds);
}

TEST_CASE("natural fold along a face inclusion") {
  auto B0 = representable(Site::Box, 0), B1 = representable(Site::Box, 1);
  SdTower T0(B0, 2), T1(B1, 2);
  auto g0 = fold_gamma(T0), g1 = fold_gamma(T1);
  for (auto& f : enumerate_morphisms(B0, B1)) {
    auto sd2f = tower_morphism(T0, T1, f, 2);
    Sub A0 = full_sub(T0.at(2));
    Sub A1 = image(sd2f, T1.at(2), A0);
    auto F0 = fold_atomic(T0, g0, A0), F1 = fold_atomic(T1, g1, A1);
    REQUIRE(F0.ok());
    REQUIRE(F1.ok());
    // alpha: A0 -> A1 is sd^2 f corestricted
    Morphism alpha;
    alpha.map.resize(F0.A_part.P.levels());
    for (int k = 0; k < F0.A_part.P.levels(); ++k)
      for (int i = 0; i < F0.A_part.P.count(k); ++i) {
        const Cell& c = sd2f.map[k][F0.A_part.incl.map[k][i].id];
        alpha.map[k].push_back(F1.A_part.P.cell(k, F1.A_part.to_sub[c.dim][c.id]));
      }
    CHECK(natural_fold(F0, F1, alpha).commutes);
  }
}

TEST_CASE("simplicial folding holds on the interval but not on the triangle") {
  auto D1 = representable(Site::Delta, 1);
  SdTower T1(D1, 2);
  auto g1 = fold_gamma(T1);
  for (int k = 0; k < T1.at(2).levels(); ++k)
    for (int i = 0; i < T1.at(2).count(k); ++i) CHECK(fold_atomic(T1, g1, atomic_hull(T1.at(2), k, i)).ok());

  // some edges of sd^2 of the triangle join interiors of two different edges, so no least support exists
  auto D2 = representable(Site::Delta, 2);
  SdTower T2(D2, 2);
  auto g2 = fold_gamma(T2);
  int ok = 0, total = 0;
  for (int k = 0; k < T2.at(2).levels(); ++k)
    for (int i = 0; i < T2.at(2).count(k); ++i, ++total) ok += fold_atomic(T2, g2, atomic_hull(T2.at(2), k, i)).ok();
  CHECK(total == 61);
  CHECK(ok == 47);
}
