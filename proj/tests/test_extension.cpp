#include <catch2/catch_amalgamated.hpp>

#include <dicube/generate.hpp>
#include <dicube/verify.hpp>

using namespace dicube;

namespace {

// Number of classes of (L, psi, g) at level m under the relations (L, psi.u, g) ~ (L', psi, u.g),
// generated naively over every boxplus map u between budgeted words.
int coend_classes(ExSource& src, int max_len, int m) {
  auto words = boxplus_words(max_len);
  std::map<std::tuple<Shape, int, Key>, int> idx;
  for (auto& L : words)
    for (auto& g : monotone_maps_into(cube(m), preorder_of_shape(L)))
      for (int p = 0; p < src.count(L); ++p) idx.emplace(std::make_tuple(L, p, g), static_cast<int>(idx.size()));
  detail::UnionFind uf(idx.size());
  for (auto& L : words)
    for (auto& Lp : words)
      for (auto& u : boxplus_homs(L, Lp, 4))
        for (int p = 0; p < src.count(Lp); ++p) {
          int r = src.restrict(Lp, p, u);
          for (auto& g : monotone_maps_into(cube(m), preorder_of_shape(L)))
            uf.unite(idx.at({L, r, g}), idx.at({Lp, p, precompose(u.table, MonotoneMap{cube(m), L, g})}));
        }
  std::set<int> roots;
  for (int i = 0; i < static_cast<int>(idx.size()); ++i) roots.insert(uf.find(i));
  return static_cast<int>(roots.size());
}

}  // namespace

TEST_CASE("budgeted words") {
  CHECK(boxplus_words(0).size() == 1);
  CHECK(boxplus_words(1).size() == 3);
  CHECK(boxplus_words(2).size() == 7);
}

TEST_CASE("ex agrees with a naive coend at low levels") {
  for (int n = 0; n <= 2; ++n) {
    auto C = representable(Site::Box, n);
    PresheafExSource src(C);
    Ex E(src, CoendBudget{2, 1});
    for (int m = 0; m <= 1; ++m) {
      INFO("n=" << n << " m=" << m);
      CHECK(static_cast<int>(E.P().cells_at(m).size()) == coend_classes(src, 2, m));
    }
  }
}

TEST_CASE("ex of a point and of the interval") {
  auto P = representable(Site::Box, 0);
  PresheafExSource sp(P);
  Ex EP(sp, CoendBudget{2, 2});
  CHECK(EP.P().counts() == std::vector<int>{1});

  auto r1 = ex_representable_check(1, CoendBudget{2, 2});
  CHECK(r1.iso);
  CHECK(r1.ex_counts == std::vector<int>{2, 1, 2});
  CHECK(r1.ex_counts == r1.nerve_counts);
}

TEST_CASE("ex of the square is not the cubical nerve of the square") {
  // edges of ex through the word [2] are not identified with the nerve's five edges
  auto r2 = ex_representable_check(2, CoendBudget{2, 2});
  CHECK(r2.ex_counts == std::vector<int>{4, 7, 36});
  CHECK(r2.nerve_counts[1] == 5);
  CHECK_FALSE(r2.iso);
}

TEST_CASE("ex is stable in the word budget on small inputs") {
  for (int n = 0; n <= 1; ++n) {
    auto C = representable(Site::Box, n);
    PresheafExSource src(C);
    auto s = ex_stability(src, CoendBudget{2, 2});
    INFO("n=" << n);
    CHECK(s.stable);
  }
}

TEST_CASE("upsilon is a valid map into ex") {
  for (int n = 0; n <= 2; ++n) {
    auto C = representable(Site::Box, n);
    PresheafExSource src(C);
    Ex E(src, CoendBudget{2, 2});
    auto u = upsilon(C, src, E);
    CHECK_FALSE(check_morphism(u, C, E.P()));
  }
}

TEST_CASE("zeta sends vertices to even positions of the subdivision") {
  auto A = representable(Site::Box, 1);
  auto sd = subdivide(A);
  auto pos = walk_positions(sd.P);
  PresheafExSource src(sd.P);
  Ex E(src, CoendBudget{2, 1});
  auto z = zeta(A, sd, src, E);
  REQUIRE_FALSE(check_morphism(z, A, E.P()));
  std::vector<int> got;
  for (int v = 0; v < 2; ++v) {
    const ExElement& e = E.representative(z.map[0][v]);
    got.push_back(pos[src.vertices(e.L, e.psi)[e.g[0]]][0]);
  }
  // vertex 0 lands on 0 and vertex 1 on 2
  CHECK(got == std::vector<int>{0, 2});
}

TEST_CASE("ex is functorial and upsilon is natural") {
  auto B0 = representable(Site::Box, 0), B1 = representable(Site::Box, 1);
  PresheafExSource s0(B0), s1(B1);
  CoendBudget b{2, 2};
  Ex E0(s0, b), E1(s1, b);
  auto u0 = upsilon(B0, s0, E0), u1 = upsilon(B1, s1, E1);
  for (auto& f : enumerate_morphisms(B0, B1)) {
    auto exf = ex_morphism(E0, s0, E1, s1, f);
    CHECK_FALSE(check_morphism(exf, E0.P(), E1.P()));
    CHECK(compose(exf, u0) == compose(u1, f));
  }
  for (auto& f : enumerate_morphisms(B1, B1)) {
    auto exf = ex_morphism(E1, s1, E1, s1, f);
    CHECK(compose(exf, u1) == compose(u1, f));
  }
}

TEST_CASE("composition of a nerve undoes upsilon") {
  for (int pts = 1; pts <= 3; ++pts)
    for (auto& P : preorders_up_to_iso(pts)) {
      NerveExSource src(P);
      CoendBudget b = affordable_budget(src, CoendBudget{2, 2});
      Model N = nerve_cubical_model(P, b.max_dim);
      Ex E(src, b);
      auto u = upsilon_nerve(N, src, E);
      auto mu = nerve_composition(N, src, E);
      INFO(preorder_label(P));
      CHECK_FALSE(check_morphism(mu, E.P(), N.P));
      auto id = compose(mu, u);
      id.map.resize(std::min(id.map.size(), static_cast<std::size_t>(N.P.levels())));
      CHECK(id == identity_morphism(N.P));
    }
}

TEST_CASE("chain of units through ex^2") {
  auto A = representable(Site::Box, 1);
  ExTower T(A, 2, CoendBudget{1, 1});
  REQUIRE(T.height() == 2);
  auto c = T.chain(2);
  CHECK_FALSE(check_morphism(c, A, T.at(2)));
  // distinct vertices stay distinct
  CHECK(c.map[0][0] != c.map[0][1]);
}

TEST_CASE("upsilon is the only natural family with its vertex values") {
  CHECK(upsilon_competitors(1, CoendBudget{2, 1}) == 1);
}
