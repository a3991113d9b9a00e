#include <catch2/catch_amalgamated.hpp>

#include <dicube/approximation.hpp>

#include <random>

using namespace dicube;

namespace {

Bary random_bary(int n, std::mt19937& rng) {
  std::exponential_distribution<double> e(1.0);
  Bary x(n + 1);
  double s = 0;
  for (double& v : x) s += v = e(rng);
  for (double& v : x) v /= s;
  return x;
}

GeomPoint at_vertex(const Presheaf& X, int v) { return {X.cell(0, v), {1.0}}; }

// The identity of Delta[1] as a PL map.
PLVertexMap identity_pl(const Presheaf& D) {
  return pl_map_from_top_charts(D, D, {at_vertex(D, 0), at_vertex(D, 1)}, {Chart{D.cell(1, 0), {{1, 0}, {0, 1}}}});
}

}  // namespace

TEST_CASE("join examples on an edge") {
  CHECK(bary_close(simplex_join({1, 0}, {0, 1}), {0, 1}));
  CHECK(bary_close(simplex_join({0.5, 0.5}, {0, 1}), {0, 1}));
  CHECK(bary_close(simplex_join({0.5, 0.5}, {1, 0}), {0.5, 0.5}));
  CHECK(simplex_leq({1, 0}, {0.5, 0.5}));
  CHECK(simplex_leq({1, 0}, {0, 1}));
  CHECK_FALSE(simplex_leq({0.5, 0.5}, {1, 0}));
  CHECK(bary_close(simplex_meet({0.5, 0.5}, {0, 1}), {0.5, 0.5}));
}

TEST_CASE("the bilinear extension of max is not idempotent") {
  Bary x{0.5, 0.5};
  CHECK(bary_close(bilinear_join(x, x), {0.25, 0.75}));
  CHECK_FALSE(bary_close(bilinear_join(x, x), x));
  // it does agree on vertices
  CHECK(bary_close(bilinear_join({1, 0}, {0, 1}), {0, 1}));
}

TEST_CASE("join and meet satisfy the lattice laws") {
  std::mt19937 rng(11);
  for (int n = 1; n <= 3; ++n)
    for (int t = 0; t < 500; ++t) {
      Bary x = random_bary(n, rng), y = random_bary(n, rng), z = random_bary(n, rng);
      CHECK(bary_close(simplex_join(x, x), x));
      CHECK(bary_close(simplex_join(x, y), simplex_join(y, x)));
      CHECK(bary_close(simplex_join(simplex_join(x, y), z), simplex_join(x, simplex_join(y, z))));
      CHECK(bary_close(simplex_join(x, simplex_meet(x, y)), x));
      CHECK(bary_close(simplex_meet(x, simplex_join(x, y)), x));
      CHECK(simplex_leq(x, simplex_join(x, y)));
      CHECK(simplex_leq(simplex_meet(x, y), y));
      check_bary(simplex_join(x, y));
    }
}

TEST_CASE("min support vertex") {
  auto D = representable(Site::Delta, 2);
  CHECK(min_support_vertex(D, carrier(D, D.cell(2, 0), {0.2, 0.3, 0.5})) == 0);
  GeomPoint p = carrier(D, D.cell(2, 0), {0, 0.5, 0.5});
  CHECK(p.cell.dim == 1);
  CHECK(min_support_vertex(D, p) == 1);
  // monotone along the order
  std::mt19937 rng(5);
  for (int t = 0; t < 1000; ++t) {
    Bary x = random_bary(3, rng), y = simplex_join(x, random_bary(3, rng));
    CHECK(min_support_index(x) <= min_support_index(y));
  }
}

TEST_CASE("carrier of a point on a degenerate simplex") {
  auto D = representable(Site::Delta, 1);
  Cell deg = D.act(D.cell(1, 0), MonotoneMap{ordinal(2), ordinal(1), {0, 0, 1}});
  GeomPoint p = carrier(D, deg, {0.25, 0.25, 0.5});
  CHECK(p.cell == D.cell(1, 0));
  CHECK(bary_close(p.coords, {0.5, 0.5}));
}

TEST_CASE("midpoint positions of subdivided edges") {
  auto D = representable(Site::Delta, 1);
  auto sorted_tops = [](std::vector<Bary> pos) {
    std::vector<double> t;
    for (auto& b : pos) t.push_back(b[1]);
    std::sort(t.begin(), t.end());
    return t;
  };
  CHECK(sorted_tops(phi_positions(SdTower(D, 0))) == std::vector<double>{0, 1});
  CHECK(sorted_tops(phi_positions(SdTower(D, 1))) == std::vector<double>{0, 0.5, 1});
  CHECK(sorted_tops(phi_positions(SdTower(D, 2))) == std::vector<double>{0, 0.25, 0.5, 0.75, 1});
}

TEST_CASE("star condition") {
  auto D = representable(Site::Delta, 1);
  SECTION("a constant map is fine") {
    auto f = pl_map_from_top_charts(D, D, {at_vertex(D, 0), at_vertex(D, 0)}, {Chart{D.cell(1, 0), {{1, 0}, {1, 0}}}});
    REQUIRE_FALSE(check_pl_map(f));
    CHECK(star_condition(f).satisfied);
  }
  SECTION("the identity needs a subdivision") {
    auto f = identity_pl(D);
    REQUIRE_FALSE(check_pl_map(f));
    auto r = star_condition(f);
    CHECK_FALSE(r.satisfied);
    CHECK(r.witness[1][0] == -1);
    SdTower T(D, 2);
    auto g = subdivide_pl_map(f, T.step(1));
    g.source = &T.at(1);
    CHECK(star_condition(g).satisfied);
  }
}

TEST_CASE("order violations in charts are rejected") {
  auto D = representable(Site::Delta, 1);
  auto f = pl_map_from_top_charts(D, D, {at_vertex(D, 1), at_vertex(D, 0)}, {Chart{D.cell(1, 0), {{0, 1}, {1, 0}}}});
  CHECK(check_pl_map(f));
}

TEST_CASE("simplicial approximation of the identity of an edge") {
  auto D = representable(Site::Delta, 1);
  auto A = simplicial_approximation(identity_pl(D));
  REQUIRE(A.error.empty());
  CHECK(A.k == 1);
  CHECK(A.valid);
  CHECK(A.below_f);
  // each vertex of sd goes to the lowest vertex under it
  auto pos = phi_positions(*A.tower);
  for (int v = 0; v < A.tower->at(1).count(0); ++v) CHECK(A.psi.map[0][v].id == min_support_index(pos[v]));
  // and that is gamma
  auto gamma = sd_gamma(D, A.tower->step(1), false);
  CHECK(A.psi == gamma);
}

TEST_CASE("simplicial approximation of a constant") {
  auto D = representable(Site::Delta, 1);
  auto f = pl_map_from_top_charts(D, D, {at_vertex(D, 1), at_vertex(D, 1)}, {Chart{D.cell(1, 0), {{0, 1}, {0, 1}}}});
  auto A = simplicial_approximation(f);
  REQUIRE(A.valid);
  CHECK(A.k == 0);
  CHECK(A.psi.map[0][0].id == 1);
  CHECK(A.psi.map[0][1].id == 1);
  CHECK(A.psi.map[1][0].degenerate());
}

TEST_CASE("sampled paths through the triangulated annulus approximate into the same class") {
  auto Y = square_annulus();
  Extension tY = triangulate(Y.P);
  const Presheaf& X = tY.C.P;
  Qua Q = qua(X, 2);
  Embedding E = embed_triangulation(Y, tY);
  Complex I = interval(3);
  Extension tI = triangulate(I.P);
  const Presheaf& S = tI.C.P;
  std::vector<int> order(I.P.count(0));
  for (int v = 0; v < I.P.count(0); ++v) order[I.position[v][0]] = tI.C.incl[tI.piece_of[0][v]].map[0][0].id;
  Morphism eta = adjunction_unit(Y.P, tY, Q);
  Diagram B = pair_diagram(I.P, I.vertex_at({0}), I.vertex_at({8}));
  Diagram C = pair_diagram(Q.P(), eta.map[0][Y.vertex_at({0, 0})].id, eta.map[0][Y.vertex_at({3, 3})].id);
  auto G = homotopy_graph(B, C, pinned_ends());
  CHECK(G.class_count == 2);

  std::mt19937 rng(3);
  int done = 0;
  for (int t = 0; done < 3 && t < 40; ++t) {
    auto f = sample_pl_path(S, order, E, {0, 0}, {3, 3}, rng);
    if (!f) continue;
    REQUIRE_FALSE(check_pl_map(*f));
    auto A = simplicial_approximation(*f);
    REQUIRE(A.valid);
    auto w = nearest_vertex_path(E, *f, order);
    auto g = path_map(S, order, X, w);
    REQUIRE(g);
    auto cls = [&](const Morphism& h) {
      return G.klass.at(G.index_of({identity_morphism(points(2)), transpose_to_qua(I.P, tI, Q, h)}));
    };
    // sampled charts already meet the star condition, so no subdivision is needed
    REQUIRE(A.k == 0);
    CHECK(cls(A.psi) == cls(*g));
    ++done;
  }
  CHECK(done == 3);
}

TEST_CASE("cubical approximation of a constant") {
  auto A = representable(Site::Box, 1);
  Extension tA = triangulate(A);
  Qua Q = qua(tA.C.P, 2);
  const Presheaf& X = tA.C.P;
  auto constant = [&](const Presheaf&, const Presheaf& S) {
    PLVertexMap f{&S, &X, {}, {}};
    f.chart.resize(S.levels());
    for (int k = 0; k < S.levels(); ++k)
      for (int i = 0; i < S.count(k); ++i) f.chart[k].push_back(Chart{X.cell(0, 0), std::vector<Bary>(k + 1, Bary{1.0})});
    f.vertex_image.assign(S.count(0), at_vertex(X, 0));
    return f;
  };
  auto R = cubical_approximation(A, constant, Q);
  REQUIRE(R.error.empty());
  CHECK(R.valid);
  CHECK(R.k == 0);
  CHECK(R.psi.map[0][0] == R.psi.map[0][1]);
}

TEST_CASE("cubical approximation of the edge traversal") {
  auto A = representable(Site::Box, 1);
  Extension tA = triangulate(A);
  Qua Q = qua(tA.C.P, 2);
  const Presheaf& X = tA.C.P;
  int lo = tA.C.incl[tA.piece_of[0][0]].map[0][0].id, hi = tA.C.incl[tA.piece_of[0][1]].map[0][0].id;
  // vertex i of sd^k C at position i / 2^k along the edge
  auto traversal = [&](const Presheaf& Ck, const Presheaf& S) {
    auto pos = walk_positions(Ck);
    Extension tk = triangulate(Ck);
    double len = static_cast<double>(Ck.count(1));
    std::vector<double> at(S.count(0));
    for (int v = 0; v < Ck.count(0); ++v) at[tk.C.incl[tk.piece_of[0][v]].map[0][0].id] = pos[v][0] / len;
    auto bary = [&](double t) {
      Bary b(2);
      b[lo < hi ? 0 : 1] = 1 - t;
      b[lo < hi ? 1 : 0] = t;
      return b;
    };
    std::vector<GeomPoint> img;
    for (int v = 0; v < S.count(0); ++v) img.push_back(carrier(X, X.cell(1, 0), bary(at[v])));
    std::vector<Chart> top;
    for (int e = 0; e < S.count(1); ++e) {
      auto vs = S.vertices_of(S.cell(1, e));
      top.push_back(Chart{X.cell(1, 0), {bary(at[vs[0].id]), bary(at[vs[1].id])}});
    }
    auto f = pl_map_from_top_charts(S, X, img, top);
    for (int v = 0; v < S.count(0); ++v) f.chart[0][v] = Chart{img[v].cell, {img[v].coords}};
    return f;
  };
  auto R = cubical_approximation(A, traversal, Q);
  REQUIRE(R.error.empty());
  CHECK(R.valid);
  CHECK(R.k == 1);
  // both halves of the subdivided edge: one collapses to the start, the other runs the whole edge
  int nondegenerate = 0;
  for (auto& c : R.psi.map[1]) nondegenerate += !c.degenerate();
  CHECK(nondegenerate == 1);
}

TEST_CASE("approximation through ex into the arrow nerve") {
  auto A = representable(Site::Box, 1);
  Preorder P = preorder_of_shape(ordinal(1));
  auto sd = subdivide(A);
  auto pos = walk_positions(sd.P);
  SECTION("the edge traversal gives the nondegenerate edge") {
    std::vector<int> value(3);
    for (int v = 0; v < 3; ++v) value[v] = pos[v][0] == 0 ? 0 : 1;
    auto K = kan_approximation(A, P, value);
    REQUIRE(K.error.empty());
    CHECK(K.valid);
    CHECK(K.pipeline_checked);
    CHECK_FALSE(K.psi.map[1][0].degenerate());
  }
  SECTION("a constant gives a constant") {
    auto K = kan_approximation(A, P, {1, 1, 1});
    REQUIRE(K.valid);
    CHECK(K.psi.map[1][0].degenerate());
    CHECK(K.psi.map[0][0] == K.psi.map[0][1]);
  }
  SECTION("decreasing values are refused") {
    std::vector<int> value(3);
    for (int v = 0; v < 3; ++v) value[v] = pos[v][0] == 0 ? 1 : 0;
    CHECK_FALSE(kan_approximation(A, P, value).error.empty());
  }
}
