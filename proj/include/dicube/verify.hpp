#pragma once
// Exhaustive property checks over a small corpus.  Every case is pass/fail; a failure is a
// defect somewhere in the library.

#include <dicube/approximation.hpp>

#include <chrono>
#include <functional>

namespace dicube {

struct CaseResult {
  std::string suite;
  std::string fixture;
  std::string check;
  bool pass = false;
  std::string detail;
};

struct VerifyReport {
  std::vector<CaseResult> cases;
  double seconds = 0;

  int failures() const {
    return static_cast<int>(std::count_if(cases.begin(), cases.end(), [](const CaseResult& c) { return !c.pass; }));
  }
  bool ok() const { return failures() == 0; }
};

// ---- corpus -------------------------------------------------------------------

struct NamedPresheaf {
  std::string name;
  Presheaf P;
};

inline std::vector<NamedPresheaf> cubical_fixtures(bool with_annulus = true) {
  std::vector<NamedPresheaf> out{{"box[0]", representable(Site::Box, 0)},
                                 {"box[1]", representable(Site::Box, 1)},
                                 {"box[2]", representable(Site::Box, 2)},
                                 {"path(2)", path_complex(2).P}};
  if (with_annulus) out.push_back({"square_annulus", square_annulus().P});
  return out;
}

// Preorders on n points, one per isomorphism class, in a fixed order.
inline std::vector<Preorder> preorders_up_to_iso(int n) {
  std::vector<std::pair<int, int>> off;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b) off.emplace_back(a, b);
  std::vector<int> perm(n);
  std::set<std::vector<char>> seen;
  std::vector<Preorder> out;
  for (unsigned long mask = 0; mask < (1UL << off.size()); ++mask) {
    Preorder p = discrete_preorder(n);
    for (std::size_t t = 0; t < off.size(); ++t)
      if (mask >> t & 1) p.rel[off[t].first * n + off[t].second] = 1;
    if (!is_preorder(p)) continue;
    std::vector<char> best;
    std::iota(perm.begin(), perm.end(), 0);
    do {
      std::vector<char> r(p.rel.size());
      for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) r[perm[a] * n + perm[b]] = p.rel[a * n + b];
      if (best.empty() || r < best) best = r;
    } while (std::next_permutation(perm.begin(), perm.end()));
    if (seen.insert(best).second) {
      p.rel = best;
      out.push_back(p);
    }
  }
  return out;
}

inline std::string preorder_label(const Preorder& p) {
  std::string s = std::to_string(p.n) + ":";
  for (int a = 0; a < p.n; ++a)
    for (int b = 0; b < p.n; ++b)
      if (a != b && p.leq(a, b)) s += std::to_string(a) + "<" + std::to_string(b) + ",";
  if (s.back() == ',') s.pop_back();
  return s;
}

// ---- ex on representables against the cubical nerve -------------------------------

struct ExRepresentableCheck {
  std::vector<int> ex_counts, nerve_counts;
  bool iso = false;
  bool stable = false;
};

// ex box[n] -> ner box[n] sends (L, psi, g) to the vertex values of psi o g.
inline ExRepresentableCheck ex_representable_check(int n, CoendBudget budget) {
  ExRepresentableCheck R;
  Model C = representable_model(Site::Box, n);
  PresheafExSource src(C.P);
  Ex E(src, budget);
  Model N = nerve_cubical_model(preorder_of_shape(cube(n)), budget.max_dim);
  Morphism cmp;
  cmp.map.resize(E.P().levels());
  for (int k = 0; k < E.P().levels(); ++k)
    for (int i = 0; i < E.P().count(k); ++i) {
      const ExElement& e = E.representative(E.P().cell(k, i));
      auto vs = src.vertices(e.L, e.psi);
      Key values(e.g.size());
      for (std::size_t x = 0; x < e.g.size(); ++x) values[x] = C.keys[0][vs[e.g[x]]][0];
      cmp.map[k].push_back(N.find(k, values));
    }
  R.ex_counts = E.P().counts();
  R.nerve_counts = N.P.counts();
  R.iso = !check_morphism(cmp, E.P(), N.P) && is_isomorphism(cmp, E.P(), N.P);
  R.stable = ex_stability(src, budget).stable;
  return R;
}

// Natural families box[n] -> ex box[n] (n <= max_n) agreeing with upsilon on vertices.
inline std::size_t upsilon_competitors(int max_n, CoendBudget budget) {
  std::vector<Model> reps;
  std::vector<std::unique_ptr<PresheafExSource>> srcs;
  std::vector<std::unique_ptr<Ex>> exs;
  std::vector<std::vector<Morphism>> cands(max_n + 1);
  for (int n = 0; n <= max_n; ++n) reps.push_back(representable_model(Site::Box, n));
  for (int n = 0; n <= max_n; ++n) {
    srcs.push_back(std::make_unique<PresheafExSource>(reps[n].P));
    exs.push_back(std::make_unique<Ex>(*srcs[n], budget));
    Morphism u = upsilon(reps[n].P, *srcs[n], *exs[n]);
    PartialMap pins = empty_partial(reps[n].P);
    for (int v = 0; v < reps[n].P.count(0); ++v) pins[0][v] = u.map[0][v];
    cands[n] = enumerate_morphisms(reps[n].P, exs[n]->P(), &pins);
  }
  // a family is natural iff it commutes with the face inclusions box[n-1] -> box[n]
  std::function<std::size_t(int, std::vector<int>&)> count = [&](int n, std::vector<int>& pick) -> std::size_t {
    if (n > max_n) return 1;
    std::size_t total = 0;
    for (int c = 0; c < static_cast<int>(cands[n].size()); ++c) {
      bool ok = true;
      if (n > 0)
        for (int j = 0; j < 2 * n && ok; ++j) {
          Morphism delta;
          delta.map.resize(reps[n - 1].P.levels());
          for (int k = 0; k < reps[n - 1].P.levels(); ++k)
            for (auto& key : reps[n - 1].keys[k])
              delta.map[k].push_back(reps[n].P.act(reps[n].P.cell(n, 0),
                                                   compose(face_map(Site::Box, n, j), MonotoneMap{cube(k), cube(n - 1), key})));
          Morphism exd = ex_morphism(*exs[n - 1], *srcs[n - 1], *exs[n], *srcs[n], delta);
          Morphism a = compose(exd, cands[n - 1][pick[n - 1]]);
          Morphism b = compose(cands[n][c], delta);
          ok = a == b;
        }
      if (!ok) continue;
      pick[n] = c;
      total += count(n + 1, pick);
    }
    return total;
  };
  std::vector<int> pick(max_n + 1, 0);
  return count(0, pick);
}

// Shrinks the budget until the coend has at most `cap` elements per level: words first, then
// dimensions, keeping words at least as long as the top dimension.  Nerves of preorders with
// big equivalence classes blow up otherwise.
template <class Source>
CoendBudget affordable_budget(Source& src, CoendBudget budget, std::size_t cap = 2000000) {
  auto worst = [&] {
    std::size_t w = 0;
    for (int m = 0; m <= budget.max_dim; ++m) {
      std::size_t elems = 0;
      for (auto& L : boxplus_words(budget.max_word_length))
        elems += static_cast<std::size_t>(src.count(L)) * monotone_maps_into(cube(m), preorder_of_shape(L)).size();
      w = std::max(w, elems);
    }
    return w;
  };
  while (worst() > cap) {
    if (budget.max_word_length > std::max(budget.max_dim, 1)) --budget.max_word_length;
    else if (budget.max_dim > 1) --budget.max_dim;
    else break;
  }
  return budget;
}

// ---- suites -----------------------------------------------------------------------

inline const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"sd_fold",    "cd_fold",       "star_collapse", "sd_cd_tri",
                                              "qt",         "graph_nerves",  "convex_nerves", "cx_unit"};
  return names;
}

namespace detail {

inline void add(VerifyReport& R, std::string suite, std::string fixture, std::string check, bool pass, std::string detail = {}) {
  R.cases.push_back({std::move(suite), std::move(fixture), std::move(check), pass, std::move(detail)});
}

inline std::string counts_string(const std::vector<int>& c) {
  std::string s;
  for (std::size_t i = 0; i < c.size(); ++i) s += (i ? "/" : "") + std::to_string(c[i]);
  return s;
}

inline void fold_suite(VerifyReport& R, const std::string& suite, const std::vector<NamedPresheaf>& corpus) {
  for (auto& [name, C] : corpus) {
    SdTower T(C, 2);
    Morphism gg = fold_gamma(T);
    const Presheaf& S2 = T.at(2);
    int bad = 0, total = 0;
    std::string first;
    for (int k = 0; k < S2.levels(); ++k)
      for (int i = 0; i < S2.count(k); ++i) {
        ++total;
        FoldResult F = fold_atomic(T, gg, atomic_hull(S2, k, i));
        if (!F.ok()) {
          if (!bad++) first = "cell " + std::to_string(k) + ":" + std::to_string(i);
          continue;
        }
      }
    add(R, suite, name, "minimal support, unique retraction, square, representable core", bad == 0,
        std::to_string(total - bad) + "/" + std::to_string(total) + " atomic" + (bad ? ", first failure " + first : ""));
  }
}

inline void star_suite(VerifyReport& R, const std::vector<NamedPresheaf>& corpus) {
  for (auto& [name, C] : corpus) {
    SdTower T(C, 2);
    Morphism gg = fold_gamma(T);
    int bad = 0;
    for (int v = 0; v < T.at(2).count(0); ++v) bad += !star_collapse_check(T, gg, v).holds;
    add(R, "star_collapse", name, "star image inside support", bad == 0,
        std::to_string(T.at(2).count(0) - bad) + "/" + std::to_string(T.at(2).count(0)) + " vertices");
  }
}

inline void cx_unit_suite(VerifyReport& R, CoendBudget budget) {
  // naturality of upsilon and zeta on every map between the small representables
  std::vector<NamedPresheaf> objs{{"box[0]", representable(Site::Box, 0)},
                                  {"box[1]", representable(Site::Box, 1)},
                                  {"box[2]", representable(Site::Box, 2)}};
  std::size_t n = objs.size();
  std::vector<Subdivided> sds;
  std::vector<std::unique_ptr<PresheafExSource>> src, sd_src;
  std::vector<std::unique_ptr<Ex>> ex, sd_ex;
  std::vector<Morphism> ups, zs;
  for (auto& o : objs) sds.push_back(subdivide(o.P));
  for (std::size_t i = 0; i < n; ++i) {
    src.push_back(std::make_unique<PresheafExSource>(objs[i].P));
    ex.push_back(std::make_unique<Ex>(*src[i], budget));
    ups.push_back(upsilon(objs[i].P, *src[i], *ex[i]));
    sd_src.push_back(std::make_unique<PresheafExSource>(sds[i].P));
    sd_ex.push_back(std::make_unique<Ex>(*sd_src[i], budget));
    zs.push_back(zeta(objs[i].P, sds[i], *sd_src[i], *sd_ex[i]));
  }
  auto trunc = [](Morphism m, std::size_t levels) {
    m.map.resize(std::min(m.map.size(), levels));
    return m;
  };
  int maps = 0, bad_u = 0, bad_z = 0;
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b)
      for (auto& h : enumerate_morphisms(objs[a].P, objs[b].P)) {
        ++maps;
        std::size_t lv = ups[a].map.size();
        Morphism exh = ex_morphism(*ex[a], *src[a], *ex[b], *src[b], h);
        if (compose(exh, ups[a]) != trunc(compose(ups[b], trunc(h, lv)), lv)) ++bad_u;
        Morphism sdh = subdivide_morphism(objs[a].P, sds[a], sds[b], h);
        Morphism exsdh = ex_morphism(*sd_ex[a], *sd_src[a], *sd_ex[b], *sd_src[b], sdh);
        if (compose(exsdh, zs[a]) != trunc(compose(zs[b], trunc(h, lv)), lv)) ++bad_z;
      }
  add(R, "cx_unit", "box[0..2]", "upsilon natural", bad_u == 0, std::to_string(maps - bad_u) + "/" + std::to_string(maps) + " maps");
  add(R, "cx_unit", "box[0..2]", "zeta natural", bad_z == 0, std::to_string(maps - bad_z) + "/" + std::to_string(maps) + " maps");

  std::size_t fam = upsilon_competitors(2, budget);
  add(R, "cx_unit", "box[0..2]", "upsilon unique given vertices", fam == 1, std::to_string(fam) + " natural families");

  int total = 0, bad = 0, min_dim = budget.max_dim;
  std::string first;
  for (int pts = 1; pts <= 4; ++pts)
    for (auto& P : preorders_up_to_iso(pts)) {
      ++total;
      NerveExSource s(P);
      CoendBudget b = affordable_budget(s, budget);
      min_dim = std::min(min_dim, b.max_dim);
      Model N = nerve_cubical_model(P, b.max_dim);
      Ex E(s, b);
      Morphism u = upsilon_nerve(N, s, E);
      Morphism mu = nerve_composition(N, s, E);
      bool ok = !check_morphism(u, N.P, E.P()) && !check_morphism(mu, E.P(), N.P) && compose(mu, u) == identity_morphism(N.P);
      if (!ok && !bad++) first = preorder_label(P);
    }
  add(R, "cx_unit", "preorders <= 4 points", "composition retracts upsilon", bad == 0,
      std::to_string(total - bad) + "/" + std::to_string(total) + " preorders, dimensions down to " + std::to_string(min_dim) +
          (bad ? ", first failure " + first : ""));
}

}  // namespace detail

inline VerifyReport verify(const std::string& suite, CoendBudget budget = {}) {
  auto t0 = std::chrono::steady_clock::now();
  VerifyReport R;
  bool all = suite == "all";
  if (!all && std::find(suite_names().begin(), suite_names().end(), suite) == suite_names().end())
    throw std::invalid_argument("unknown suite: " + suite);
  auto want = [&](const char* s) { return all || suite == s; };

  if (want("sd_fold"))
    detail::fold_suite(R, "sd_fold", {{"delta[0]", representable(Site::Delta, 0)}, {"delta[1]", representable(Site::Delta, 1)}});
  if (want("cd_fold"))
    detail::fold_suite(R, "cd_fold",
                       {{"box[1]", representable(Site::Box, 1)}, {"box[2]", representable(Site::Box, 2)}, {"square_annulus", square_annulus().P}});
  if (want("star_collapse"))
    detail::star_suite(R, {{"box[1]", representable(Site::Box, 1)}, {"box[2]", representable(Site::Box, 2)}, {"square_annulus", square_annulus().P}});
  if (want("sd_cd_tri"))
    for (auto& [name, B] : cubical_fixtures()) {
      SdTriComparison c = sd_tri_comparison(B);
      detail::add(R, "sd_cd_tri", name, "iso with both gamma triangles", c.ok(),
                  std::string("iso ") + (c.iso ? "yes" : "no") + ", gamma " + (c.gamma_triangle ? "yes" : "no") + ", gamma-bar " +
                      (c.gamma_bar_triangle ? "yes" : "no"));
    }
  if (want("qt"))
    for (auto& [name, B] : cubical_fixtures()) {
      if (B.dim() == 0) continue;
      QtCheck q = qt_colimit_check(B, 2);
      detail::add(R, "qt", name, "qua tri matches glued nerves", q.iso,
                  "counts " + detail::counts_string(q.qua_counts) + " vs " + detail::counts_string(q.colimit_counts));
    }
  if (want("graph_nerves"))
    for (int pts = 1; pts <= 3; ++pts)
      for (auto& P : preorders_up_to_iso(pts))
        for (int n = 0; n <= 2; ++n) {
          GraphNerveCheck g = graph_nerve_check(P, n);
          detail::add(R, "graph_nerves", preorder_label(P), "level " + std::to_string(n) + " bijection", g.bijective,
                      std::to_string(g.related_pairs) + " pairs, " + std::to_string(g.arrow_cells) + " cells");
        }
  if (want("convex_nerves")) {
    std::vector<std::pair<std::string, Preorder>> lats{{"[0]", preorder_of_shape(ordinal(0))},
                                                       {"[1]", preorder_of_shape(ordinal(1))},
                                                       {"[2]", preorder_of_shape(ordinal(2))},
                                                       {"box[2]", preorder_of_shape(cube(2))}};
    for (auto& [name, P] : lats) {
      ConvexNerveWitness w = convex_nerve_check(P);
      detail::add(R, "convex_nerves", name, "projections joined through the meet", w.ok());
    }
  }
  if (want("cx_unit")) detail::cx_unit_suite(R, budget);
  R.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return R;
}

}  // namespace dicube
