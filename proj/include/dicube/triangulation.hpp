#pragma once
// Nerves of cubes, triangulation of cubical sets, its right adjoint, and the comparison
// between subdividing before or after triangulating.

#include <dicube/subdivision.hpp>

#include <cmath>
#include <memory>
#include <set>

namespace dicube {

inline Presheaf nerve_simplicial(const Preorder& P, int max_dim = -1) {
  return nerve_simplicial_model(P, max_dim < 0 ? default_nerve_dim(P) : max_dim).P;
}

inline Presheaf nerve_cubical(const Preorder& P, int max_dim) { return nerve_cubical_model(P, max_dim).P; }

// n-cube |-> a nerve of the n-cube poset (simplicial, or cubical truncated at max_dim);
// monotone maps between cubes act by postcomposition.
class CubeNerveFunctor {
 public:
  CubeNerveFunctor(Site target, int max_dim)
      : target_(target),
        max_dim_(max_dim),
        cache_(SiteFunctor{Site::Box, [this](int n) { return model(n).P; },
                           [this](const MonotoneMap& f) { return on_map(f); }}) {}

  static CubeNerveFunctor& triangulation() {
    static CubeNerveFunctor f(Site::Delta, -1);
    return f;
  }

  static CubeNerveFunctor& cubical(int max_dim) {
    static std::mutex mu;
    static std::map<int, std::unique_ptr<CubeNerveFunctor>> all;
    std::lock_guard<std::mutex> lock(mu);
    auto& p = all[max_dim];
    if (!p) p = std::make_unique<CubeNerveFunctor>(Site::Box, max_dim);
    return *p;
  }

  const Model& model(int n) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = models_.find(n);
      if (it != models_.end()) return it->second;
    }
    Preorder P = preorder_of_shape(cube(n));
    Model M = target_ == Site::Delta ? nerve_simplicial_model(P, n) : nerve_cubical_model(P, max_dim_);
    std::lock_guard<std::mutex> lock(mu_);
    return models_.emplace(n, std::move(M)).first->second;
  }

  // The cell of the nerve with the given vertex values at any level; simplicial nerves of
  // posets normalize by merging repeated consecutive values.
  Cell cell(int n, const Key& values) {
    const Model& M = model(n);
    if (target_ == Site::Box) return M.find(static_cast<int>(std::log2(values.size())), values);
    Key base;
    std::vector<int> degen;
    for (int v : values) {
      if (base.empty() || base.back() != v) base.push_back(v);
      degen.push_back(static_cast<int>(base.size()) - 1);
    }
    Cell b = M.find(static_cast<int>(base.size()) - 1, base);
    return Cell{static_cast<int>(values.size()) - 1, b.dim, b.id, std::move(degen)};
  }

  // Any monotone map between cubes, not only box morphisms.
  Morphism on_map(const MonotoneMap& f) {
    const Model& src = model(static_cast<int>(f.dom.size()));
    const Model& tgt = model(static_cast<int>(f.cod.size()));
    Morphism g;
    g.map.resize(src.P.levels());
    for (int k = 0; k < src.P.levels(); ++k)
      for (auto& key : src.keys[k]) {
        Key out(key.size());
        for (std::size_t x = 0; x < key.size(); ++x) out[x] = f.table[key[x]];
        g.map[k].push_back(target_ == Site::Delta ? cell(static_cast<int>(f.cod.size()), out) : tgt.find(k, out));
      }
    return g;
  }

  FunctorCache& cache() { return cache_; }
  Site target() const { return target_; }

 private:
  Site target_;
  int max_dim_;
  std::mutex mu_;
  std::map<int, Model> models_;
  FunctorCache cache_;
};

inline Extension triangulate(const Presheaf& B) {
  if (B.site != Site::Box) throw std::invalid_argument("triangulate: cubical input required");
  return extend(B, CubeNerveFunctor::triangulation().cache());
}

inline Presheaf tri(const Presheaf& B) { return triangulate(B).C.P; }

inline Morphism tri_morphism(const Extension& src, const Extension& tgt, const Presheaf& B, const Morphism& g) {
  return extend_morphism(src, tgt, B, g, CubeNerveFunctor::triangulation().cache());
}

// ---- the right adjoint ------------------------------------------------------

inline Key morphism_key(const Morphism& g) {
  Key k;
  for (auto& lvl : g.map)
    for (auto& c : lvl) {
      Key ck = key_of(c);
      k.insert(k.end(), ck.begin(), ck.end());
    }
  return k;
}

inline Morphism morphism_from_key(const Key& key, const Presheaf& src) {
  Morphism g;
  g.map.resize(src.levels());
  std::size_t pos = 0;
  for (int k = 0; k < src.levels(); ++k)
    for (int i = 0; i < src.count(k); ++i) {
      std::size_t len = 3 + static_cast<std::size_t>(level_size(src.site, k));
      g.map[k].push_back(cell_of_key(Key(key.begin() + static_cast<long>(pos), key.begin() + static_cast<long>(pos + len))));
      pos += len;
    }
  return g;
}

// Cubical set whose n-cells are the simplicial maps tri box[n] -> X, truncated at max_dim.
struct Qua {
  const Presheaf* X = nullptr;
  int max_dim = 0;
  Model M;

  const Presheaf& P() const { return M.P; }
  static const Presheaf& cube_tri(int n) { return CubeNerveFunctor::triangulation().cache().object(n); }

  Morphism as_map(const Cell& c) const {
    const Key& key = M.keys[c.dim][c.id];
    Morphism g = morphism_from_key(key, cube_tri(c.dim));
    MonotoneMap s{cube(c.level), cube(c.dim), c.degen};
    return compose(g, CubeNerveFunctor::triangulation().cache().morphism(s));
  }
  Cell cell_for(const Morphism& g, int level) const { return M.find(level, morphism_key(g)); }
};

inline Qua qua(const Presheaf& X, int max_dim = 3, SearchBudget budget = {}) {
  if (X.site != Site::Delta) throw std::invalid_argument("qua: simplicial input required");
  auto& T = CubeNerveFunctor::triangulation().cache();
  Qua Q;
  Q.X = &X;
  Q.max_dim = max_dim;
  auto enum_cells = [&](int m) {
    std::vector<Key> out;
    const Presheaf& src = T.object(m);
    CellIndex XI(X, std::max(src.dim(), 0));
    for_each_morphism(src, X, XI, nullptr, [&](const Morphism& g) { out.push_back(morphism_key(g)); }, budget);
    return out;
  };
  auto act = [&](const Key& key, const MonotoneMap& f) {
    int m = static_cast<int>(f.cod.size());
    return morphism_key(compose(morphism_from_key(key, T.object(m)), T.morphism(f)));
  };
  Q.M = build_model(Site::Box, max_dim, enum_cells, act);
  return Q;
}

// qua of h: X -> Y, by postcomposition.
inline Morphism qua_morphism(const Qua& src, const Qua& tgt, const Morphism& h) {
  Morphism f;
  f.map.resize(src.P().levels());
  for (int k = 0; k < src.P().levels(); ++k)
    for (int i = 0; i < src.P().count(k); ++i) f.map[k].push_back(tgt.cell_for(compose(h, src.as_map(src.P().cell(k, i))), k));
  return f;
}

// Unit B -> qua tri B; Q must be built over the presheaf of triB.
inline Morphism adjunction_unit(const Presheaf& B, const Extension& triB, const Qua& Q) {
  Morphism eta;
  eta.map.resize(B.levels());
  for (int k = 0; k < B.levels(); ++k)
    for (int i = 0; i < B.count(k); ++i) eta.map[k].push_back(Q.cell_for(triB.C.incl[triB.piece_of[k][i]], k));
  return eta;
}

// Counit tri qua X -> X, where triQ is the triangulation of Q.P().
inline Morphism adjunction_counit(const Qua& Q, const Extension& triQ) {
  std::vector<Morphism> legs;
  for (auto [k, i] : triQ.piece_cell) legs.push_back(Q.as_map(Q.P().cell(k, i)));
  return induced_map(triQ.C, legs);
}

// ---- tri sd versus sd tri ---------------------------------------------------

struct SdTriComparison {
  Extension tri_sd;      // tri of sd B
  Subdivided sd_tri;     // sd of tri B
  Morphism alpha;        // tri sd B -> sd tri B
  bool iso = false;
  bool gamma_triangle = false;
  bool gamma_bar_triangle = false;

  bool ok() const { return iso && gamma_triangle && gamma_bar_triangle; }
};

// A chain tau in a subdivided cube, read through the cube's boxplus key psi, goes to the chain
// (gamma psi tau, gamma-bar psi tau) of double length in the original cube.
inline SdTriComparison sd_tri_comparison(const Presheaf& B) {
  SdTriComparison R;
  Subdivided sdB = subdivide(B);
  Extension triB = triangulate(B);
  R.tri_sd = triangulate(sdB.P);
  R.sd_tri = subdivide(triB.C.P);
  auto& sdF = CubicalSdFunctor::instance();
  auto& triF = CubeNerveFunctor::triangulation();

  std::vector<Morphism> legs;
  for (auto [m, y] : R.tri_sd.piece_cell) {
    auto [p, local] = sdB.ext->C.rep(m, y);
    auto [n, c] = sdB.ext->piece_cell[p];
    const Key& psi = sdF.model(n).keys[m][local];
    MonotoneMap lo = gamma_box(n, false), hi = gamma_box(n, true);
    const Model& chains = triF.model(m);
    Morphism leg;
    leg.map.resize(chains.P.levels());
    for (int k = 0; k < chains.P.levels(); ++k)
      for (auto& tau : chains.keys[k]) {
        Key doubled(2 * k + 2);
        for (int i = 0; i <= k; ++i) {
          doubled[i] = lo.table[psi[tau[i]]];
          doubled[k + 1 + i] = hi.table[psi[tau[i]]];
        }
        Cell in_piece = triF.cell(n, doubled);
        Cell in_triB = apply(triB.C.incl[triB.piece_of[n][c]], in_piece);
        leg.map[k].push_back(R.sd_tri.simplicial_cell(in_triB));
      }
    legs.push_back(std::move(leg));
  }
  R.alpha = induced_map(R.tri_sd.C, legs);
  R.iso = is_isomorphism(R.alpha, R.tri_sd.C.P, R.sd_tri.P);
  for (bool barred : {false, true}) {
    Morphism lhs = compose(sd_gamma(triB.C.P, R.sd_tri, barred), R.alpha);
    Morphism rhs = tri_morphism(R.tri_sd, triB, sdB.P, sd_gamma(B, sdB, barred));
    (barred ? R.gamma_bar_triangle : R.gamma_triangle) = lhs == rhs;
  }
  return R;
}

// ---- qua tri B against the glued cubical nerves ------------------------------

struct QtCheck {
  std::vector<int> colimit_counts, qua_counts;
  bool iso = false;
};

inline QtCheck qt_colimit_check(const Presheaf& B, int max_dim = 2) {
  QtCheck R;
  auto& nerF = CubeNerveFunctor::cubical(max_dim);
  Extension glued = extend(B, nerF.cache());
  Extension triB = triangulate(B);
  Qua Q = qua(triB.C.P, max_dim);
  auto& triF = CubeNerveFunctor::triangulation();
  std::vector<Morphism> legs;
  for (auto [n, c] : glued.piece_cell) {
    const Model& cells = nerF.model(n);
    Morphism leg;
    leg.map.resize(cells.P.levels());
    for (int k = 0; k < cells.P.levels(); ++k)
      for (auto& h : cells.keys[k]) {
        Morphism g = compose(triB.C.incl[triB.piece_of[n][c]], triF.on_map(MonotoneMap{cube(k), cube(n), h}));
        leg.map[k].push_back(Q.cell_for(g, k));
      }
    legs.push_back(std::move(leg));
  }
  Morphism phi = induced_map(glued.C, legs);
  R.colimit_counts = glued.C.P.counts();
  R.qua_counts = Q.P().counts();
  R.iso = is_isomorphism(phi, glued.C.P, Q.P());
  return R;
}

// ---- level preorders of nerves ----------------------------------------------

struct GraphNerveCheck {
  int level = 0;
  std::size_t related_pairs = 0;
  std::size_t arrow_cells = 0;
  bool bijective = false;
};

// Pairs sigma <= tau of n-simplices of ner P against n-simplices of the nerve of the arrow preorder.
inline GraphNerveCheck graph_nerve_check(const Preorder& P, int n) {
  GraphNerveCheck R;
  R.level = n;
  Model N = nerve_simplicial_model(P, n + 1);
  LevelPreorder L = preorder_on_level(N.P, n, n + 1);
  std::vector<std::pair<int, int>> pairs;
  Preorder A = arrow_preorder(P, &pairs);
  std::map<std::pair<int, int>, int> pair_id;
  for (int i = 0; i < static_cast<int>(pairs.size()); ++i) pair_id[pairs[i]] = i;
  auto values = [&](const Cell& c) {
    Key out(n + 1);
    const Key& k = N.keys[c.dim][c.id];
    for (int i = 0; i <= n; ++i) out[i] = k[c.degen[i]];
    return out;
  };
  std::set<Key> from_pairs;
  int cnt = static_cast<int>(L.cells.size());
  for (int a = 0; a < cnt; ++a)
    for (int b = 0; b < cnt; ++b)
      if (L.leq(a, b)) {
        ++R.related_pairs;
        Key sa = values(L.cells[a]), sb = values(L.cells[b]);
        Key t(n + 1);
        for (int i = 0; i <= n; ++i) {
          auto it = pair_id.find({sa[i], sb[i]});
          t[i] = it == pair_id.end() ? -1 : it->second;
        }
        from_pairs.insert(t);
      }
  auto arrows = monotone_maps_into(ordinal(n), A);
  R.arrow_cells = arrows.size();
  std::set<Key> expected(arrows.begin(), arrows.end());
  R.bijective = from_pairs.size() == R.related_pairs && from_pairs == expected;
  return R;
}

}  // namespace dicube
