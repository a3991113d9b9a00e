#pragma once
// Edgewise subdivision (simplicial), cubical subdivision, the last-vertex style maps
// back to the original, supports, and folding of atomic pieces of double subdivisions.

#include <dicube/construct.hpp>

#include <deque>

namespace dicube {

// Degenerate levels kept in lookup tables of representable models.
inline constexpr int kStoredDegenerateLevels = 5;

// Subdivided representables box[[2]^n] with the maps induced by subdividing box morphisms.
class CubicalSdFunctor {
 public:
  static CubicalSdFunctor& instance() {
    static CubicalSdFunctor f;
    return f;
  }

  const Model& model(int n) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = models_.find(n);
      if (it != models_.end()) return it->second;
    }
    Model M = boxplus_representable_model(sdf_object(cube(n)), std::max(kDefaultBoxPlusCap, n), kStoredDegenerateLevels);
    std::lock_guard<std::mutex> lock(mu_);
    return models_.emplace(n, std::move(M)).first->second;
  }

  FunctorCache& cache() { return cache_; }

 private:
  CubicalSdFunctor()
      : cache_(SiteFunctor{Site::Box, [this](int n) { return model(n).P; },
                           [this](const MonotoneMap& f) { return on_map(f); }}) {}

  Morphism on_map(const MonotoneMap& f) {
    int m = static_cast<int>(f.dom.size()), n = static_cast<int>(f.cod.size());
    const Model& src = model(m);
    const Model& tgt = model(n);
    MonotoneMap sf = sdf_morphism(f);
    Morphism g;
    g.map.resize(src.P.levels());
    for (int k = 0; k < src.P.levels(); ++k)
      for (auto& key : src.keys[k]) g.map[k].push_back(tgt.find(k, precompose(sf.table, MonotoneMap{cube(k), sf.dom, key})));
    return g;
  }

  std::mutex mu_;
  std::map<int, Model> models_;
  FunctorCache cache_;
};

// sd of a simplicial or cubical set, with what is needed to map back and compute supports.
struct Subdivided {
  Site site = Site::Box;
  Presheaf P;
  std::optional<Extension> ext;                   // cubical: gluing of subdivided cubes
  std::vector<std::vector<Cell>> simplicial_key;  // simplicial: the cell of B at level 2m+1
  std::vector<std::unordered_map<Key, Cell, KeyHash>> simplicial_index;

  // the cell of sd B given by a cell of B at level 2m+1
  const Cell& simplicial_cell(const Cell& c) const { return simplicial_index.at((c.level - 1) / 2).at(key_of(c)); }
};

inline Subdivided subdivide(const Presheaf& B) {
  Subdivided S;
  S.site = B.site;
  if (B.site == Site::Box) {
    S.ext = extend(B, CubicalSdFunctor::instance().cache());
    S.P = S.ext->P();
    return S;
  }
  auto act = [&](const Key& key, const MonotoneMap& f) {
    Cell c = cell_of_key(key);
    return key_of(B.act(c, ordinal_sum(f, f)));
  };
  auto enum_cells = [&](int m) {
    std::vector<Key> out;
    for (auto& c : B.cells_at(2 * m + 1)) out.push_back(key_of(c));
    return out;
  };
  Model M = build_model(Site::Delta, std::max(B.dim(), 0), enum_cells, act);
  S.P = std::move(M.P);
  S.simplicial_key.resize(S.P.levels());
  for (int k = 0; k < S.P.levels(); ++k)
    for (auto& key : M.keys[k]) S.simplicial_key[k].push_back(cell_of_key(key));
  S.simplicial_index = std::move(M.cell_of);
  return S;
}

// sd of a morphism g: B -> B2.
inline Morphism subdivide_morphism(const Presheaf& B, const Subdivided& S, const Subdivided& S2, const Morphism& g) {
  if (S.site == Site::Box)
    return extend_morphism(*S.ext, *S2.ext, B, g, CubicalSdFunctor::instance().cache());
  Morphism h;
  h.map.resize(S.P.levels());
  for (int k = 0; k < S.P.levels(); ++k)
    for (int i = 0; i < S.P.count(k); ++i) h.map[k].push_back(S2.simplicial_cell(apply(g, S.simplicial_key[k][i])));
  return h;
}

// gamma (or gamma-bar when barred): sd B -> B.
inline Morphism sd_gamma(const Presheaf& B, const Subdivided& S, bool barred) {
  if (S.site == Site::Delta) {
    Morphism g;
    g.map.resize(S.P.levels());
    for (int k = 0; k < S.P.levels(); ++k)
      for (auto& c : S.simplicial_key[k]) g.map[k].push_back(B.act(c, gamma_delta(k, barred)));
    return g;
  }
  auto& sd = CubicalSdFunctor::instance();
  std::vector<Morphism> legs;
  for (auto [n, id] : S.ext->piece_cell) {
    const Model& M = sd.model(n);
    MonotoneMap gb = gamma_box(n, barred);
    Morphism leg;
    leg.map.resize(M.P.levels());
    for (int k = 0; k < M.P.levels(); ++k)
      for (auto& key : M.keys[k])
        leg.map[k].push_back(B.act(B.cell(n, id), compose(gb, MonotoneMap{cube(k), gb.dom, key})));
    legs.push_back(std::move(leg));
  }
  return induced_map(S.ext->C, legs);
}

// Smallest b'' of B with a contained in sd b''.
inline Sub sd_support(const Presheaf& B, const Subdivided& S, const Sub& a) {
  if (S.site == Site::Box) return extension_support(B, *S.ext, a);
  Sub out = empty_sub(B);
  for (int k = 0; k < static_cast<int>(a.size()); ++k)
    for (int i = 0; i < static_cast<int>(a[k].size()); ++i)
      if (a[k][i]) {
        const Cell& c = S.simplicial_key[k][i];
        out = sub_union(out, atomic_hull(B, c.dim, c.id));
      }
  return out;
}

// Iterated subdivisions sd^0 B = B, sd^1 B, ...
class SdTower {
 public:
  SdTower(const Presheaf& B, int k) : base_(B) {
    for (int j = 0; j < k; ++j) levels_.push_back(subdivide(j == 0 ? base_ : levels_.back().P));
  }
  int depth() const { return static_cast<int>(levels_.size()); }
  const Presheaf& at(int j) const { return j == 0 ? base_ : levels_[j - 1].P; }
  const Subdivided& step(int j) const { return levels_[j - 1]; }  // sd^j B as sd of sd^{j-1} B

  // word[0] applied outermost: word = (w1,...,wk) gives (w1)_B o (w2)_{sd B} o ... : sd^k B -> B
  Morphism gamma_word(const std::vector<bool>& barred) const {
    int k = static_cast<int>(barred.size());
    Morphism f = identity_morphism(at(k));
    for (int j = k; j >= 1; --j) f = compose(sd_gamma(at(j - 1), step(j), barred[j - 1]), f);
    return f;
  }

  // Support in B of a subpresheaf of sd^j B.
  Sub support(int j, Sub a) const {
    for (int t = j; t >= 1; --t) a = sd_support(at(t - 1), step(t), a);
    return a;
  }

 private:
  Presheaf base_;
  std::deque<Subdivided> levels_;
};

// sd^j of a morphism between the bases of two towers.
inline Morphism tower_morphism(const SdTower& src, const SdTower& tgt, const Morphism& g, int j) {
  Morphism f = g;
  for (int t = 1; t <= j; ++t) f = subdivide_morphism(src.at(t - 1), src.step(t), tgt.step(t), f);
  return f;
}

// ---- folding ----------------------------------------------------------------

// The Yoneda map from the representable of the generator's dimension, and whether it is an iso.
inline bool is_representable(const Presheaf& P) {
  auto g = atomic_generator(P, full_sub(P));
  if (!g) return false;
  Model R = representable_model(P.site, g->first);
  Morphism y;
  y.map.resize(R.P.levels());
  for (int k = 0; k < R.P.levels(); ++k)
    for (auto& key : R.keys[k])
      y.map[k].push_back(P.act(P.cell(g->first, g->second), MonotoneMap{level_shape(P.site, k), level_shape(P.site, g->first), key}));
  return is_isomorphism(y, R.P, P);
}

struct FoldResult {
  Sub B;                   // minimal subpresheaf of C
  Sub core;                // A meet sd^2 B, inside sd^2 C
  SubPresheaf A_part, core_part;
  Morphism retraction;     // A_part.P -> core_part.P
  bool minimal_unique = false;
  bool retraction_unique = false;
  bool square_commutes = false;
  bool core_representable = false;
  std::size_t retraction_candidates = 0;

  bool ok() const { return minimal_unique && retraction_unique && square_commutes && core_representable; }
};

// The combined gamma/gamma-bar map sd^2 C -> C used when folding atomic pieces.
inline Morphism fold_gamma(const SdTower& T) { return T.gamma_word({false, true}); }

inline FoldResult fold_atomic(const SdTower& T, const Morphism& gg, const Sub& A) {
  const Presheaf& S2 = T.at(2);
  if (!atomic_generator(S2, A)) throw std::invalid_argument("fold_atomic: A is not atomic");
  FoldResult R;
  std::vector<Sub> supports;
  for (int i = 0; i < S2.count(0); ++i)
    if (A[0][i]) supports.push_back(T.support(2, atomic_hull(S2, 0, i)));
  for (auto& s : supports) {
    bool below_all = std::all_of(supports.begin(), supports.end(), [&](const Sub& t) { return sub_leq(s, t); });
    if (below_all) {
      R.B = s;
      R.minimal_unique = true;
      break;
    }
  }
  if (!R.minimal_unique) return R;

  R.core = empty_sub(S2);
  for (int k = 0; k < S2.levels(); ++k)
    for (int i = 0; i < S2.count(k); ++i)
      if (A[k][i] && sub_leq(T.support(2, atomic_hull(S2, k, i)), R.B)) R.core[k][i] = 1;
  R.A_part = as_presheaf(S2, A);
  R.core_part = as_presheaf(S2, R.core);
  R.core_representable = is_representable(R.core_part.P);

  // retractions fixing the core, filtered by the square over C
  PartialMap pins = empty_partial(R.A_part.P);
  for (int k = 0; k < S2.levels(); ++k)
    for (int i = 0; i < S2.count(k); ++i)
      if (R.core[k][i]) pins[k][R.A_part.to_sub[k][i]] = R.core_part.P.cell(k, R.core_part.to_sub[k][i]);
  Morphism left = compose(gg, R.A_part.incl);
  Morphism via = compose(gg, R.core_part.incl);
  std::vector<Morphism> good;
  for (auto& pi : enumerate_morphisms(R.A_part.P, R.core_part.P, &pins)) {
    ++R.retraction_candidates;
    if (compose(via, pi) == left) good.push_back(pi);
  }
  R.square_commutes = !good.empty();
  R.retraction_unique = good.size() == 1;
  if (!good.empty()) R.retraction = good.front();
  return R;
}

// Star of a vertex of sd^2 C pushed down to C must sit inside the vertex's support.
struct StarCollapse {
  Sub star_image;
  Sub support;
  bool holds = false;
};

inline StarCollapse star_collapse_check(const SdTower& T, const Morphism& gg, int vertex) {
  const Presheaf& S2 = T.at(2);
  StarCollapse r;
  Sub v = atomic_hull(S2, 0, vertex);
  r.star_image = image(gg, T.at(0), star(S2, v));
  r.support = T.support(2, v);
  r.holds = sub_leq(r.star_image, r.support);
  return r;
}

// The map between folded cores induced by alpha: A1 -> A2 lying over sd^2 psi.
struct NaturalFold {
  Morphism map;  // core1 -> core2
  bool commutes = false;
};

inline NaturalFold natural_fold(const FoldResult& F1, const FoldResult& F2, const Morphism& alpha) {
  NaturalFold r;
  // core1 -> A1 -> A2 -> core2
  Morphism core_in_A1;
  core_in_A1.map.resize(F1.core_part.P.levels());
  for (int k = 0; k < F1.core_part.P.levels(); ++k)
    for (int i = 0; i < F1.core_part.P.count(k); ++i) {
      const Cell& up = F1.core_part.incl.map[k][i];
      core_in_A1.map[k].push_back(F1.A_part.P.cell(k, F1.A_part.to_sub[up.dim][up.id]));
    }
  r.map = compose(F2.retraction, compose(alpha, core_in_A1));
  r.commutes = compose(r.map, F1.retraction) == compose(F2.retraction, alpha);
  return r;
}

}  // namespace dicube
