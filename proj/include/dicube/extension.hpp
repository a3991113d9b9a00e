#pragma once
// The extension ex C: a coend over boxplus words of maps box[L] -> C paired with monotone
// maps from cubes into L, evaluated over words of bounded length.
//
// Every element (L, psi, g) is equivalent to one where g hits every value of every factor
// (restrict psi to the sub-box spanned by g).  On such normal elements the relation is
// generated by elementary surjections v: L -> L'' that psi factors through.

#include <dicube/triangulation.hpp>

namespace dicube {

struct CoendBudget {
  int max_word_length = 2;
  int max_dim = 2;
};

// Maps box[L] -> C, indexed per word, with restriction along boxplus maps.
class ExSource {
 public:
  virtual ~ExSource() = default;
  virtual int count(const Shape& L) = 0;
  // index of psi o box[u] for u: L' -> L
  virtual int restrict(const Shape& L, int psi, const MonotoneMap& u) = 0;
  // vertex values of psi, as indices of vertices of C
  virtual std::vector<int> vertices(const Shape& L, int psi) = 0;
};

namespace detail {
inline Morphism boxplus_postcompose(const Model& from, const Model& to, const MonotoneMap& u) {
  Morphism m;
  m.map.resize(from.P.levels());
  for (int k = 0; k < from.P.levels(); ++k)
    for (auto& key : from.keys[k]) {
      Key out(key.size());
      for (std::size_t x = 0; x < key.size(); ++x) out[x] = u.table[key[x]];
      m.map[k].push_back(to.find(k, out));
    }
  return m;
}

inline const Model& boxplus_rep(const Shape& L) {
  return memo<Shape, Model>(L, [&] { 
    int len = static_cast<int>(L.size());
    return boxplus_representable_model(L, std::max(kDefaultBoxPlusCap, len + 1), std::max(kStoredDegenerateLevels, len + 1));
  });
}
}  // namespace detail

// Any finite cubical set stored through the needed dimension.
class PresheafExSource : public ExSource {
 public:
  explicit PresheafExSource(const Presheaf& C, SearchBudget budget = {}) : C_(C), budget_(budget) {}

  const std::vector<Morphism>& maps(const Shape& L) { return table(L).maps; }

  int count(const Shape& L) override { return static_cast<int>(table(L).maps.size()); }

  int index_of(const Shape& L, const Morphism& psi) { return table(L).index.at(morphism_key(psi)); }

  int restrict(const Shape& L, int psi, const MonotoneMap& u) override {
    auto ck = std::make_tuple(L, psi, u.table, u.dom);
    auto it = restrict_cache_.find(ck);
    if (it != restrict_cache_.end()) return it->second;
    const Model& from = detail::boxplus_rep(u.dom);
    const Model& to = detail::boxplus_rep(L);
    Morphism r = compose(table(L).maps[psi], detail::boxplus_postcompose(from, to, u));
    int idx = index_of(u.dom, r);
    restrict_cache_.emplace(ck, idx);
    return idx;
  }

  std::vector<int> vertices(const Shape& L, int psi) override {
    const Model& R = detail::boxplus_rep(L);
    std::vector<int> out(shape_size(L));
    for (int i = 0; i < R.P.count(0); ++i) out[R.keys[0][i][0]] = table(L).maps[psi].map[0][i].id;
    return out;
  }

  const Presheaf& presheaf() const { return C_; }

 private:
  struct Table {
    std::vector<Morphism> maps;
    std::unordered_map<Key, int, KeyHash> index;
  };
  Table& table(const Shape& L) {
    auto it = tables_.find(L);
    if (it != tables_.end()) return it->second;
    Table t;
    const Model& R = detail::boxplus_rep(L);
    t.maps = enumerate_morphisms(R.P, C_, nullptr, budget_);
    for (int i = 0; i < static_cast<int>(t.maps.size()); ++i) t.index.emplace(morphism_key(t.maps[i]), i);
    return tables_.emplace(L, std::move(t)).first->second;
  }

  const Presheaf& C_;
  SearchBudget budget_;
  std::map<Shape, Table> tables_;
  std::map<std::tuple<Shape, int, std::vector<int>, Shape>, int> restrict_cache_;
};

// The cubical nerve of a preorder: maps box[L] -> ner P are monotone maps L -> P.
class NerveExSource : public ExSource {
 public:
  explicit NerveExSource(const Preorder& P) : P_(P) {}

  const std::vector<Key>& maps(const Shape& L) { return table(L).maps; }
  int count(const Shape& L) override { return static_cast<int>(table(L).maps.size()); }
  int index_of(const Shape& L, const Key& values) { return table(L).index.at(values); }

  int restrict(const Shape& L, int psi, const MonotoneMap& u) override {
    return index_of(u.dom, precompose(table(L).maps[psi], u));
  }

  std::vector<int> vertices(const Shape& L, int psi) override { return table(L).maps[psi]; }
  const Preorder& preorder() const { return P_; }

 private:
  struct Table {
    std::vector<Key> maps;
    std::unordered_map<Key, int, KeyHash> index;
  };
  Table& table(const Shape& L) {
    auto it = tables_.find(L);
    if (it != tables_.end()) return it->second;
    Table t;
    t.maps = monotone_maps_into(L, P_);
    for (int i = 0; i < static_cast<int>(t.maps.size()); ++i) t.index.emplace(t.maps[i], i);
    return tables_.emplace(L, std::move(t)).first->second;
  }

  Preorder P_;
  std::map<Shape, Table> tables_;
};

// Words over {1,2} of length <= w, shortest first.
inline std::vector<Shape> boxplus_words(int w) {
  std::vector<Shape> out{{}};
  for (std::size_t i = 0; i < out.size(); ++i)
    if (static_cast<int>(out[i].size()) < w)
      for (int f : {1, 2}) {
        Shape s = out[i];
        s.push_back(f);
        out.push_back(s);
      }
  return out;
}

struct ExElement {
  Shape L;
  int psi;
  Key g;  // table cube(m) -> L
  auto operator<=>(const ExElement&) const = default;
};

class Ex {
 public:
  Ex(ExSource& src, CoendBudget budget) : src_(src), budget_(budget) {
    words_ = boxplus_words(budget.max_word_length);
    for (int i = 0; i < static_cast<int>(words_.size()); ++i) word_index_[words_[i]] = i;
    levels_.resize(budget.max_dim + 1);
    for (int m = 0; m <= budget.max_dim; ++m) build_level(m);
    auto enum_cells = [&](int m) {
      std::vector<Key> out;
      for (int e = 0; e < static_cast<int>(levels_[m].elems.size()); ++e)
        if (levels_[m].root[e] == e) out.push_back({e});
      return out;
    };
    auto act = [&](const Key& key, const MonotoneMap& f) {
      int m = static_cast<int>(f.cod.size()), p = static_cast<int>(f.dom.size());
      const ExElement& e = levels_[m].elems[key[0]];
      return Key{class_of(p, e.L, e.psi, precompose(e.g, f))};
    };
    M_ = build_model(Site::Box, budget.max_dim, enum_cells, act);
  }

  const Presheaf& P() const { return M_.P; }
  const CoendBudget& budget() const { return budget_; }
  std::size_t element_count(int m) const { return levels_[m].elems.size(); }

  // class root of an arbitrary element at level m, as a cell of ex C
  Cell cell(int m, const Shape& L, int psi, const Key& g) { return M_.find(m, {class_of(m, L, psi, g)}); }

  const ExElement& representative(const Cell& c) const { return levels_[c.dim].elems[M_.keys[c.dim][c.id][0]]; }

  ExSource& source() { return src_; }

 private:
  struct Level {
    std::vector<ExElement> elems;
    std::map<ExElement, int> index;
    std::vector<int> root;
  };

  // Restricts to the sub-box spanned by g and drops point factors.
  ExElement normalize(const Shape& L, int psi, const Key& g) {
    int n = static_cast<int>(L.size());
    std::vector<int> lo(n, 1 << 20), hi(n, -1);
    for (int x : g) {
      auto c = decode(L, x);
      for (int i = 0; i < n; ++i) {
        lo[i] = std::min(lo[i], c[i]);
        hi[i] = std::max(hi[i], c[i]);
      }
    }
    Shape Lp;
    std::vector<int> kept;
    for (int i = 0; i < n; ++i)
      if (hi[i] > lo[i]) {
        Lp.push_back(hi[i] - lo[i]);
        kept.push_back(i);
      }
    if (Lp == L) return {L, psi, g};
    MonotoneMap u{Lp, L, std::vector<int>(shape_size(Lp))};
    for (int y = 0; y < shape_size(Lp); ++y) {
      auto c = decode(Lp, y);
      std::vector<int> full(lo.begin(), lo.end());
      for (std::size_t j = 0; j < kept.size(); ++j) full[kept[j]] = lo[kept[j]] + c[j];
      u.table[y] = encode(L, full);
    }
    Key gp(g.size());
    for (std::size_t x = 0; x < g.size(); ++x) {
      auto c = decode(L, g[x]);
      std::vector<int> r;
      for (std::size_t j = 0; j < kept.size(); ++j) r.push_back(c[kept[j]] - lo[kept[j]]);
      gp[x] = encode(Lp, r);
    }
    return {Lp, src_.restrict(L, psi, u), gp};
  }

  int class_of(int m, const Shape& L, int psi, const Key& g) {
    ExElement e = normalize(L, psi, g);
    auto it = levels_[m].index.find(e);
    if (it == levels_[m].index.end()) throw std::logic_error("ex: element outside the word budget");
    return levels_[m].root[it->second];
  }

  // Elementary surjections out of L with a section of each.
  struct Elementary {
    MonotoneMap v, section;
  };
  const std::vector<Elementary>& elementary(const Shape& L) {
    auto it = elem_cache_.find(L);
    if (it != elem_cache_.end()) return it->second;
    std::vector<Elementary> out;
    int n = static_cast<int>(L.size());
    for (int i = 0; i < n; ++i) {
      // factor values after surjecting factor i: -1 drops it
      std::vector<std::pair<std::vector<int>, std::vector<int>>> options;  // (v on factor i, section)
      options.push_back({std::vector<int>(L[i] + 1, -1), {L[i] == 2 ? 1 : 0}});
      if (L[i] == 2) {
        options.push_back({{0, 0, 1}, {1, 2}});
        options.push_back({{0, 1, 1}, {0, 1}});
      }
      for (auto& [fv, sec] : options) {
        Shape Lpp = L;
        if (fv[0] < 0) Lpp.erase(Lpp.begin() + i);
        else Lpp[i] = 1;
        MonotoneMap v{L, Lpp, std::vector<int>(shape_size(L))};
        for (int x = 0; x < shape_size(L); ++x) {
          auto c = decode(L, x);
          if (fv[0] < 0) c.erase(c.begin() + i);
          else c[i] = fv[c[i]];
          v.table[x] = encode(Lpp, c);
        }
        MonotoneMap s{Lpp, L, std::vector<int>(shape_size(Lpp))};
        for (int y = 0; y < shape_size(Lpp); ++y) {
          auto c = decode(Lpp, y);
          if (fv[0] < 0) c.insert(c.begin() + i, sec[0]);
          else c[i] = sec[c[i]];
          s.table[y] = encode(L, c);
        }
        out.push_back({v, s});
      }
    }
    return elem_cache_.emplace(L, std::move(out)).first->second;
  }

  void build_level(int m) {
    Level& lv = levels_[m];
    Shape dom = cube(m);
    for (auto& L : words_) {
      int cnt = src_.count(L);
      if (cnt == 0) continue;
      for (auto& g : monotone_maps_into(dom, preorder_of_shape(L))) {
        bool normal = true;
        for (int i = 0; i < static_cast<int>(L.size()) && normal; ++i) {
          int lo = 1 << 20, hi = -1;
          for (int x : g) {
            int c = decode(L, x)[i];
            lo = std::min(lo, c);
            hi = std::max(hi, c);
          }
          normal = lo == 0 && hi == L[i];
        }
        if (!normal) continue;
        for (int psi = 0; psi < cnt; ++psi) {
          lv.index.emplace(ExElement{L, psi, g}, static_cast<int>(lv.elems.size()));
          lv.elems.push_back({L, psi, g});
        }
      }
    }
    detail::UnionFind uf(static_cast<int>(lv.elems.size()));
    for (int e = 0; e < static_cast<int>(lv.elems.size()); ++e) {
      const ExElement el = lv.elems[e];
      for (auto& [v, s] : elementary(el.L)) {
        int chi = src_.restrict(el.L, el.psi, s);
        if (src_.restrict(v.cod, chi, v) != el.psi) continue;
        auto it = lv.index.find(ExElement{v.cod, chi, precompose(v.table, MonotoneMap{dom, el.L, el.g})});
        if (it != lv.index.end()) uf.unite(e, it->second);
      }
    }
    lv.root.resize(lv.elems.size());
    for (int e = 0; e < static_cast<int>(lv.elems.size()); ++e) lv.root[e] = uf.find(e);
  }

  ExSource& src_;
  CoendBudget budget_;
  std::vector<Shape> words_;
  std::map<Shape, int> word_index_;
  std::vector<Level> levels_;
  std::map<Shape, std::vector<Elementary>> elem_cache_;
  Model M_;
};

// upsilon: C -> ex C, sending sigma to (n-cube, sigma, id).
inline Morphism upsilon(const Presheaf& C, PresheafExSource& src, Ex& E) {
  Morphism u;
  u.map.resize(std::min(C.levels(), E.budget().max_dim + 1));
  for (int k = 0; k < static_cast<int>(u.map.size()); ++k)
    for (int i = 0; i < C.count(k); ++i) {
      const Model& R = detail::boxplus_rep(cube(k));
      Morphism yon;
      yon.map.resize(R.P.levels());
      for (int d = 0; d < R.P.levels(); ++d)
        for (auto& key : R.keys[d]) yon.map[d].push_back(C.act(C.cell(k, i), MonotoneMap{cube(d), cube(k), key}));
      Key id(1 << k);
      std::iota(id.begin(), id.end(), 0);
      u.map[k].push_back(E.cell(k, cube(k), src.index_of(cube(k), yon), id));
    }
  return u;
}

inline Morphism upsilon_nerve(const Model& N, NerveExSource& src, Ex& E) {
  Morphism u;
  u.map.resize(std::min(N.P.levels(), E.budget().max_dim + 1));
  for (int k = 0; k < static_cast<int>(u.map.size()); ++k)
    for (auto& key : N.keys[k]) {
      Key id(1 << k);
      std::iota(id.begin(), id.end(), 0);
      u.map[k].push_back(E.cell(k, cube(k), src.index_of(cube(k), key), id));
    }
  return u;
}

// zeta: C -> ex sd C, sending sigma to ([2]^n, the subdivided sigma, doubling).
inline Morphism zeta(const Presheaf& C, const Subdivided& sdC, PresheafExSource& src, Ex& E) {
  Morphism z;
  z.map.resize(std::min(C.levels(), E.budget().max_dim + 1));
  for (int k = 0; k < static_cast<int>(z.map.size()); ++k)
    for (int i = 0; i < C.count(k); ++i) {
      Shape L(static_cast<std::size_t>(k), 2);
      const Morphism& leg = sdC.ext->C.incl[sdC.ext->piece_of[k][i]];
      z.map[k].push_back(E.cell(k, L, src.index_of(L, leg), doubling(k).table));
    }
  return z;
}

// ex of h: C -> D, by postcomposition.
inline Morphism ex_morphism(Ex& EC, PresheafExSource& srcC, Ex& ED, PresheafExSource& srcD, const Morphism& h) {
  Morphism f;
  f.map.resize(EC.P().levels());
  for (int k = 0; k < EC.P().levels(); ++k)
    for (int i = 0; i < EC.P().count(k); ++i) {
      const ExElement& e = EC.representative(EC.P().cell(k, i));
      Morphism moved = compose(h, srcC.maps(e.L)[e.psi]);
      f.map[k].push_back(ED.cell(k, e.L, srcD.index_of(e.L, moved), e.g));
    }
  return f;
}

// The composition of a nerve: (L, psi, g) goes to the cell with vertex values psi o g.
inline Morphism nerve_composition(const Model& N, NerveExSource& src, Ex& E) {
  Morphism mu;
  mu.map.resize(E.P().levels());
  for (int k = 0; k < E.P().levels(); ++k)
    for (int i = 0; i < E.P().count(k); ++i) {
      const ExElement& e = E.representative(E.P().cell(k, i));
      Key values = precompose(src.maps(e.L)[e.psi], MonotoneMap{cube(k), e.L, e.g});
      mu.map[k].push_back(N.find(k, values));
    }
  return mu;
}

// ex^k C with the chain C -> ex C -> ex^2 C -> ..., each step a unit map.
class ExTower {
 public:
  ExTower(const Presheaf& C, int k, CoendBudget budget) : base_(C) {
    const Presheaf* cur = &base_;
    for (int j = 0; j < k; ++j) {
      sources_.push_back(std::make_unique<PresheafExSource>(*cur));
      stages_.push_back(std::make_unique<Ex>(*sources_.back(), budget));
      steps_.push_back(upsilon(*cur, *sources_.back(), *stages_.back()));
      cur = &stages_.back()->P();
    }
  }

  int height() const { return static_cast<int>(stages_.size()); }
  const Presheaf& at(int j) const { return j == 0 ? base_ : stages_[j - 1]->P(); }
  Ex& stage(int j) { return *stages_.at(j - 1); }
  // maps into at(j), feeding stage j+1
  PresheafExSource& source(int j) { return *sources_.at(j); }
  // at(j) -> at(j+1)
  const Morphism& step(int j) const { return steps_.at(j); }

  Morphism chain(int j) const {
    Morphism m = identity_morphism(base_);
    for (int i = 0; i < j; ++i) {
      m.map.resize(std::min(m.map.size(), steps_[i].map.size()));
      m = compose(steps_[i], m);
    }
    return m;
  }

 private:
  Presheaf base_;
  std::vector<std::unique_ptr<PresheafExSource>> sources_;
  std::vector<std::unique_ptr<Ex>> stages_;
  std::vector<Morphism> steps_;
};

// Stability: the comparison from budget w to w+1 is an isomorphism.
struct ExStability {
  std::vector<int> counts_small, counts_large;
  bool stable = false;
};

template <class Source>
ExStability ex_stability(Source& src, CoendBudget budget) {
  Ex small(src, budget);
  CoendBudget bigger = budget;
  bigger.max_word_length += 1;
  Ex large(src, bigger);
  ExStability r;
  r.counts_small = small.P().counts();
  r.counts_large = large.P().counts();
  Morphism cmp;
  cmp.map.resize(small.P().levels());
  for (int k = 0; k < small.P().levels(); ++k)
    for (int i = 0; i < small.P().count(k); ++i) {
      const ExElement& e = small.representative(small.P().cell(k, i));
      cmp.map[k].push_back(large.cell(k, e.L, e.psi, e.g));
    }
  r.stable = is_isomorphism(cmp, small.P(), large.P());
  return r;
}

}  // namespace dicube
