#pragma once
// Building presheaves from keyed cell sets, finite colimits, and cocontinuous extensions.

#include <dicube/presheaf.hpp>

#include <numeric>

namespace dicube {

using Key = std::vector<int>;

struct KeyHash {
  std::size_t operator()(const Key& k) const {
    std::size_t h = k.size();
    for (int v : k) detail::hash_mix(h, static_cast<std::size_t>(v));
    return h;
  }
};

// A presheaf together with the keys its cells were built from.
struct Model {
  Presheaf P;
  std::vector<std::unordered_map<Key, Cell, KeyHash>> cell_of;  // every cell, per level
  std::vector<std::vector<Key>> keys;                           // nondegenerate keys, per dimension

  const Cell& find(int level, const Key& k) const { return cell_of.at(level).at(k); }
  bool has(int level, const Key& k) const { return level < static_cast<int>(cell_of.size()) && cell_of[level].count(k); }
};

// enum_cells(m) lists every key at level m (degenerate ones included);
// act(key, f) restricts a key along a site map f from some level into key's level.
// Levels above max_dim up to store_dim only record degenerate cells, for lookups.
template <class Enum, class Act>
Model build_model(Site s, int max_dim, Enum&& enum_cells, Act&& act, int store_dim = -1) {
  Model M;
  M.P.site = s;
  int top = std::max(max_dim, store_dim);
  M.cell_of.resize(top + 1);
  M.keys.resize(top + 1);
  for (int m = 0; m <= top; ++m) {
    auto& table = M.cell_of[m];
    for (int k = 0; k < m; ++k)
      for (auto& sur : surjections(s, m, k))
        for (int i = 0; i < static_cast<int>(M.keys[k].size()); ++i) {
          Key dk = act(M.keys[k][i], sur);
          Cell c{m, k, i, sur.table};
          auto [it, fresh] = table.emplace(std::move(dk), c);
          if (!fresh && it->second != c) throw std::logic_error("build_model: degenerate cell has two normal forms");
        }
    if (m > max_dim) continue;
    std::vector<Key> fresh_keys;
    for (auto& key : enum_cells(m))
      if (!table.count(key)) {
        table.emplace(key, nondeg(s, m, static_cast<int>(fresh_keys.size())));
        fresh_keys.push_back(key);
      }
    if (fresh_keys.empty()) continue;
    if (M.P.levels() <= m) {
      M.P.faces.resize(m + 1);
      M.P.names.resize(m + 1);
    }
    for (auto& key : fresh_keys) {
      std::vector<Cell> fcs;
      for (int j = 0; j < num_faces(s, m); ++j) {
        Key fk = act(key, face_map(s, m, j));
        auto it = M.cell_of[m - 1].find(fk);
        if (it == M.cell_of[m - 1].end()) throw std::logic_error("build_model: face of a cell is not enumerated");
        fcs.push_back(it->second);
      }
      M.P.faces[m].push_back(std::move(fcs));
    }
    M.P.names[m].resize(fresh_keys.size());
    M.keys[m] = std::move(fresh_keys);
  }
  return M;
}

// Keys that are value tables, acted on by precomposition.
inline Key precompose(const Key& key, const MonotoneMap& f) {
  Key out(f.table.size());
  for (std::size_t x = 0; x < f.table.size(); ++x) out[x] = key[f.table[x]];
  return out;
}

inline Key key_of(const Cell& c) {
  Key k{c.level, c.dim, c.id};
  k.insert(k.end(), c.degen.begin(), c.degen.end());
  return k;
}

inline Cell cell_of_key(const Key& k) { return Cell{k[0], k[1], k[2], std::vector<int>(k.begin() + 3, k.end())}; }

inline std::vector<Key> tables_of(const std::vector<MonotoneMap>& maps) {
  std::vector<Key> out;
  out.reserve(maps.size());
  for (auto& f : maps) out.push_back(f.table);
  return out;
}

// Delta[n] or box[n].
inline Model representable_model(Site s, int n) {
  return build_model(s, n, [&](int m) { return tables_of(site_homs(s, m, n)); }, precompose);
}

inline Presheaf representable(Site s, int n) { return representable_model(s, n).P; }

// box[L] for a boxplus word L: cells at level k are the boxplus maps from the k-cube into L.
inline Model boxplus_representable_model(const Shape& L, int cap = kDefaultBoxPlusCap, int store_dim = -1) {
  int top = static_cast<int>(std::count_if(L.begin(), L.end(), [](int f) { return f > 0; }));
  return build_model(Site::Box, top, [&](int m) { return tables_of(boxplus_homs(cube(m), L, std::max(cap, m))); },
                     precompose, store_dim);
}

inline Model nerve_simplicial_model(const Preorder& P, int max_dim) {
  return build_model(Site::Delta, max_dim, [&](int m) { return monotone_maps_into(ordinal(m), P); },
                     precompose);
}

inline Model nerve_cubical_model(const Preorder& P, int max_dim) {
  return build_model(Site::Box, max_dim, [&](int m) { return monotone_maps_into(cube(m), P); }, precompose);
}

// Longest strict chain; the nerve of a partial order has no nondegenerate cells above it.
inline int default_nerve_dim(const Preorder& P) {
  bool antisym = true;
  for (int a = 0; a < P.n; ++a)
    for (int b = 0; b < P.n; ++b)
      if (a != b && P.leq(a, b) && P.leq(b, a)) antisym = false;
  if (!antisym) return std::max(P.n, 3);
  std::vector<int> len(P.n, 0);
  int best = 0;
  for (int pass = 0; pass < P.n; ++pass)
    for (int a = 0; a < P.n; ++a)
      for (int b = 0; b < P.n; ++b)
        if (a != b && P.leq(a, b)) len[b] = std::max(len[b], len[a] + 1);
  for (int v : len) best = std::max(best, v);
  return best;
}

// ---- colimits ---------------------------------------------------------------

struct Relation {
  const Presheaf* src;
  int a;
  Morphism fa;  // src -> piece a
  int b;
  Morphism fb;  // src -> piece b
};

struct Colimit {
  Presheaf P;
  std::vector<Morphism> incl;  // piece -> P
  // every nondegenerate member (piece, cell) of each nondegenerate colimit cell
  std::vector<std::vector<std::vector<std::pair<int, int>>>> members;
  std::pair<int, int> rep(int k, int i) const { return members[k][i].front(); }
};

namespace detail {
struct UnionFind {
  std::vector<int> parent;
  explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) std::swap(a, b);
    parent[a] = b;  // smaller index stays the root
  }
};
}  // namespace detail

inline Colimit colimit(const std::vector<const Presheaf*>& pieces, const std::vector<Relation>& rels, int max_dim = -1) {
  if (pieces.empty()) return {};
  Site s = pieces.front()->site;
  if (max_dim < 0)
    for (auto* p : pieces) max_dim = std::max(max_dim, p->dim());
  max_dim = std::max(max_dim, 0);

  struct Level {
    std::vector<std::pair<int, Cell>> cells;
    std::vector<std::unordered_map<Cell, int, CellHash>> index;  // per piece
    std::vector<int> root;
  };
  std::vector<Level> L(max_dim + 1);
  for (int m = 0; m <= max_dim; ++m) {
    L[m].index.resize(pieces.size());
    for (int p = 0; p < static_cast<int>(pieces.size()); ++p)
      for (auto& c : pieces[p]->cells_at(m)) {
        L[m].index[p].emplace(c, static_cast<int>(L[m].cells.size()));
        L[m].cells.emplace_back(p, c);
      }
    detail::UnionFind uf(static_cast<int>(L[m].cells.size()));
    for (auto& r : rels)
      for (auto& x : r.src->cells_at(m)) uf.unite(L[m].index[r.a].at(apply(r.fa, x)), L[m].index[r.b].at(apply(r.fb, x)));
    L[m].root.resize(L[m].cells.size());
    for (int g = 0; g < static_cast<int>(L[m].cells.size()); ++g) L[m].root[g] = uf.find(g);
  }

  auto enum_cells = [&](int m) {
    std::vector<Key> out;
    for (int g = 0; g < static_cast<int>(L[m].cells.size()); ++g)
      if (L[m].root[g] == g) out.push_back({g});
    return out;
  };
  auto act = [&](const Key& key, const MonotoneMap& f) {
    int m = level_of(s, f.cod), p = level_of(s, f.dom);
    auto& [piece, c] = L[m].cells[key[0]];
    Cell r = pieces[piece]->act(c, f);
    return Key{L[p].root[L[p].index[piece].at(r)]};
  };
  Model M = build_model(s, max_dim, enum_cells, act);

  Colimit C;
  C.P = std::move(M.P);
  C.members.resize(C.P.levels());
  for (int k = 0; k < C.P.levels(); ++k) C.members[k].resize(C.P.count(k));
  for (int p = 0; p < static_cast<int>(pieces.size()); ++p) {
    Morphism inc;
    inc.map.resize(pieces[p]->levels());
    for (int k = 0; k < pieces[p]->levels(); ++k)
      for (int i = 0; i < pieces[p]->count(k); ++i) {
        int g = L[k].index[p].at(pieces[p]->cell(k, i));
        const Cell& img = M.find(k, {L[k].root[g]});
        inc.map[k].push_back(img);
        if (!img.degenerate()) C.members[k][img.id].emplace_back(p, i);
      }
    C.incl.push_back(std::move(inc));
  }
  return C;
}

// The unique map out of a colimit agreeing with the given maps on pieces.
inline Morphism induced_map(const Colimit& C, const std::vector<Morphism>& legs) {
  Morphism f;
  f.map.resize(C.P.levels());
  for (int k = 0; k < C.P.levels(); ++k)
    for (int i = 0; i < C.P.count(k); ++i) {
      auto [p, c] = C.rep(k, i);
      f.map[k].push_back(legs[p].map[k][c]);
    }
  return f;
}

// The map to the point.
inline Morphism terminal_morphism(const Presheaf& B) {
  Morphism f;
  f.map.resize(B.levels());
  for (int k = 0; k < B.levels(); ++k)
    for (int i = 0; i < B.count(k); ++i) f.map[k].push_back(Cell{k, 0, 0, std::vector<int>(level_size(B.site, k), 0)});
  return f;
}

// C/B: the subpresheaf B collapsed to a single vertex (C plus a point when B is empty).
inline Colimit quotient(const Presheaf& C, const Sub& B) {
  SubPresheaf sb = as_presheaf(C, B);
  Presheaf pt = representable_model(C.site, 0).P;
  return colimit({&C, &pt}, {{&sb.P, 0, sb.incl, 1, terminal_morphism(sb.P)}}, C.dim());
}

// ---- cocontinuous extension along representables ---------------------------

// A functor out of the site, described on representables.  object(n) is the value on the
// n-dimensional representable; morphism(f) is the value on a site map between levels.
struct SiteFunctor {
  Site from = Site::Box;
  std::function<Presheaf(int)> object;
  std::function<Morphism(const MonotoneMap&)> morphism;
};

// Memoizes a SiteFunctor; returned references stay valid for the cache's lifetime.
class FunctorCache {
 public:
  explicit FunctorCache(SiteFunctor F) : F_(std::move(F)) {}
  const Presheaf& object(int n) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = objects_.find(n);
      if (it != objects_.end()) return it->second;
    }
    Presheaf P = F_.object(n);
    std::lock_guard<std::mutex> lock(mu_);
    return objects_.emplace(n, std::move(P)).first->second;
  }
  const Morphism& morphism(const MonotoneMap& f) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto it = maps_.find(f);
      if (it != maps_.end()) return it->second;
    }
    Morphism m = F_.morphism(f);
    std::lock_guard<std::mutex> lock(mu_);
    return maps_.emplace(f, std::move(m)).first->second;
  }
  const SiteFunctor& functor() const { return F_; }

 private:
  SiteFunctor F_;
  std::mutex mu_;
  std::map<int, Presheaf> objects_;
  std::map<MonotoneMap, Morphism> maps_;
};

struct Extension {
  Colimit C;
  std::vector<std::pair<int, int>> piece_cell;  // piece -> nondegenerate cell of the base
  std::vector<std::vector<int>> piece_of;       // base cell -> piece

  const Presheaf& P() const { return C.P; }
};

inline Extension extend(const Presheaf& B, FunctorCache& F) {
  Extension E;
  std::vector<const Presheaf*> pieces;
  E.piece_of.resize(B.levels());
  for (int k = 0; k < B.levels(); ++k)
    for (int i = 0; i < B.count(k); ++i) {
      E.piece_of[k].push_back(static_cast<int>(pieces.size()));
      E.piece_cell.emplace_back(k, i);
      pieces.push_back(&F.object(k));
    }
  std::vector<Relation> rels;
  for (int k = 1; k < B.levels(); ++k)
    for (int i = 0; i < B.count(k); ++i)
      for (int j = 0; j < num_faces(B.site, k); ++j) {
        const Cell& fc = B.faces[k][i][j];
        MonotoneMap s{level_shape(B.site, k - 1), level_shape(B.site, fc.dim), fc.degen};
        rels.push_back({&F.object(k - 1), E.piece_of[k][i], F.morphism(face_map(B.site, k, j)), E.piece_of[fc.dim][fc.id],
                        F.morphism(s)});
      }
  int top = 0;
  for (auto* p : pieces) top = std::max(top, p->dim());
  E.C = colimit(pieces, rels, top);
  return E;
}

// The extension of a morphism g: B -> B2 between bases.
inline Morphism extend_morphism(const Extension& src, const Extension& tgt, const Presheaf& B, const Morphism& g,
                                FunctorCache& F) {
  std::vector<Morphism> legs;
  for (auto [k, i] : src.piece_cell) {
    const Cell& img = g.map[k][i];
    MonotoneMap s{level_shape(B.site, k), level_shape(B.site, img.dim), img.degen};
    legs.push_back(compose(tgt.C.incl[tgt.piece_of[img.dim][img.id]], F.morphism(s)));
  }
  return induced_map(src.C, legs);
}

// Smallest subpresheaf of the base whose extension contains the given cells.
inline Sub extension_support(const Presheaf& B, const Extension& E, const Sub& a) {
  Sub out = empty_sub(B);
  for (int k = 0; k < static_cast<int>(a.size()) && k < E.P().levels(); ++k)
    for (int i = 0; i < static_cast<int>(a[k].size()); ++i) {
      if (!a[k][i]) continue;
      std::optional<Sub> s;
      for (auto [p, c] : E.C.members[k][i]) {
        auto [bk, bi] = E.piece_cell[p];
        Sub h = atomic_hull(B, bk, bi);
        s = s ? sub_intersection(*s, h) : h;
      }
      out = sub_union(out, *s);
    }
  return out;
}

}  // namespace dicube
