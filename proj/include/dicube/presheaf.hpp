#pragma once
// Finite simplicial and cubical sets stored by nondegenerate cells and face tables.

#include <dicube/site.hpp>

#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <vector>

namespace dicube {

enum class Site { Delta, Box };

inline const char* site_name(Site s) { return s == Site::Delta ? "delta" : "box"; }

inline Shape level_shape(Site s, int k) { return s == Site::Delta ? ordinal(k) : cube(k); }
inline int level_size(Site s, int k) { return s == Site::Delta ? k + 1 : 1 << k; }
inline int level_of(Site s, const Shape& sh) { return s == Site::Delta ? ordinal_max(sh) : static_cast<int>(sh.size()); }

namespace detail {
template <class K, class V, class Make>
const V& memo(const K& key, Make&& make) {
  static std::map<K, V> cache;
  static std::mutex mu;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
  }
  V v = make();
  std::lock_guard<std::mutex> lock(mu);
  return cache.emplace(key, std::move(v)).first->second;
}

inline void hash_mix(std::size_t& h, std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2); }
}  // namespace detail

// All site morphisms from level m to level n.
inline const std::vector<MonotoneMap>& site_homs(Site s, int m, int n) {
  return detail::memo<std::tuple<int, int, int>, std::vector<MonotoneMap>>({static_cast<int>(s), m, n}, [&] {
    return s == Site::Delta ? delta_homs(m, n) : box_homs(m, n);
  });
}

inline int num_faces(Site s, int k) { return k == 0 ? 0 : s == Site::Delta ? k + 1 : 2 * k; }

// Elementary face into level k: delta skips j; box face j = 2r+e inserts e at coordinate r.
inline const MonotoneMap& face_map(Site s, int k, int j) {
  return detail::memo<std::tuple<int, int, int>, MonotoneMap>({static_cast<int>(s), k, j}, [&] {
    if (s == Site::Delta) {
      MonotoneMap f{ordinal(k - 1), ordinal(k), std::vector<int>(k)};
      for (int i = 0; i < k; ++i) f.table[i] = i < j ? i : i + 1;
      return f;
    }
    int r = j / 2, e = j % 2;
    BoxNF nf{k - 1, std::vector<int>(k)};
    for (int t = 0, next = 0; t < k; ++t) nf.out[t] = t == r ? (e ? BoxNF::kConst1 : BoxNF::kConst0) : next++;
    return nf.to_map();
  });
}

// Elementary degeneracy from level k+1 onto level k.
inline const MonotoneMap& degeneracy_map(Site s, int k, int j) {
  return detail::memo<std::tuple<int, int, int>, MonotoneMap>({static_cast<int>(s), k, j}, [&] {
    if (s == Site::Delta) {
      MonotoneMap f{ordinal(k + 1), ordinal(k), std::vector<int>(k + 2)};
      for (int i = 0; i <= k + 1; ++i) f.table[i] = i <= j ? i : i - 1;
      return f;
    }
    BoxNF nf{k + 1, {}};
    for (int t = 0; t <= k; ++t)
      if (t != j) nf.out.push_back(t);
    return nf.to_map();
  });
}

inline bool is_surjection(Site s, const MonotoneMap& f) {
  int n = shape_size(f.cod);
  std::vector<char> hit(n, 0);
  for (int v : f.table) hit[v] = 1;
  if (std::count(hit.begin(), hit.end(), 1) != n) return false;
  if (s == Site::Box) {
    auto nf = box_nf_from_map(f);
    return nf && std::none_of(nf->out.begin(), nf->out.end(), [](int o) { return o < 0; });
  }
  return is_monotone(f);
}

inline const std::vector<MonotoneMap>& surjections(Site s, int m, int k) {
  return detail::memo<std::tuple<int, int, int>, std::vector<MonotoneMap>>({static_cast<int>(s), m, k}, [&] {
    std::vector<MonotoneMap> out;
    if (k <= m)
      for (auto& f : site_homs(s, m, k))
        if (is_surjection(s, f)) out.push_back(f);
    return out;
  });
}

// A right inverse of a surjection.
inline MonotoneMap section_of(Site s, const MonotoneMap& e) {
  if (s == Site::Delta) {
    int k = ordinal_max(e.cod);
    MonotoneMap f{e.cod, e.dom, std::vector<int>(k + 1, -1)};
    for (int x = static_cast<int>(e.table.size()) - 1; x >= 0; --x) f.table[e.table[x]] = x;
    return f;
  }
  auto nf = box_nf_from_map(e);
  BoxNF sec{static_cast<int>(nf->out.size()), std::vector<int>(nf->m, BoxNF::kConst0)};
  for (std::size_t j = 0; j < nf->out.size(); ++j) sec.out[nf->out[j]] = static_cast<int>(j);
  return sec.to_map();
}

struct EpiMono {
  MonotoneMap epi, mono;
};

inline EpiMono epi_mono(Site s, const MonotoneMap& f) {
  if (s == Site::Delta) {
    std::vector<int> vals(f.table.begin(), f.table.end());
    std::sort(vals.begin(), vals.end());
    vals.erase(std::unique(vals.begin(), vals.end()), vals.end());
    int j = static_cast<int>(vals.size()) - 1;
    EpiMono r{{f.dom, ordinal(j), std::vector<int>(f.table.size())}, {ordinal(j), f.cod, vals}};
    for (std::size_t x = 0; x < f.table.size(); ++x)
      r.epi.table[x] = static_cast<int>(std::lower_bound(vals.begin(), vals.end(), f.table[x]) - vals.begin());
    return r;
  }
  auto nf = box_nf_from_map(f);
  if (!nf) throw std::invalid_argument("epi_mono: not a box morphism");
  BoxNF e{nf->m, {}}, m{0, {}};
  for (int o : nf->out) {
    if (o >= 0) {
      e.out.push_back(o);
      m.out.push_back(m.m++);
    } else {
      m.out.push_back(o);
    }
  }
  return {e.to_map(), m.to_map()};
}

// Splits a non-identity injective map into an elementary face after a smaller injection.
inline std::pair<int, MonotoneMap> peel_face(Site s, const MonotoneMap& mono) {
  if (s == Site::Delta) {
    int k = ordinal_max(mono.cod);
    std::vector<char> hit(k + 1, 0);
    for (int v : mono.table) hit[v] = 1;
    int j = static_cast<int>(std::find(hit.begin(), hit.end(), 0) - hit.begin());
    MonotoneMap rest{mono.dom, ordinal(k - 1), mono.table};
    for (auto& v : rest.table) v = v < j ? v : v - 1;
    return {j, rest};
  }
  auto nf = box_nf_from_map(mono);
  for (std::size_t r = 0; r < nf->out.size(); ++r)
    if (nf->out[r] < 0) {
      int j = 2 * static_cast<int>(r) + (nf->out[r] == BoxNF::kConst1 ? 1 : 0);
      BoxNF rest = *nf;
      rest.out.erase(rest.out.begin() + static_cast<long>(r));
      return {j, rest.to_map()};
    }
  throw std::logic_error("peel_face: identity has no face");
}

// A possibly degenerate cell: the nondegenerate cell (dim, id) pulled back along the
// surjection degen from level-object points to dim-object points.
struct Cell {
  int level = 0;
  int dim = 0;
  int id = 0;
  std::vector<int> degen;

  bool degenerate() const { return level != dim; }
  auto operator<=>(const Cell&) const = default;
};

struct CellHash {
  std::size_t operator()(const Cell& c) const {
    std::size_t h = static_cast<std::size_t>(c.level) * 1315423911u;
    detail::hash_mix(h, static_cast<std::size_t>(c.dim));
    detail::hash_mix(h, static_cast<std::size_t>(c.id));
    for (int v : c.degen) detail::hash_mix(h, static_cast<std::size_t>(v));
    return h;
  }
};

inline Cell nondeg(Site s, int dim, int id) {
  Cell c{dim, dim, id, std::vector<int>(level_size(s, dim))};
  std::iota(c.degen.begin(), c.degen.end(), 0);
  return c;
}

// c pulled back along a surjection from level p onto c.level
inline Cell pull_back(const Cell& c, const std::vector<int>& s, int p) {
  Cell r{p, c.dim, c.id, std::vector<int>(s.size())};
  for (std::size_t x = 0; x < s.size(); ++x) r.degen[x] = c.degen[s[x]];
  return r;
}

struct Presheaf {
  Site site = Site::Box;
  std::vector<std::vector<std::vector<Cell>>> faces;  // faces[k][i][j]
  std::vector<std::vector<std::string>> names;        // optional labels, same layout

  int levels() const { return static_cast<int>(faces.size()); }
  int count(int k) const { return k >= 0 && k < levels() ? static_cast<int>(faces[k].size()) : 0; }
  int dim() const {
    for (int k = levels() - 1; k >= 0; --k)
      if (count(k) > 0) return k;
    return -1;
  }
  int total() const {
    int t = 0;
    for (int k = 0; k < levels(); ++k) t += count(k);
    return t;
  }
  std::vector<int> counts() const {
    std::vector<int> c;
    for (int k = 0; k <= dim(); ++k) c.push_back(count(k));
    return c;
  }
  Cell cell(int k, int i) const { return nondeg(site, k, i); }

  std::string name(int k, int i) const {
    if (k < static_cast<int>(names.size()) && i < static_cast<int>(names[k].size()) && !names[k][i].empty())
      return names[k][i];
    return (site == Site::Delta ? "s" : "c") + std::to_string(k) + "_" + std::to_string(i);
  }

  int add_cell(int k, std::vector<Cell> fcs, std::string nm = {}) {
    if (levels() <= k) {
      faces.resize(k + 1);
      names.resize(k + 1);
    }
    if (static_cast<int>(names.size()) <= k) names.resize(k + 1);
    names[k].resize(faces[k].size());
    faces[k].push_back(std::move(fcs));
    names[k].push_back(std::move(nm));
    return static_cast<int>(faces[k].size()) - 1;
  }

  // The nondegenerate cell (k, id) restricted along an injective site map.
  Cell act_mono(int k, int id, const MonotoneMap& mono) const {
    if (is_identity(mono)) return nondeg(site, k, id);
    auto [j, rest] = peel_face(site, mono);
    return act(faces[k][id][j], rest);
  }

  // c acted on by the site map f: level p -> c.level
  Cell act(const Cell& c, const MonotoneMap& f) const {
    MonotoneMap sf{f.dom, level_shape(site, c.dim), std::vector<int>(f.table.size())};
    for (std::size_t x = 0; x < f.table.size(); ++x) sf.table[x] = c.degen[f.table[x]];
    auto em = epi_mono(site, sf);
    Cell b = act_mono(c.dim, c.id, em.mono);
    return pull_back(b, em.epi.table, level_of(site, f.dom));
  }

  Cell face(const Cell& c, int j) const { return act(c, face_map(site, c.level, j)); }

  std::vector<Cell> cells_at(int m) const {
    std::vector<Cell> out;
    for (int k = 0; k <= std::min(m, dim()); ++k)
      for (auto& s : surjections(site, m, k))
        for (int i = 0; i < count(k); ++i) out.push_back(Cell{m, k, i, s.table});
    return out;
  }

  std::vector<Cell> vertices_of(const Cell& c) const {
    std::vector<Cell> vs;
    for (int p = 0; p < level_size(site, c.level); ++p)
      vs.push_back(act(c, constant_map(level_shape(site, 0), level_shape(site, c.level), p)));
    return vs;
  }
};

// Checks face references and the operator identities on the stored tables.
inline std::optional<std::string> check_presheaf(const Presheaf& P) {
  for (int k = 0; k < P.levels(); ++k)
    for (int i = 0; i < P.count(k); ++i) {
      if (static_cast<int>(P.faces[k][i].size()) != num_faces(P.site, k))
        return "dimension " + std::to_string(k) + " cell " + std::to_string(i) + ": wrong number of faces";
      for (int j = 0; j < num_faces(P.site, k); ++j) {
        const Cell& f = P.faces[k][i][j];
        std::string where = "dimension " + std::to_string(k) + " cell " + std::to_string(i) + " face " + std::to_string(j);
        if (f.level != k - 1 || f.dim > f.level || f.dim < 0 || f.id < 0 || f.id >= P.count(f.dim))
          return where + ": dangling reference";
        MonotoneMap s{level_shape(P.site, f.level), level_shape(P.site, f.dim), f.degen};
        if (static_cast<int>(f.degen.size()) != level_size(P.site, f.level) || !is_surjection(P.site, s))
          return where + ": degeneracy is not a surjection";
      }
      if (k < 2) continue;
      std::map<std::vector<int>, Cell> seen;
      for (int a = 0; a < num_faces(P.site, k); ++a)
        for (int b = 0; b < num_faces(P.site, k - 1); ++b) {
          auto comp = compose(face_map(P.site, k, a), face_map(P.site, k - 1, b));
          Cell v = P.act(P.faces[k][i][a], face_map(P.site, k - 1, b));
          auto [it, fresh] = seen.emplace(comp.table, v);
          if (!fresh && it->second != v)
            return "dimension " + std::to_string(k) + " cell " + std::to_string(i) + ": face identities fail";
        }
    }
  return std::nullopt;
}

// A morphism assigns to every nondegenerate source cell a target cell of the same level.
struct Morphism {
  std::vector<std::vector<Cell>> map;
  auto operator<=>(const Morphism&) const = default;
};

inline Cell apply(const Morphism& f, const Cell& c) {
  const Cell& img = f.map[c.dim][c.id];
  return pull_back(img, c.degen, c.level);
}

// g after f
inline Morphism compose(const Morphism& g, const Morphism& f) {
  Morphism h;
  h.map.resize(f.map.size());
  for (std::size_t k = 0; k < f.map.size(); ++k)
    for (auto& c : f.map[k]) h.map[k].push_back(apply(g, c));
  return h;
}

inline Morphism identity_morphism(const Presheaf& P) {
  Morphism f;
  f.map.resize(P.levels());
  for (int k = 0; k < P.levels(); ++k)
    for (int i = 0; i < P.count(k); ++i) f.map[k].push_back(P.cell(k, i));
  return f;
}

inline std::optional<std::string> check_morphism(const Morphism& f, const Presheaf& S, const Presheaf& T) {
  if (S.site != T.site) return "site mismatch";
  for (int k = 0; k < S.levels(); ++k) {
    if (k >= static_cast<int>(f.map.size()) || static_cast<int>(f.map[k].size()) != S.count(k))
      return "assignment missing in dimension " + std::to_string(k);
    for (int i = 0; i < S.count(k); ++i) {
      const Cell& x = f.map[k][i];
      if (x.level != k || x.dim < 0 || x.dim >= T.levels() || x.id < 0 || x.id >= T.count(x.dim))
        return "dimension " + std::to_string(k) + " cell " + std::to_string(i) + ": image out of range";
      for (int j = 0; j < num_faces(S.site, k); ++j)
        if (apply(f, S.faces[k][i][j]) != T.face(x, j))
          return "dimension " + std::to_string(k) + " cell " + std::to_string(i) + ": face " + std::to_string(j) +
                 " does not commute";
    }
  }
  return std::nullopt;
}

inline bool is_isomorphism(const Morphism& f, const Presheaf& S, const Presheaf& T) {
  if (check_morphism(f, S, T)) return false;
  if (S.counts() != T.counts()) return false;
  for (int k = 0; k < S.levels(); ++k) {
    std::vector<char> hit(T.count(k), 0);
    for (auto& c : f.map[k]) {
      if (c.degenerate() || hit[c.id]) return false;
      hit[c.id] = 1;
    }
  }
  return true;
}

// ---- subpresheaves ----------------------------------------------------------

using Sub = std::vector<std::vector<char>>;

inline Sub empty_sub(const Presheaf& P) {
  Sub s(P.levels());
  for (int k = 0; k < P.levels(); ++k) s[k].assign(P.count(k), 0);
  return s;
}

inline Sub full_sub(const Presheaf& P) {
  Sub s(P.levels());
  for (int k = 0; k < P.levels(); ++k) s[k].assign(P.count(k), 1);
  return s;
}

inline Sub closure(const Presheaf& P, Sub s) {
  for (int k = P.levels() - 1; k > 0; --k)
    for (int i = 0; i < P.count(k); ++i)
      if (s[k][i])
        for (auto& f : P.faces[k][i]) s[f.dim][f.id] = 1;
  return s;
}

inline bool is_subpresheaf(const Presheaf& P, const Sub& s) { return closure(P, s) == s; }

inline Sub atomic_hull(const Presheaf& P, int k, int i) {
  Sub s = empty_sub(P);
  s[k][i] = 1;
  return closure(P, s);
}

inline bool sub_contains(const Sub& s, const Cell& c) { return s[c.dim][c.id]; }

inline int sub_size(const Sub& s) {
  int n = 0;
  for (auto& l : s) n += static_cast<int>(std::count(l.begin(), l.end(), 1));
  return n;
}

inline bool sub_empty(const Sub& s) { return sub_size(s) == 0; }

inline Sub sub_union(Sub a, const Sub& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) a[k][i] = a[k][i] || b[k][i];
  return a;
}

inline Sub sub_intersection(Sub a, const Sub& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    for (std::size_t i = 0; i < a[k].size(); ++i) a[k][i] = a[k][i] && b[k][i];
  return a;
}

inline bool sub_leq(const Sub& a, const Sub& b) { return sub_intersection(a, b) == a; }

inline int sub_dim(const Sub& s) {
  for (int k = static_cast<int>(s.size()) - 1; k >= 0; --k)
    if (std::count(s[k].begin(), s[k].end(), 1)) return k;
  return -1;
}

// The generating cell of an atomic subpresheaf, if it is atomic.
inline std::optional<std::pair<int, int>> atomic_generator(const Presheaf& P, const Sub& s) {
  int d = sub_dim(s);
  if (d < 0) return std::nullopt;
  for (int i = 0; i < P.count(d); ++i)
    if (s[d][i] && atomic_hull(P, d, i) == s) return std::make_pair(d, i);
  return std::nullopt;
}

inline Sub boundary(const Presheaf& P, const Sub& atomic) {
  auto g = atomic_generator(P, atomic);
  if (!g) throw std::invalid_argument("boundary: input is not atomic");
  Sub s = atomic;
  s[g->first][g->second] = 0;
  return s;
}

inline Sub star(const Presheaf& P, const Sub& b) {
  Sub s = empty_sub(P);
  for (int k = 0; k < P.levels(); ++k)
    for (int i = 0; i < P.count(k); ++i) {
      Sub h = atomic_hull(P, k, i);
      if (!sub_empty(sub_intersection(h, b))) s = sub_union(s, h);
    }
  return s;
}

inline Sub image(const Morphism& f, const Presheaf& T, const Sub& in) {
  Sub s = empty_sub(T);
  for (std::size_t k = 0; k < in.size(); ++k)
    for (std::size_t i = 0; i < in[k].size(); ++i)
      if (in[k][i]) s[f.map[k][i].dim][f.map[k][i].id] = 1;
  return closure(T, s);
}

inline Sub preimage(const Morphism& f, const Presheaf& S, const Sub& t) {
  Sub s = empty_sub(S);
  for (int k = 0; k < S.levels(); ++k)
    for (int i = 0; i < S.count(k); ++i) s[k][i] = sub_contains(t, f.map[k][i]);
  return s;
}

// All subpresheaves, smallest first by construction order.  Exponential; for small inputs.
inline std::vector<Sub> enumerate_subpresheaves(const Presheaf& P, std::size_t limit = 1u << 20) {
  std::vector<std::pair<int, int>> order;
  for (int k = 0; k < P.levels(); ++k)
    for (int i = 0; i < P.count(k); ++i) order.emplace_back(k, i);
  std::vector<Sub> out;
  Sub cur = empty_sub(P);
  auto rec = [&](auto&& self, std::size_t t) -> void {
    if (out.size() > limit) throw SizeCapExceeded("enumerate_subpresheaves: too many subpresheaves");
    if (t == order.size()) {
      out.push_back(cur);
      return;
    }
    auto [k, i] = order[t];
    self(self, t + 1);
    bool ok = true;
    for (auto& f : P.faces[k][i])
      if (!cur[f.dim][f.id]) ok = false;
    if (ok) {
      cur[k][i] = 1;
      self(self, t + 1);
      cur[k][i] = 0;
    }
  };
  rec(rec, 0);
  return out;
}

struct SubPresheaf {
  Presheaf P;
  Morphism incl;                         // P -> parent
  std::vector<std::vector<int>> to_sub;  // parent index -> sub index or -1
};

inline SubPresheaf as_presheaf(const Presheaf& parent, const Sub& s) {
  SubPresheaf r;
  r.P.site = parent.site;
  r.to_sub.resize(parent.levels());
  r.incl.map.resize(parent.levels());
  for (int k = 0; k < parent.levels(); ++k) {
    r.to_sub[k].assign(parent.count(k), -1);
    for (int i = 0; i < parent.count(k); ++i)
      if (s[k][i]) {
        std::vector<Cell> fcs;
        for (auto f : parent.faces[k][i]) {
          f.id = r.to_sub[f.dim][f.id];
          fcs.push_back(f);
        }
        r.to_sub[k][i] = r.P.add_cell(k, fcs, parent.name(k, i));
        r.incl.map[k].push_back(parent.cell(k, i));
      }
  }
  while (!r.P.faces.empty() && r.P.faces.back().empty()) {
    r.P.faces.pop_back();
    r.P.names.pop_back();
    r.incl.map.pop_back();
  }
  r.incl.map.resize(r.P.levels());
  return r;
}

// ---- indexed cell tables ----------------------------------------------------

// All cells (degenerate included) of a presheaf up to a level, with integer face tables
// and cached actions of site maps.
class CellIndex {
 public:
  CellIndex(const Presheaf& P, int max_level) : P_(&P), max_level_(max_level) {
    cells_.resize(max_level + 1);
    index_.resize(max_level + 1);
    faces_.resize(max_level + 1);
    for (int k = 0; k <= max_level; ++k) {
      cells_[k] = P.cells_at(k);
      for (int x = 0; x < static_cast<int>(cells_[k].size()); ++x) index_[k].emplace(cells_[k][x], x);
    }
    for (int k = 1; k <= max_level; ++k) {
      faces_[k].resize(cells_[k].size());
      for (std::size_t x = 0; x < cells_[k].size(); ++x)
        for (int j = 0; j < num_faces(P.site, k); ++j) faces_[k][x].push_back(find(P.face(cells_[k][x], j)));
    }
  }

  const Presheaf& presheaf() const { return *P_; }
  int max_level() const { return max_level_; }
  const std::vector<Cell>& cells(int k) const { return cells_[k]; }
  int size(int k) const { return static_cast<int>(cells_[k].size()); }
  int find(const Cell& c) const { return index_.at(c.level).at(c); }
  int face(int k, int x, int j) const { return faces_[k][x][j]; }

  // For a site map f from level p to level q, the table cell index at q -> cell index at p.
  const std::vector<int>& action(const MonotoneMap& f) const {
    auto it = act_cache_.find(f);
    if (it != act_cache_.end()) return it->second;
    int q = level_of(P_->site, f.cod), p = level_of(P_->site, f.dom);
    std::vector<int> t(cells_[q].size());
    for (std::size_t x = 0; x < cells_[q].size(); ++x) t[x] = find(P_->act(cells_[q][x], f));
    (void)p;
    return act_cache_.emplace(f, std::move(t)).first->second;
  }

 private:
  const Presheaf* P_;
  int max_level_;
  std::vector<std::vector<Cell>> cells_;
  std::vector<std::unordered_map<Cell, int, CellHash>> index_;
  std::vector<std::vector<std::vector<int>>> faces_;
  mutable std::map<MonotoneMap, std::vector<int>> act_cache_;
};

// ---- morphism enumeration ---------------------------------------------------

struct BudgetExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SearchBudget {
  std::size_t max_results = 2'000'000;
  std::size_t max_nodes = 200'000'000;
};

using PartialMap = std::vector<std::vector<std::optional<Cell>>>;

inline PartialMap empty_partial(const Presheaf& S) {
  PartialMap p(S.levels());
  for (int k = 0; k < S.levels(); ++k) p[k].assign(S.count(k), std::nullopt);
  return p;
}

// Visits every morphism S -> T extending the pins; cells of S are chosen in decreasing
// dimension and faces are propagated.  Candidates are tried in target index order.
template <class Visit>
void for_each_morphism(const Presheaf& S, const Presheaf& T, const CellIndex& TI, const PartialMap* pins, Visit&& visit,
                       SearchBudget budget = {}) {
  if (S.site != T.site) throw std::invalid_argument("for_each_morphism: site mismatch");
  int top = S.dim();
  if (top < 0) {
    visit(Morphism{});
    return;
  }
  if (TI.max_level() < top) throw std::invalid_argument("for_each_morphism: target index too shallow");
  struct FaceInfo {
    int dim, id;
    const std::vector<int>* pull;  // target cells at dim -> level k-1
    const std::vector<int>* sect;  // target cells at level k-1 -> dim
  };
  std::vector<std::vector<std::vector<FaceInfo>>> finfo(S.levels());
  for (int k = 0; k < S.levels(); ++k) {
    finfo[k].resize(S.count(k));
    for (int i = 0; i < S.count(k); ++i)
      for (auto& f : S.faces[k][i]) {
        FaceInfo fi{f.dim, f.id, nullptr, nullptr};
        if (f.degenerate()) {
          MonotoneMap s{level_shape(S.site, k - 1), level_shape(S.site, f.dim), f.degen};
          fi.pull = &TI.action(s);
          fi.sect = &TI.action(section_of(S.site, s));
        }
        finfo[k][i].push_back(fi);
      }
  }
  std::vector<std::vector<int>> fidx(S.levels());
  for (int k = 0; k < S.levels(); ++k) fidx[k].assign(S.count(k), -1);
  std::vector<std::pair<int, int>> trail;
  std::size_t nodes = 0, results = 0;

  auto assign = [&](auto&& self, int k, int c, int x) -> bool {
    if (fidx[k][c] >= 0) return fidx[k][c] == x;
    fidx[k][c] = x;
    trail.emplace_back(k, c);
    for (int j = 0; j < static_cast<int>(finfo[k][c].size()); ++j) {
      const FaceInfo& fi = finfo[k][c][j];
      int y = TI.face(k, x, j);
      if (!fi.pull) {
        if (!self(self, k - 1, fi.id, y)) return false;
        continue;
      }
      int cur = fidx[fi.dim][fi.id];
      if (cur >= 0) {
        if ((*fi.pull)[cur] != y) return false;
        continue;
      }
      int z = (*fi.sect)[y];
      if ((*fi.pull)[z] != y) return false;
      if (!self(self, fi.dim, fi.id, z)) return false;
    }
    return true;
  };
  auto undo = [&](std::size_t mark) {
    while (trail.size() > mark) {
      fidx[trail.back().first][trail.back().second] = -1;
      trail.pop_back();
    }
  };

  std::vector<std::pair<int, int>> order;
  for (int k = top; k >= 0; --k)
    for (int i = 0; i < S.count(k); ++i) order.emplace_back(k, i);

  if (pins)
    for (int k = 0; k < S.levels(); ++k)
      for (int i = 0; i < S.count(k); ++i)
        if ((*pins)[k][i]) {
          std::size_t mark = trail.size();
          if (!assign(assign, k, i, TI.find(*(*pins)[k][i]))) {
            undo(mark);
            return;
          }
        }

  auto rec = [&](auto&& self, std::size_t t) -> void {
    if (++nodes > budget.max_nodes) throw BudgetExceeded("morphism search exceeded node budget");
    while (t < order.size() && fidx[order[t].first][order[t].second] >= 0) ++t;
    if (t == order.size()) {
      if (++results > budget.max_results) throw BudgetExceeded("morphism search exceeded result budget");
      Morphism f;
      f.map.resize(S.levels());
      for (int k = 0; k < S.levels(); ++k)
        for (int i = 0; i < S.count(k); ++i) f.map[k].push_back(TI.cells(k)[fidx[k][i]]);
      visit(f);
      return;
    }
    auto [k, c] = order[t];
    for (int x = 0; x < TI.size(k); ++x) {
      std::size_t mark = trail.size();
      if (assign(assign, k, c, x)) self(self, t + 1);
      undo(mark);
    }
  };
  rec(rec, 0);
}

inline std::vector<Morphism> enumerate_morphisms(const Presheaf& S, const Presheaf& T, const PartialMap* pins = nullptr,
                                                 SearchBudget budget = {}) {
  CellIndex TI(T, std::max(S.dim(), 0));
  std::vector<Morphism> out;
  for_each_morphism(S, T, TI, pins, [&](const Morphism& f) { out.push_back(f); }, budget);
  return out;
}

// ---- tensor product of cubical sets -----------------------------------------

struct TensorProduct {
  Presheaf P;
  std::map<std::tuple<int, int, int, int>, int> pair_id;  // (dim a, id a, dim b, id b) -> id
  std::vector<std::vector<std::tuple<int, int, int, int>>> factors;

  Cell cell_of(const Cell& a, const Cell& b) const {
    MonotoneMap sa{cube(a.level), cube(a.dim), a.degen}, sb{cube(b.level), cube(b.dim), b.degen};
    Cell c{a.level + b.level, a.dim + b.dim, pair_id.at({a.dim, a.id, b.dim, b.id}), tensor(sa, sb).table};
    return c;
  }
};

inline TensorProduct tensor(const Presheaf& B, const Presheaf& C, int max_dim = 1 << 20) {
  if (B.site != Site::Box || C.site != Site::Box) throw std::invalid_argument("tensor: cubical inputs required");
  TensorProduct T;
  T.P.site = Site::Box;
  int top = std::min(std::max(B.dim(), 0) + std::max(C.dim(), 0), max_dim);
  if (B.dim() < 0 || C.dim() < 0) return T;
  T.factors.resize(top + 1);
  for (int d = 0; d <= top; ++d)
    for (int p = 0; p <= d; ++p)
      for (int x = 0; x < B.count(p); ++x)
        for (int y = 0; y < C.count(d - p); ++y) {
          int q = d - p;
          std::vector<Cell> fcs;
          for (int r = 0; r < d; ++r)
            for (int e = 0; e < 2; ++e) {
              if (r < p) fcs.push_back(T.cell_of(B.faces[p][x][2 * r + e], C.cell(q, y)));
              else fcs.push_back(T.cell_of(B.cell(p, x), C.faces[q][y][2 * (r - p) + e]));
            }
          int id = T.P.add_cell(d, fcs, B.name(p, x) + "*" + C.name(q, y));
          T.pair_id[{p, x, q, y}] = id;
          T.factors[d].emplace_back(p, x, q, y);
        }
  return T;
}

inline Morphism tensor_morphism(const Morphism& f, const Morphism& g, const TensorProduct& src, const TensorProduct& tgt) {
  Morphism h;
  h.map.resize(src.P.levels());
  for (int d = 0; d < src.P.levels(); ++d)
    for (auto& [p, x, q, y] : src.factors[d]) h.map[d].push_back(tgt.cell_of(f.map[p][x], g.map[q][y]));
  return h;
}

// ---- the level preorder of a simplicial set ---------------------------------

struct LevelPreorder {
  std::vector<Cell> cells;
  std::vector<char> rel;
  bool leq(int a, int b) const { return rel[a * cells.size() + b]; }
};

// Closure of the relations sigma.phi <= sigma.psi over pointwise pairs phi <= psi : [n] -> [k],
// with sigma ranging over cells of levels <= max_level.
inline LevelPreorder preorder_on_level(const Presheaf& B, int n, int max_level) {
  if (B.site != Site::Delta) throw std::invalid_argument("preorder_on_level: simplicial input required");
  LevelPreorder L;
  L.cells = B.cells_at(n);
  std::unordered_map<Cell, int, CellHash> idx;
  for (int i = 0; i < static_cast<int>(L.cells.size()); ++i) idx.emplace(L.cells[i], i);
  int N = static_cast<int>(L.cells.size());
  L.rel.assign(static_cast<std::size_t>(N) * N, 0);
  for (int i = 0; i < N; ++i) L.rel[i * N + i] = 1;
  for (int k = 0; k <= std::min(max_level, B.dim()); ++k) {
    const auto& maps = site_homs(Site::Delta, n, k);
    for (std::size_t a = 0; a < maps.size(); ++a)
      for (std::size_t b = 0; b < maps.size(); ++b) {
        bool le = true;
        for (int t = 0; t <= n; ++t)
          if (maps[a].table[t] > maps[b].table[t]) le = false;
        if (!le || a == b) continue;
        for (int i = 0; i < B.count(k); ++i) {
          int u = idx.at(B.act(B.cell(k, i), maps[a])), v = idx.at(B.act(B.cell(k, i), maps[b]));
          L.rel[u * N + v] = 1;
        }
      }
  }
  for (int m = 0; m < N; ++m)
    for (int i = 0; i < N; ++i)
      if (L.rel[i * N + m])
        for (int j = 0; j < N; ++j)
          if (L.rel[m * N + j]) L.rel[i * N + j] = 1;
  return L;
}

}  // namespace dicube
