#pragma once
// Indexing categories: finite ordinals, the box site, its subdivided enlargement
// and the ambient category of monotone maps between finite preorders.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dicube {

// A product of finite ordinals, stored as the list of factor maxima.
// {n} is the ordinal [n]; {-1} is the empty ordinal; {} is the one-point product.
using Shape = std::vector<int>;

inline int shape_size(const Shape& s) {
  int n = 1;
  for (int f : s) n *= (f + 1);
  return n;
}

inline std::vector<int> decode(const Shape& s, int idx) {
  std::vector<int> c(s.size());
  for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
    c[i] = idx % (s[i] + 1);
    idx /= (s[i] + 1);
  }
  return c;
}

inline int encode(const Shape& s, const std::vector<int>& c) {
  int idx = 0;
  for (std::size_t i = 0; i < s.size(); ++i) idx = idx * (s[i] + 1) + c[i];
  return idx;
}

inline bool point_leq(const Shape& s, int a, int b) {
  for (int i = static_cast<int>(s.size()) - 1; i >= 0; --i) {
    int r = s[i] + 1;
    if (a % r > b % r) return false;
    a /= r;
    b /= r;
  }
  return true;
}

inline std::vector<char> order_matrix(const Shape& s) {
  int n = shape_size(s);
  std::vector<char> m(static_cast<std::size_t>(n) * n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) m[a * n + b] = point_leq(s, a, b);
  return m;
}

inline Shape concat(const Shape& a, const Shape& b) {
  Shape r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

inline Shape cube(int n) { return Shape(static_cast<std::size_t>(n), 1); }

// Drops [0] factors, the unit of the tensor.
inline Shape normalize_word(const Shape& w) {
  Shape r;
  for (int f : w)
    if (f != 0) r.push_back(f);
  return r;
}

struct MonotoneMap {
  Shape dom, cod;
  std::vector<int> table;

  int operator()(int p) const { return table[p]; }
  auto operator<=>(const MonotoneMap&) const = default;
};

inline MonotoneMap identity_map(const Shape& s) {
  MonotoneMap f{s, s, std::vector<int>(shape_size(s))};
  std::iota(f.table.begin(), f.table.end(), 0);
  return f;
}

inline MonotoneMap constant_map(const Shape& dom, const Shape& cod, int value) {
  return {dom, cod, std::vector<int>(shape_size(dom), value)};
}

inline bool is_identity(const MonotoneMap& f) {
  if (f.dom != f.cod) return false;
  for (std::size_t i = 0; i < f.table.size(); ++i)
    if (f.table[i] != static_cast<int>(i)) return false;
  return true;
}

// g after f
inline MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f) {
  if (f.cod != g.dom) throw std::invalid_argument("compose: codomain/domain mismatch");
  MonotoneMap h{f.dom, g.cod, std::vector<int>(f.table.size())};
  for (std::size_t i = 0; i < f.table.size(); ++i) h.table[i] = g.table[f.table[i]];
  return h;
}

inline MonotoneMap tensor(const MonotoneMap& f, const MonotoneMap& g) {
  MonotoneMap h{concat(f.dom, g.dom), concat(f.cod, g.cod), {}};
  int nf = shape_size(f.dom), ng = shape_size(g.dom), mg = shape_size(g.cod);
  h.table.resize(static_cast<std::size_t>(nf) * ng);
  for (int a = 0; a < nf; ++a)
    for (int b = 0; b < ng; ++b) h.table[a * ng + b] = f.table[a] * mg + g.table[b];
  return h;
}

inline bool is_monotone(const MonotoneMap& f) {
  int n = shape_size(f.dom);
  if (static_cast<int>(f.table.size()) != n) return false;
  int m = shape_size(f.cod);
  for (int v : f.table)
    if (v < 0 || v >= m) return false;
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (point_leq(f.dom, a, b) && !point_leq(f.cod, f.table[a], f.table[b])) return false;
  return true;
}

// Index offsets of the lower covers of each point (one step down in one coordinate).
inline std::vector<std::vector<int>> lower_covers(const Shape& s) {
  int n = shape_size(s);
  std::vector<std::vector<int>> cov(n);
  for (int p = 0; p < n; ++p) {
    auto c = decode(s, p);
    for (std::size_t i = 0; i < s.size(); ++i)
      if (c[i] > 0) {
        --c[i];
        cov[p].push_back(encode(s, c));
        ++c[i];
      }
  }
  return cov;
}

// Finite preorder on {0..n-1}.
struct Preorder {
  int n = 0;
  std::vector<char> rel;  // rel[a*n+b] iff a <= b
  std::vector<std::string> names;

  bool leq(int a, int b) const { return rel[static_cast<std::size_t>(a) * n + b]; }
  bool operator==(const Preorder& o) const { return n == o.n && rel == o.rel; }
};

inline Preorder preorder_of_shape(const Shape& s) {
  Preorder p;
  p.n = shape_size(s);
  p.rel = order_matrix(s);
  for (int i = 0; i < p.n; ++i) {
    std::string nm;
    for (int c : decode(s, i)) nm += std::to_string(c);
    p.names.push_back(nm.empty() ? "*" : nm);
  }
  return p;
}

inline Preorder discrete_preorder(int n) {
  Preorder p;
  p.n = n;
  p.rel.assign(static_cast<std::size_t>(n) * n, 0);
  for (int i = 0; i < n; ++i) p.rel[i * n + i] = 1;
  return p;
}

inline bool is_preorder(const Preorder& p) {
  for (int a = 0; a < p.n; ++a) {
    if (!p.leq(a, a)) return false;
    for (int b = 0; b < p.n; ++b)
      for (int c = 0; c < p.n; ++c)
        if (p.leq(a, b) && p.leq(b, c) && !p.leq(a, c)) return false;
  }
  return true;
}

// Pairs a <= b ordered pointwise: the preorder of monotone maps [1] -> P.
inline Preorder arrow_preorder(const Preorder& p, std::vector<std::pair<int, int>>* pairs = nullptr) {
  std::vector<std::pair<int, int>> pr;
  for (int a = 0; a < p.n; ++a)
    for (int b = 0; b < p.n; ++b)
      if (p.leq(a, b)) pr.emplace_back(a, b);
  Preorder q;
  q.n = static_cast<int>(pr.size());
  q.rel.assign(static_cast<std::size_t>(q.n) * q.n, 0);
  for (int i = 0; i < q.n; ++i)
    for (int j = 0; j < q.n; ++j)
      q.rel[i * q.n + j] = p.leq(pr[i].first, pr[j].first) && p.leq(pr[i].second, pr[j].second);
  if (pairs) *pairs = pr;
  return q;
}

// All monotone maps from a product of ordinals into a finite preorder, as value tables.
inline std::vector<std::vector<int>> monotone_maps_into(const Shape& dom, const Preorder& p) {
  std::vector<std::vector<int>> out;
  int n = shape_size(dom);
  if (n == 0) return {std::vector<int>{}};
  auto cov = lower_covers(dom);
  std::vector<int> t(n, 0);
  auto rec = [&](auto&& self, int i) -> void {
    if (i == n) {
      out.push_back(t);
      return;
    }
    for (int v = 0; v < p.n; ++v) {
      bool ok = true;
      for (int c : cov[i])
        if (!p.leq(t[c], v)) {
          ok = false;
          break;
        }
      if (!ok) continue;
      t[i] = v;
      self(self, i + 1);
    }
  };
  rec(rec, 0);
  return out;
}

inline std::vector<MonotoneMap> all_monotone_maps(const Shape& dom, const Shape& cod) {
  std::vector<MonotoneMap> out;
  for (auto& t : monotone_maps_into(dom, preorder_of_shape(cod))) out.push_back({dom, cod, std::move(t)});
  return out;
}

// ---- simplex category -------------------------------------------------------

inline Shape ordinal(int n) { return Shape{n}; }

inline int ordinal_max(const Shape& s) {
  if (s.size() != 1) throw std::invalid_argument("not an ordinal");
  return s[0];
}

// [m] + [n] = [m+n+1]; the empty ordinal is the unit.
inline MonotoneMap ordinal_sum(const MonotoneMap& f, const MonotoneMap& g) {
  int m = ordinal_max(f.dom), mp = ordinal_max(f.cod);
  int n = ordinal_max(g.dom), np = ordinal_max(g.cod);
  MonotoneMap h{ordinal(m + n + 1), ordinal(mp + np + 1), std::vector<int>(m + n + 2)};
  for (int k = 0; k <= m + n + 1; ++k)
    h.table[k] = k <= m ? f.table[k] : mp + 1 + g.table[k - m - 1];
  return h;
}

// Inclusion of [n] into [n]+[n] as the first (or, barred, the second) summand.
inline MonotoneMap gamma_delta(int n, bool barred) {
  MonotoneMap f{ordinal(n), ordinal(2 * n + 1), std::vector<int>(n + 1)};
  for (int i = 0; i <= n; ++i) f.table[i] = barred ? i + n + 1 : i;
  return f;
}

inline std::vector<MonotoneMap> delta_homs(int m, int n) {
  if (m < 0) return {MonotoneMap{ordinal(m), ordinal(n), {}}};
  return all_monotone_maps(ordinal(m), ordinal(n));
}

// ---- box site ---------------------------------------------------------------

// Each output coordinate is a constant (kConst0/kConst1) or an input index;
// input indices increase strictly from left to right.
struct BoxNF {
  static constexpr int kConst0 = -1;
  static constexpr int kConst1 = -2;
  int m = 0;
  std::vector<int> out;

  auto operator<=>(const BoxNF&) const = default;

  MonotoneMap to_map() const {
    int n = static_cast<int>(out.size());
    MonotoneMap f{cube(m), cube(n), std::vector<int>(1u << m)};
    for (int x = 0; x < (1 << m); ++x) {
      int y = 0;
      for (int j = 0; j < n; ++j) {
        int bit = out[j] == kConst0 ? 0 : out[j] == kConst1 ? 1 : (x >> (m - 1 - out[j])) & 1;
        y = 2 * y + bit;
      }
      f.table[x] = y;
    }
    return f;
  }
};

inline bool is_cube_shape(const Shape& s) {
  return std::all_of(s.begin(), s.end(), [](int f) { return f == 1; });
}

// Recovers the normal form of a map between cubes; nullopt when the map is not in the box site.
inline std::optional<BoxNF> box_nf_from_map(const MonotoneMap& f) {
  if (!is_cube_shape(f.dom) || !is_cube_shape(f.cod)) return std::nullopt;
  int m = static_cast<int>(f.dom.size()), n = static_cast<int>(f.cod.size());
  BoxNF nf{m, std::vector<int>(n)};
  int next = 0;
  for (int j = 0; j < n; ++j) {
    auto bit = [&](int x) { return (f.table[x] >> (n - 1 - j)) & 1; };
    bool c0 = true, c1 = true;
    for (int x = 0; x < (1 << m); ++x) {
      if (bit(x)) c0 = false;
      else c1 = false;
    }
    if (c0) {
      nf.out[j] = BoxNF::kConst0;
      continue;
    }
    if (c1) {
      nf.out[j] = BoxNF::kConst1;
      continue;
    }
    int found = -1;
    for (int i = next; i < m && found < 0; ++i) {
      bool same = true;
      for (int x = 0; x < (1 << m); ++x)
        if (bit(x) != ((x >> (m - 1 - i)) & 1)) {
          same = false;
          break;
        }
      if (same) found = i;
    }
    if (found < 0) return std::nullopt;
    nf.out[j] = found;
    next = found + 1;
  }
  if (nf.to_map() != f) return std::nullopt;
  return nf;
}

inline std::vector<BoxNF> box_nf_homs(int m, int n) {
  std::vector<BoxNF> out;
  BoxNF cur{m, std::vector<int>(n)};
  auto rec = [&](auto&& self, int j, int next) -> void {
    if (j == n) {
      out.push_back(cur);
      return;
    }
    cur.out[j] = BoxNF::kConst0;
    self(self, j + 1, next);
    cur.out[j] = BoxNF::kConst1;
    self(self, j + 1, next);
    for (int i = next; i < m; ++i) {
      cur.out[j] = i;
      self(self, j + 1, i + 1);
    }
  };
  rec(rec, 0, 0);
  return out;
}

inline std::vector<MonotoneMap> box_homs(int m, int n) {
  std::vector<MonotoneMap> out;
  for (auto& nf : box_nf_homs(m, n)) out.push_back(nf.to_map());
  std::sort(out.begin(), out.end());
  return out;
}

// The unique injective box map hitting lo at the bottom corner and hi at the top corner.
inline BoxNF subcube_inclusion(const std::vector<int>& lo, const std::vector<int>& hi) {
  if (lo.size() != hi.size()) throw std::invalid_argument("subcube_inclusion: size mismatch");
  BoxNF nf;
  nf.out.resize(lo.size());
  for (std::size_t j = 0; j < lo.size(); ++j) {
    if (lo[j] > hi[j]) throw std::invalid_argument("subcube_inclusion: corners not ordered");
    if (lo[j] == hi[j]) nf.out[j] = lo[j] ? BoxNF::kConst1 : BoxNF::kConst0;
    else nf.out[j] = nf.m++;
  }
  return nf;
}

// ---- the subdivided box site ------------------------------------------------

// Monotone maps [a] -> [b] (a, b <= 2) that never jump by 2 along an edge.
inline std::vector<std::vector<int>> boxplus_factor_maps(int a, int b) {
  std::vector<std::vector<int>> out;
  for (auto& f : all_monotone_maps(ordinal(a), ordinal(b))) {
    bool ok = true;
    for (int i = 0; i < a; ++i)
      if (f.table[i + 1] - f.table[i] > 1) ok = false;
    if (ok) out.push_back(f.table);
  }
  return out;
}

struct SizeCapExceeded : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline constexpr int kDefaultBoxPlusCap = 4;

inline void check_boxplus_word(const Shape& w, int cap) {
  for (int f : w)
    if (f < 0 || f > 2) throw std::invalid_argument("subdivided-box word factors must lie in {0,1,2}");
  if (static_cast<int>(normalize_word(w).size()) > cap) throw SizeCapExceeded("subdivided-box word exceeds size cap");
}

// Enumerates maps between words factor by factor: every output coordinate is a constant
// or a jump-free monotone function of one input coordinate, input coordinates used in
// increasing order.  This coincides with the closure of the single-factor generators
// under composition and tensor (see boxplus_generator_closure).
inline std::vector<MonotoneMap> boxplus_homs(const Shape& w, const Shape& v, int cap = kDefaultBoxPlusCap) {
  check_boxplus_word(w, cap);
  check_boxplus_word(v, cap);
  int m = static_cast<int>(w.size()), n = static_cast<int>(v.size());
  // choice per output coordinate: (input index or -1, factor table)
  std::vector<std::pair<int, std::vector<int>>> choice(n);
  std::vector<MonotoneMap> out;
  int np = shape_size(w);
  auto rec = [&](auto&& self, int j, int next) -> void {
    if (j == n) {
      MonotoneMap f{w, v, std::vector<int>(np)};
      for (int x = 0; x < np; ++x) {
        auto c = decode(w, x);
        std::vector<int> y(n);
        for (int k = 0; k < n; ++k)
          y[k] = choice[k].first < 0 ? choice[k].second[0] : choice[k].second[c[choice[k].first]];
        f.table[x] = encode(v, y);
      }
      out.push_back(std::move(f));
      return;
    }
    for (int c = 0; c <= v[j]; ++c) {
      choice[j] = {-1, {c}};
      self(self, j + 1, next);
    }
    for (int i = next; i < m; ++i)
      for (auto& g : boxplus_factor_maps(w[i], v[j])) {
        if (std::all_of(g.begin(), g.end(), [&](int t) { return t == g[0]; })) continue;
        choice[j] = {i, g};
        self(self, j + 1, i + 1);
      }
  };
  rec(rec, 0, 0);
  std::sort(out.begin(), out.end());
  return out;
}

inline bool in_boxplus(const MonotoneMap& f) {
  for (int x : f.dom)
    if (x < 0 || x > 2) return false;
  for (int x : f.cod)
    if (x < 0 || x > 2) return false;
  auto homs = boxplus_homs(f.dom, f.cod, static_cast<int>(std::max(f.dom.size(), f.cod.size())));
  return std::binary_search(homs.begin(), homs.end(), f);
}

// Fixpoint closure of the single-factor generators under composition and tensor,
// over all [0]-free words of length <= max_len.
inline std::map<std::pair<Shape, Shape>, std::set<MonotoneMap>> boxplus_generator_closure(int max_len) {
  std::vector<Shape> words{Shape{}};
  for (int len = 1; len <= max_len; ++len) {
    std::vector<Shape> next;
    for (auto& w : words)
      if (static_cast<int>(w.size()) == len - 1)
        for (int f : {1, 2}) {
          Shape x = w;
          x.push_back(f);
          next.push_back(x);
        }
    words.insert(words.end(), next.begin(), next.end());
  }
  std::map<std::pair<Shape, Shape>, std::set<MonotoneMap>> hom;
  for (auto& a : words)
    for (auto& b : words) hom[{a, b}];
  auto factor_shape = [](int a) { return a == 0 ? Shape{} : Shape{a}; };
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (auto& t : boxplus_factor_maps(a, b)) hom[{factor_shape(a), factor_shape(b)}].insert({factor_shape(a), factor_shape(b), t});
  for (auto& w : words) hom[{w, w}].insert(identity_map(w));
  bool grew = true;
  while (grew) {
    grew = false;
    std::vector<std::pair<std::pair<Shape, Shape>, std::vector<MonotoneMap>>> snapshot;
    for (auto& [k, s] : hom) snapshot.push_back({k, std::vector<MonotoneMap>(s.begin(), s.end())});
    for (auto& [k1, s1] : snapshot)
      for (auto& [k2, s2] : snapshot) {
        bool composable = k1.second == k2.first;
        bool tensorable = k1.first.size() + k2.first.size() <= static_cast<std::size_t>(max_len) &&
                          k1.second.size() + k2.second.size() <= static_cast<std::size_t>(max_len);
        if (!composable && !tensorable) continue;
        for (auto& f : s1)
          for (auto& g : s2) {
            if (composable && hom[{k1.first, k2.second}].insert(compose(g, f)).second) grew = true;
            if (tensorable && hom[{concat(k1.first, k2.first), concat(k1.second, k2.second)}].insert(tensor(f, g)).second)
              grew = true;
          }
      }
  }
  return hom;
}

// The subdivision functor from the box site: [1] becomes [2], faces land on 0 and 2.
inline Shape sdf_object(const Shape& w) {
  Shape r;
  for (int f : w) {
    if (f != 0 && f != 1) throw std::invalid_argument("sdf_object: input is not a box word");
    r.push_back(2 * f);
  }
  return r;
}

inline MonotoneMap sdf_morphism(const BoxNF& nf) {
  Shape dom = sdf_object(cube(nf.m)), cod = sdf_object(cube(static_cast<int>(nf.out.size())));
  MonotoneMap f{dom, cod, std::vector<int>(shape_size(dom))};
  for (int x = 0; x < shape_size(dom); ++x) {
    auto c = decode(dom, x);
    std::vector<int> y(nf.out.size());
    for (std::size_t j = 0; j < nf.out.size(); ++j)
      y[j] = nf.out[j] == BoxNF::kConst0 ? 0 : nf.out[j] == BoxNF::kConst1 ? 2 : c[nf.out[j]];
    f.table[x] = encode(cod, y);
  }
  return f;
}

inline MonotoneMap sdf_morphism(const MonotoneMap& f) {
  auto nf = box_nf_from_map(f);
  if (!nf) throw std::invalid_argument("sdf_morphism: input is not a box morphism");
  return sdf_morphism(*nf);
}

// Components [2]^n -> [1]^n: per factor max(1,x)-1, or min(x,1) when barred.
inline MonotoneMap gamma_box(int n, bool barred) {
  Shape dom(static_cast<std::size_t>(n), 2), cod = cube(n);
  MonotoneMap f{dom, cod, std::vector<int>(shape_size(dom))};
  for (int x = 0; x < shape_size(dom); ++x) {
    auto c = decode(dom, x);
    for (auto& t : c) t = barred ? std::min(t, 1) : std::max(1, t) - 1;
    f.table[x] = encode(cod, c);
  }
  return f;
}

// Doubling cube(n) -> [2]^n, i -> 2i.
inline MonotoneMap doubling(int n) {
  Shape dom = cube(n), cod(static_cast<std::size_t>(n), 2);
  MonotoneMap f{dom, cod, std::vector<int>(shape_size(dom))};
  for (int x = 0; x < shape_size(dom); ++x) {
    auto c = decode(dom, x);
    for (auto& t : c) t *= 2;
    f.table[x] = encode(cod, c);
  }
  return f;
}

enum class HomSite { Delta, Box, BoxPlus, Q };

inline std::vector<MonotoneMap> hom_set(HomSite site, const Shape& a, const Shape& b, int cap = kDefaultBoxPlusCap) {
  switch (site) {
    case HomSite::Delta:
      return delta_homs(ordinal_max(a), ordinal_max(b));
    case HomSite::Box:
      if (!is_cube_shape(a) || !is_cube_shape(b)) throw std::invalid_argument("hom_set: box objects are cubes");
      return box_homs(static_cast<int>(a.size()), static_cast<int>(b.size()));
    case HomSite::BoxPlus:
      return boxplus_homs(a, b, cap);
    case HomSite::Q:
      return all_monotone_maps(a, b);
  }
  return {};
}

}  // namespace dicube
