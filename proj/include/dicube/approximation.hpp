#pragma once
// Points of realizations in simplex charts, the lattice order on a simplex, piecewise linear
// vertex maps, and combinatorial approximations of them (simplicial, cubical, and through ex
// for nerves).

#include <dicube/generate.hpp>

#include <Eigen/Dense>

#include <random>

namespace dicube {

inline constexpr double kTolerance = 1e-9;

using Bary = std::vector<double>;

inline void check_bary(const Bary& x) {
  double s = 0;
  for (double v : x) {
    if (v < -kTolerance) throw std::invalid_argument("barycentric coordinate is negative");
    s += v;
  }
  if (x.empty() || std::abs(s - 1) > kTolerance) throw std::invalid_argument("barycentric coordinates do not sum to 1");
}

inline Bary vertex_point(int n, int i) {
  Bary x(n + 1, 0.0);
  x[i] = 1;
  return x;
}

// The realized join and meet of a simplex act on cumulative sums F(k) = x_0 + ... + x_k:
// the join takes the pointwise min of F, the meet the max.
namespace detail {
inline Bary cumulative(const Bary& x) {
  Bary F(x.size());
  std::partial_sum(x.begin(), x.end(), F.begin());
  return F;
}
inline Bary from_cumulative(const Bary& F) {
  Bary x(F.size());
  std::adjacent_difference(F.begin(), F.end(), x.begin());
  return x;
}
inline Bary combine(const Bary& x, const Bary& y, bool join) {
  check_bary(x);
  check_bary(y);
  if (x.size() != y.size()) throw std::invalid_argument("points of different simplices");
  Bary F = cumulative(x), G = cumulative(y);
  for (std::size_t k = 0; k < F.size(); ++k) F[k] = join ? std::min(F[k], G[k]) : std::max(F[k], G[k]);
  return from_cumulative(F);
}
}  // namespace detail

inline Bary simplex_join(const Bary& x, const Bary& y) { return detail::combine(x, y, true); }
inline Bary simplex_meet(const Bary& x, const Bary& y) { return detail::combine(x, y, false); }

// Coordinatewise bilinear extension of max on vertices; agrees with simplex_join on vertices
// and on chains of two, but is not idempotent.
inline Bary bilinear_join(const Bary& x, const Bary& y) {
  Bary z(x.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = 0; j < y.size(); ++j) z[std::max(i, j)] += x[i] * y[j];
  return z;
}

inline bool bary_close(const Bary& x, const Bary& y, double tol = kTolerance) {
  if (x.size() != y.size()) return false;
  for (std::size_t i = 0; i < x.size(); ++i)
    if (std::abs(x[i] - y[i]) > tol) return false;
  return true;
}

// x <= y: y carries at least as much mass above every vertex
inline bool simplex_leq(const Bary& x, const Bary& y, double tol = kTolerance) {
  Bary F = detail::cumulative(x), G = detail::cumulative(y);
  for (std::size_t k = 0; k < F.size(); ++k)
    if (G[k] > F[k] + tol) return false;
  return true;
}

// Index of the lowest vertex carrying mass.
inline int min_support_index(const Bary& x, double tol = kTolerance) {
  for (std::size_t i = 0; i < x.size(); ++i)
    if (x[i] > tol) return static_cast<int>(i);
  throw std::invalid_argument("min_support_index: no mass");
}

// A point of |X| as the open simplex containing it.
struct GeomPoint {
  Cell cell;
  Bary coords;
};

// Normal form of the point with the given coordinates on a (possibly degenerate) simplex.
inline GeomPoint carrier(const Presheaf& X, const Cell& sigma, const Bary& coords, double tol = kTolerance) {
  check_bary(coords);
  std::vector<int> support;
  for (std::size_t i = 0; i < coords.size(); ++i)
    if (coords[i] > tol) support.push_back(static_cast<int>(i));
  int m = static_cast<int>(support.size()) - 1;
  Cell face = X.act(sigma, MonotoneMap{ordinal(m), ordinal(sigma.level), support});
  GeomPoint p{nondeg(X.site, face.dim, face.id), Bary(face.dim + 1, 0.0)};
  for (int j = 0; j <= m; ++j) p.coords[face.degen[j]] += coords[support[j]];
  return p;
}

inline bool same_point(const GeomPoint& a, const GeomPoint& b, double tol = kTolerance) {
  return a.cell == b.cell && bary_close(a.coords, b.coords, tol);
}

// The lowest vertex of the carrier of x.
inline int min_support_vertex(const Presheaf& X, const GeomPoint& x) { return X.vertices_of(x.cell).front().id; }

// Vertices of sd^k Delta[n] placed in Delta[n]: a vertex of sd Y is an edge of Y and sits at
// the midpoint of its ends.
inline std::vector<Bary> phi_positions(const SdTower& T) {
  const Presheaf& B = T.at(0);
  if (B.site != Site::Delta || B.count(B.dim()) != 1) throw std::invalid_argument("phi_positions: a simplex is required");
  int n = B.dim();
  std::vector<Bary> pos(B.count(0));
  for (int v = 0; v < B.count(0); ++v) pos[v] = vertex_point(n, v);
  for (int j = 1; j <= T.depth(); ++j) {
    const Subdivided& S = T.step(j);
    std::vector<Bary> next(S.P.count(0));
    for (int u = 0; u < S.P.count(0); ++u) {
      auto ends = T.at(j - 1).vertices_of(S.simplicial_key[0][u]);
      next[u] = Bary(n + 1);
      for (int i = 0; i <= n; ++i) next[u][i] = 0.5 * pos[ends[0].id][i] + 0.5 * pos[ends[1].id][i];
    }
    pos = std::move(next);
  }
  return pos;
}

// ---- piecewise linear vertex maps ---------------------------------------------------

// Images of the vertices of one source simplex, in one closed target simplex.
struct Chart {
  Cell target;
  std::vector<Bary> images;
};

struct PLVertexMap {
  const Presheaf* source = nullptr;  // simplicial
  const Presheaf* target = nullptr;  // simplicial
  std::vector<GeomPoint> vertex_image;
  std::vector<std::vector<Chart>> chart;  // per nondegenerate source simplex
};

inline std::optional<std::string> check_pl_map(const PLVertexMap& f) {
  const Presheaf& S = *f.source;
  const Presheaf& X = *f.target;
  if (S.site != Site::Delta || X.site != Site::Delta) return "pl map: simplicial source and target required";
  for (int k = 0; k < S.levels(); ++k)
    for (int i = 0; i < S.count(k); ++i) {
      const Chart& c = f.chart[k][i];
      auto vs = S.vertices_of(S.cell(k, i));
      if (static_cast<int>(c.images.size()) != k + 1) return "pl map: chart of cell " + std::to_string(k) + ":" + std::to_string(i) + " has wrong size";
      for (int j = 0; j <= k; ++j) {
        if (!same_point(carrier(X, c.target, c.images[j]), f.vertex_image[vs[j].id]))
          return "pl map: chart of cell " + std::to_string(k) + ":" + std::to_string(i) + " disagrees at vertex " + std::to_string(j);
        if (j > 0 && !simplex_leq(c.images[j - 1], c.images[j]))
          return "pl map: chart of cell " + std::to_string(k) + ":" + std::to_string(i) + " is not order preserving";
      }
    }
  return std::nullopt;
}

// Charts of lower simplices are restricted from the top ones containing them.
inline PLVertexMap pl_map_from_top_charts(const Presheaf& S, const Presheaf& X, const std::vector<GeomPoint>& vertex_image,
                                          const std::vector<Chart>& top) {
  PLVertexMap f{&S, &X, vertex_image, {}};
  f.chart.resize(S.levels());
  for (int k = 0; k < S.levels(); ++k) f.chart[k].resize(S.count(k));
  int d = S.dim();
  std::vector<std::vector<char>> done(S.levels());
  for (int k = 0; k < S.levels(); ++k) done[k].assign(S.count(k), 0);
  for (int i = 0; i < S.count(d); ++i) {
    f.chart[d][i] = top.at(i);
    done[d][i] = 1;
  }
  for (int k = d; k >= 1; --k)
    for (int i = 0; i < S.count(k); ++i)
      for (int j = 0; j <= k; ++j) {
        Cell fc = S.face(S.cell(k, i), j);
        if (fc.degenerate() || done[k - 1][fc.id]) continue;
        Chart c{f.chart[k][i].target, {}};
        for (int t = 0; t <= k; ++t)
          if (t != j) c.images.push_back(f.chart[k][i].images[t]);
        f.chart[k - 1][fc.id] = c;
        done[k - 1][fc.id] = 1;
      }
  return f;
}

// The same map on sd S: a vertex of sd S is an edge of S and goes to the midpoint of its image.
inline PLVertexMap subdivide_pl_map(const PLVertexMap& f, const Subdivided& sdS) {
  const Presheaf& X = *f.target;
  auto image_in_chart = [&](const Cell& tau) {
    // a cell of S at odd level 2m+1, read through the chart of its base simplex
    const Chart& c = f.chart[tau.dim][tau.id];
    int m = (tau.level - 1) / 2;
    std::vector<Bary> out;
    for (int j = 0; j <= m; ++j) {
      const Bary& lo = c.images[tau.degen[j]];
      const Bary& hi = c.images[tau.degen[m + 1 + j]];
      Bary mid(lo.size());
      for (std::size_t t = 0; t < lo.size(); ++t) mid[t] = 0.5 * lo[t] + 0.5 * hi[t];
      out.push_back(mid);
    }
    return std::pair<Cell, std::vector<Bary>>{c.target, out};
  };
  PLVertexMap g{&sdS.P, &X, {}, {}};
  g.chart.resize(sdS.P.levels());
  for (int k = 0; k < sdS.P.levels(); ++k)
    for (int i = 0; i < sdS.P.count(k); ++i) {
      auto [t, imgs] = image_in_chart(sdS.simplicial_key[k][i]);
      g.chart[k].push_back({t, imgs});
      if (k == 0) g.vertex_image.push_back(carrier(X, t, imgs[0]));
    }
  return g;
}

struct StarReport {
  bool satisfied = true;
  std::vector<std::vector<int>> witness;  // per source simplex: a target vertex, or -1
  std::string obstruction;
};

// The image of a simplex lies in the open star of v iff v spans every vertex image's carrier.
inline StarReport star_condition(const PLVertexMap& f) {
  const Presheaf& S = *f.source;
  const Presheaf& X = *f.target;
  StarReport r;
  r.witness.resize(S.levels());
  for (int k = 0; k < S.levels(); ++k)
    for (int i = 0; i < S.count(k); ++i) {
      std::set<int> common;
      bool first = true;
      for (auto& v : S.vertices_of(S.cell(k, i))) {
        std::set<int> here;
        for (auto& w : X.vertices_of(f.vertex_image[v.id].cell)) here.insert(w.id);
        if (first) common = here;
        else {
          std::set<int> both;
          std::set_intersection(common.begin(), common.end(), here.begin(), here.end(), std::inserter(both, both.end()));
          common = both;
        }
        first = false;
      }
      r.witness[k].push_back(common.empty() ? -1 : *common.begin());
      if (common.empty() && r.satisfied) {
        r.satisfied = false;
        r.obstruction = "simplex " + std::to_string(k) + ":" + std::to_string(i) + " meets no common open vertex star";
      }
    }
  return r;
}

struct SimplicialApproximation {
  int k = 0;                     // subdivisions used
  std::shared_ptr<SdTower> tower;  // sd^j of the source
  PLVertexMap subdivided;        // f on sd^k source
  Morphism psi;                  // sd^k source -> target
  bool valid = false;            // psi is a simplicial map
  bool below_f = false;          // |psi| <= f chart-wise, so the straight line is a directed homotopy
  std::string error;
};

// psi on sd^k S: each vertex goes to the lowest vertex of its image's carrier.
inline Morphism vertex_rule(const PLVertexMap& f, std::string* error = nullptr) {
  const Presheaf& S = *f.source;
  const Presheaf& X = *f.target;
  Morphism psi;
  psi.map.resize(S.levels());
  for (int k = 0; k < S.levels(); ++k)
    for (int i = 0; i < S.count(k); ++i) {
      const Chart& c = f.chart[k][i];
      std::vector<int> table;
      for (auto& x : c.images) table.push_back(min_support_index(x));
      MonotoneMap m{ordinal(k), ordinal(c.target.level), table};
      if (!is_monotone(m)) {
        if (error) *error = "vertex rule is not monotone on simplex " + std::to_string(k) + ":" + std::to_string(i);
        return {};
      }
      psi.map[k].push_back(X.act(c.target, m));
    }
  return psi;
}

// Subdivides until the star condition holds (at most max_k times), then applies the vertex rule.
inline SimplicialApproximation simplicial_approximation(const PLVertexMap& f, int max_k = 6) {
  SimplicialApproximation A;
  if (auto err = check_pl_map(f)) {
    A.error = *err;
    return A;
  }
  A.tower = std::make_shared<SdTower>(*f.source, 0);
  PLVertexMap cur = f;
  for (A.k = 0;; ++A.k) {
    if (star_condition(cur).satisfied) break;
    if (A.k == max_k) {
      A.error = "star condition not reached within " + std::to_string(max_k) + " subdivisions";
      return A;
    }
    A.tower = std::make_shared<SdTower>(*f.source, A.k + 1);
    // recompute from f so every chart refers to the current tower
    cur = f;
    for (int j = 1; j <= A.k + 1; ++j) {
      cur = subdivide_pl_map(cur, A.tower->step(j));
      cur.source = &A.tower->at(j);
    }
  }
  A.subdivided = cur;
  A.subdivided.source = &A.tower->at(A.k);
  std::string err;
  A.psi = vertex_rule(A.subdivided, &err);
  if (!err.empty()) {
    A.error = err;
    return A;
  }
  A.valid = !check_morphism(A.psi, *A.subdivided.source, *f.target);
  A.below_f = true;
  const Presheaf& S = *A.subdivided.source;
  for (int k = 0; k < S.levels() && A.below_f; ++k)
    for (int i = 0; i < S.count(k) && A.below_f; ++i) {
      const Chart& c = A.subdivided.chart[k][i];
      for (auto& x : c.images)
        if (!simplex_leq(vertex_point(c.target.level, min_support_index(x)), x)) A.below_f = false;
    }
  return A;
}

// The simplex of X with the given vertex values, when there is one.
inline std::optional<Cell> find_simplex(const Presheaf& X, const std::vector<int>& values) {
  std::vector<int> base, degen;
  for (int v : values) {
    if (base.empty() || base.back() != v) base.push_back(v);
    degen.push_back(static_cast<int>(base.size()) - 1);
  }
  int d = static_cast<int>(base.size()) - 1;
  if (d >= X.levels()) return std::nullopt;
  for (int i = 0; i < X.count(d); ++i) {
    auto vs = X.vertices_of(X.cell(d, i));
    bool match = true;
    for (int j = 0; j <= d && match; ++j) match = vs[j].id == base[j];
    if (match) return X.act(X.cell(d, i), MonotoneMap{ordinal(static_cast<int>(values.size()) - 1), ordinal(d), degen});
  }
  return std::nullopt;
}

// Vertex positions in R^d under which every top simplex of X is affinely embedded.
struct Embedding {
  const Presheaf* X = nullptr;
  std::vector<std::vector<double>> pos;

  int top() const { return X->dim(); }
  std::vector<double> point(const Cell& sigma, const Bary& x) const {
    std::vector<double> q(pos.front().size(), 0.0);
    auto vs = X->vertices_of(sigma);
    for (std::size_t j = 0; j < vs.size(); ++j)
      for (std::size_t c = 0; c < q.size(); ++c) q[c] += x[j] * pos[vs[j].id][c];
    return q;
  }
  // cached per top simplex: vertex ids and the solve for barycentric coordinates
  struct Frame {
    std::vector<int> vs;
    Eigen::MatrixXd A, pinv;
  };
  std::vector<Frame> frames;

  void prepare() {
    frames.clear();
    for (int i = 0; i < X->count(top()); ++i) {
      Frame F;
      for (auto& v : X->vertices_of(X->cell(top(), i))) F.vs.push_back(v.id);
      int n = static_cast<int>(F.vs.size()) - 1, d = static_cast<int>(pos.front().size());
      F.A.resize(d, n);
      for (int c = 0; c < d; ++c)
        for (int j = 1; j <= n; ++j) F.A(c, j - 1) = pos[F.vs[j]][c] - pos[F.vs[0]][c];
      F.pinv = F.A.completeOrthogonalDecomposition().pseudoInverse();
      frames.push_back(std::move(F));
    }
  }
  // barycentric coordinates of q in a top simplex, if q lies in its closure
  std::optional<Bary> coordinates(const Cell& sigma, const std::vector<double>& q, double tol = kTolerance) const {
    if (frames.empty()) throw std::logic_error("Embedding: prepare() not called");
    const Frame& F = frames.at(sigma.id);
    int n = static_cast<int>(F.vs.size()) - 1, d = static_cast<int>(q.size());
    Eigen::VectorXd b(d);
    for (int c = 0; c < d; ++c) b(c) = q[c] - pos[F.vs[0]][c];
    Eigen::VectorXd lam = F.pinv * b;
    if ((F.A * lam - b).norm() > 1e-7) return std::nullopt;
    Bary x(n + 1);
    x[0] = 1 - lam.sum();
    for (int j = 1; j <= n; ++j) x[j] = lam(j - 1);
    for (double& v : x) {
      if (v < -tol) return std::nullopt;
      v = std::max(v, 0.0);
    }
    double sum = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v /= sum;
    return x;
  }
  std::vector<Cell> tops_containing(const std::vector<double>& q) const {
    std::vector<Cell> out;
    for (int i = 0; i < X->count(top()); ++i)
      if (coordinates(X->cell(top(), i), q)) out.push_back(X->cell(top(), i));
    return out;
  }
  std::optional<GeomPoint> locate(const std::vector<double>& q) const {
    for (auto& t : tops_containing(q)) return carrier(*X, t, *coordinates(t, q));
    return std::nullopt;
  }
};

// Positions of the triangulation of a complex with integer vertex positions.
inline Embedding embed_triangulation(const Complex& A, const Extension& triA) {
  Embedding E;
  E.X = &triA.C.P;
  E.pos.assign(triA.C.P.count(0), {});
  for (int v = 0; v < A.P.count(0); ++v) {
    int t = triA.C.incl[triA.piece_of[0][v]].map[0][0].id;
    E.pos[t].assign(A.position[v].begin(), A.position[v].end());
  }
  E.prepare();
  return E;
}

// Closed-simplex chart holding two points, with the first below the second in it.
inline std::optional<Chart> common_chart(const Embedding& E, const std::vector<double>& p, const std::vector<double>& q) {
  for (auto& t : E.tops_containing(p)) {
    auto y = E.coordinates(t, q);
    if (!y) continue;
    Bary x = *E.coordinates(t, p);
    if (simplex_leq(x, *y)) return Chart{t, {x, *y}};
  }
  return std::nullopt;
}

inline bool share_vertex(const Presheaf& X, const GeomPoint& a, const GeomPoint& b) {
  for (auto& u : X.vertices_of(a.cell))
    for (auto& v : X.vertices_of(b.cell))
      if (u.id == v.id) return true;
  return false;
}

// A random PL map from the edge path S (vertices listed in order) to |X| from `from` to `to`:
// consecutive images lie ordered in a closed top simplex and meet a common open vertex star.
// Each step moves at most one unit per coordinate.
inline std::optional<PLVertexMap> sample_pl_path(const Presheaf& S, const std::vector<int>& order, const Embedding& E,
                                                 const std::vector<double>& from, const std::vector<double>& to,
                                                 std::mt19937& rng, long budget = 4000) {
  const Presheaf& X = *E.X;
  int n = static_cast<int>(order.size());
  std::vector<std::vector<double>> pts(n);
  std::vector<GeomPoint> img(n);
  std::vector<Chart> charts(n > 0 ? n - 1 : 0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto random_in = [&](const Cell& t) {
    auto vs = X.vertices_of(t);
    Bary x(vs.size());
    int mode = std::uniform_int_distribution<int>(0, 3)(rng);
    // open simplex, an open edge, or a vertex of t
    std::vector<int> keep(vs.size());
    std::iota(keep.begin(), keep.end(), 0);
    std::shuffle(keep.begin(), keep.end(), rng);
    std::size_t used = mode == 0 ? 1 : mode == 1 ? std::min<std::size_t>(2, vs.size()) : vs.size();
    for (std::size_t j = 0; j < used; ++j) x[keep[j]] = -std::log(1 - unit(rng));
    double sum = std::accumulate(x.begin(), x.end(), 0.0);
    for (double& v : x) v /= sum;
    return E.point(t, x);
  };
  auto reachable = [&](const std::vector<double>& q, int steps_left) {
    for (std::size_t c = 0; c < q.size(); ++c)
      if (to[c] - q[c] > steps_left + kTolerance || q[c] > to[c] + kTolerance) return false;
    return true;
  };
  auto rec = [&](auto&& self, int i) -> bool {
    if (i == n) return true;
    int samples = i == n - 1 ? 1 : 24;
    for (int t = 0; t < samples && budget > 0; ++t, --budget) {
      if (i == n - 1) pts[i] = to;
      else if (t % 2) {
        auto tops = E.tops_containing(pts[i - 1]);
        pts[i] = random_in(tops[std::uniform_int_distribution<std::size_t>(0, tops.size() - 1)(rng)]);
      } else {
        // a short step up, sometimes snapped to whole units
        pts[i] = pts[i - 1];
        for (double& c : pts[i]) {
          double d = unit(rng);
          c += unit(rng) < 0.3 ? std::round(d) : d;
        }
      }
      if (!reachable(pts[i], n - 1 - i)) continue;
      auto loc = E.locate(pts[i]);
      if (!loc || !share_vertex(X, img[i - 1], *loc)) continue;
      auto c = common_chart(E, pts[i - 1], pts[i]);
      if (!c) continue;
      img[i] = *loc;
      charts[i - 1] = *c;
      if (self(self, i + 1)) return true;
    }
    return false;
  };
  pts[0] = from;
  auto start = E.locate(from);
  if (!start) return std::nullopt;
  img[0] = *start;
  if (n > 1 && !rec(rec, 1)) return std::nullopt;

  std::vector<GeomPoint> vertex_image(S.count(0));
  for (int i = 0; i < n; ++i) vertex_image[order[i]] = img[i];
  std::vector<Chart> top(S.count(1));
  for (int e = 0; e < S.count(1); ++e) {
    auto vs = S.vertices_of(S.cell(1, e));
    int i = static_cast<int>(std::find(order.begin(), order.end(), vs[0].id) - order.begin());
    if (i + 1 >= n || order[i + 1] != vs[1].id) throw std::invalid_argument("sample_pl_path: order is not the edge path");
    top[e] = charts[i];
  }
  PLVertexMap f = pl_map_from_top_charts(S, X, vertex_image, top);
  for (int v = 0; v < S.count(0); ++v) f.chart[0][v] = Chart{vertex_image[v].cell, {vertex_image[v].coords}};
  return f;
}

// The vertex of the carrier of each image nearest to it: a vertex path joined to f by straight
// lines inside carriers.
inline std::vector<int> nearest_vertex_path(const Embedding& E, const PLVertexMap& f, const std::vector<int>& order) {
  std::vector<int> out;
  for (int v : order) {
    const GeomPoint& p = f.vertex_image[v];
    auto q = E.point(p.cell, p.coords);
    int best = -1;
    double bd = 1e300;
    for (auto& u : E.X->vertices_of(p.cell)) {
      double d = 0;
      for (std::size_t c = 0; c < q.size(); ++c) d += (q[c] - E.pos[u.id][c]) * (q[c] - E.pos[u.id][c]);
      if (d < bd - kTolerance) {
        bd = d;
        best = u.id;
      }
    }
    out.push_back(best);
  }
  return out;
}

// The simplicial map of an edge path S (vertices in order) tracing the vertex path w.
inline std::optional<Morphism> path_map(const Presheaf& S, const std::vector<int>& order, const Presheaf& X, const std::vector<int>& w) {
  std::vector<int> value(S.count(0));
  for (std::size_t i = 0; i < order.size(); ++i) value[order[i]] = w[i];
  Morphism m;
  m.map.resize(S.levels());
  for (int k = 0; k < S.levels(); ++k)
    for (int i = 0; i < S.count(k); ++i) {
      std::vector<int> vals;
      for (auto& v : S.vertices_of(S.cell(k, i))) vals.push_back(value[v.id]);
      auto c = find_simplex(X, vals);
      if (!c) return std::nullopt;
      m.map[k].push_back(*c);
    }
  return m;
}

// ---- through triangulation and ex ----------------------------------------------------

// The cubical map B -> qua X adjoint to h: tri B -> X.
inline Morphism transpose_to_qua(const Presheaf& B, const Extension& triB, const Qua& Q, const Morphism& h) {
  Morphism m;
  m.map.resize(std::min(B.levels(), Q.max_dim + 1));
  for (int k = 0; k < static_cast<int>(m.map.size()); ++k)
    for (int i = 0; i < B.count(k); ++i) m.map[k].push_back(Q.cell_for(compose(h, triB.C.incl[triB.piece_of[k][i]]), k));
  return m;
}

struct CubicalApproximation {
  int k = 0;
  std::shared_ptr<SdTower> tower;  // cubical sd^j of the source
  Extension tri_source;            // tri sd^k C
  Morphism simplicial;             // tri sd^k C -> X
  Morphism psi;                    // sd^k C -> qua X
  bool valid = false;
  std::string error;
};

// f is given on tri C; subdivisions happen on the cubical side, where the vertices of
// tri sd C are the vertices of sd C and sit at the midpoints of the edges of C.
inline CubicalApproximation cubical_approximation(const Presheaf& C, const std::function<PLVertexMap(const Presheaf&, const Presheaf&)>& f_on,
                                                  const Qua& Q, int max_k = 4) {
  CubicalApproximation A;
  for (A.k = 0; A.k <= max_k; ++A.k) {
    A.tower = std::make_shared<SdTower>(C, A.k);
    A.tri_source = triangulate(A.tower->at(A.k));
    PLVertexMap f = f_on(A.tower->at(A.k), A.tri_source.C.P);
    if (auto err = check_pl_map(f)) {
      A.error = *err;
      return A;
    }
    if (!star_condition(f).satisfied) continue;
    std::string err;
    A.simplicial = vertex_rule(f, &err);
    if (!err.empty()) {
      A.error = err;
      return A;
    }
    if (check_morphism(A.simplicial, A.tri_source.C.P, *Q.X)) {
      A.error = "vertex rule does not give a simplicial map";
      return A;
    }
    A.psi = transpose_to_qua(A.tower->at(A.k), A.tri_source, Q, A.simplicial);
    A.valid = !check_morphism(A.psi, A.tower->at(A.k), Q.P());
    return A;
  }
  A.error = "star condition not reached within " + std::to_string(max_k) + " subdivisions";
  return A;
}

struct KanApproximation {
  Morphism psi;  // C -> ner P
  bool valid = false;
  bool pipeline_checked = false;  // the composite mu o ex psi' o zeta was evaluated cell by cell
  std::string error;
};

// psi' : sd C -> ner P is given by vertex values on sd C.  The composite
// mu o ex(psi') o zeta : C -> ner P is evaluated through the coend at one subdivision.
inline KanApproximation kan_approximation(const Presheaf& C, const Preorder& P, const std::vector<int>& sd_vertex_value,
                                          CoendBudget budget = {}) {
  KanApproximation K;
  Subdivided sdC = subdivide(C);
  budget.max_dim = std::max(budget.max_dim, C.dim());
  budget.max_word_length = std::max(budget.max_word_length, C.dim());
  Model N = nerve_cubical_model(P, budget.max_dim);
  auto psi_prime = map_into_nerve(sdC.P, N, sd_vertex_value);
  if (!psi_prime) {
    K.error = "vertex values are not monotone along sd C";
    return K;
  }
  PresheafExSource srcSd(sdC.P);
  Ex exSd(srcSd, budget);
  NerveExSource srcN(P);
  Ex exN(srcN, budget);
  Morphism z = zeta(C, sdC, srcSd, exSd);
  Morphism mu = nerve_composition(N, srcN, exN);
  Morphism out;
  out.map.resize(z.map.size());
  for (int k = 0; k < static_cast<int>(z.map.size()); ++k)
    for (auto& c : z.map[k]) {
      const ExElement& e = exSd.representative(nondeg(Site::Box, c.dim, c.id));
      Morphism moved = compose(*psi_prime, srcSd.maps(e.L)[e.psi]);
      const Model& R = detail::boxplus_rep(e.L);
      Key values(shape_size(e.L));
      for (int v = 0; v < R.P.count(0); ++v) values[R.keys[0][v][0]] = N.keys[0][moved.map[0][v].id][0];
      Cell in_ex = exN.cell(c.dim, e.L, srcN.index_of(e.L, values), e.g);
      Cell at_level = c.degenerate() ? exN.P().act(in_ex, MonotoneMap{cube(c.level), cube(c.dim), c.degen}) : in_ex;
      out.map[k].push_back(apply(mu, at_level));
    }
  K.psi = out;
  K.pipeline_checked = true;
  K.valid = !check_morphism(K.psi, C, N.P);
  return K;
}

}  // namespace dicube
