#pragma once
// Diagrams of cubical sets over small finitely presented shapes, directed homotopies through
// the cylinder B (x) box[1], homotopy classes, and probing maps for directed equivalence.

#include <dicube/extension.hpp>

namespace dicube {

// Objects 0..objects-1; arrows generate, relations equate composable paths of arrow indices
// (applied right to left).
struct DiagramShape {
  std::string name;
  int objects = 1;
  std::vector<std::pair<int, int>> arrows;
  std::vector<std::pair<std::vector<int>, std::vector<int>>> relations;
};

inline DiagramShape point_shape() { return {"point", 1, {}, {}}; }
// boundary -> interval
inline DiagramShape pair_shape() { return {"pair", 2, {{0, 1}}, {}}; }
inline DiagramShape cospan_shape() { return {"cospan", 3, {{0, 2}, {1, 2}}, {}}; }

struct Diagram {
  DiagramShape shape;
  std::vector<Presheaf> value;
  std::vector<Morphism> action;
};

using DiagramMorphism = std::vector<Morphism>;

inline Diagram point_diagram(const Presheaf& P) { return {point_shape(), {P}, {}}; }

inline Morphism path_composite(const Diagram& D, const std::vector<int>& path) {
  if (path.empty()) throw std::invalid_argument("path_composite: empty path");
  Morphism m = D.action.at(path.back());
  for (int i = static_cast<int>(path.size()) - 2; i >= 0; --i) m = compose(D.action.at(path[i]), m);
  return m;
}

inline std::optional<std::string> check_diagram(const Diagram& D) {
  const auto& S = D.shape;
  if (static_cast<int>(D.value.size()) != S.objects) return "diagram: wrong number of values";
  if (D.action.size() != S.arrows.size()) return "diagram: wrong number of actions";
  for (std::size_t a = 0; a < S.arrows.size(); ++a) {
    auto [s, t] = S.arrows[a];
    if (auto err = check_morphism(D.action[a], D.value[s], D.value[t])) return "arrow " + std::to_string(a) + ": " + *err;
  }
  for (auto& [p, q] : S.relations)
    if (path_composite(D, p).map != path_composite(D, q).map) return std::string("diagram: relation fails");
  return std::nullopt;
}

// Generating arrows must form an acyclic graph; objects come back sources first.
inline std::vector<int> topological_objects(const DiagramShape& S) {
  std::vector<int> indeg(S.objects, 0), out;
  for (auto& a : S.arrows) ++indeg[a.second];
  for (int o = 0; o < S.objects; ++o)
    if (indeg[o] == 0) out.push_back(o);
  for (std::size_t i = 0; i < out.size(); ++i)
    for (auto& a : S.arrows)
      if (a.first == out[i] && --indeg[a.second] == 0) out.push_back(a.second);
  if (static_cast<int>(out.size()) != S.objects) throw std::invalid_argument("diagram shape has a cycle of arrows");
  return out;
}

inline bool is_natural(const Diagram& B, const Diagram& C, const DiagramMorphism& f) {
  for (std::size_t a = 0; a < B.shape.arrows.size(); ++a) {
    auto [s, t] = B.shape.arrows[a];
    if (compose(C.action[a], f[s]).map != compose(f[t], B.action[a]).map) return false;
  }
  return true;
}

// Natural families B -> C.  Components listed in `fixed` are not searched.
inline std::vector<DiagramMorphism> enumerate_diagram_morphisms(const Diagram& B, const Diagram& C,
                                                                const std::vector<std::optional<Morphism>>& fixed = {},
                                                                SearchBudget budget = {}) {
  const auto& S = B.shape;
  auto order = topological_objects(S);
  std::vector<std::unique_ptr<CellIndex>> idx(S.objects);
  for (int o = 0; o < S.objects; ++o)
    if (o >= static_cast<int>(fixed.size()) || !fixed[o])
      idx[o] = std::make_unique<CellIndex>(C.value[o], std::max(B.value[o].dim(), 0));

  std::vector<DiagramMorphism> out;
  DiagramMorphism cur(S.objects);
  auto rec = [&](auto&& self, std::size_t t) -> void {
    if (t == order.size()) {
      if (is_natural(B, C, cur)) {
        if (out.size() >= budget.max_results) throw BudgetExceeded("diagram morphisms exceeded result budget");
        out.push_back(cur);
      }
      return;
    }
    int o = order[t];
    if (o < static_cast<int>(fixed.size()) && fixed[o]) {
      cur[o] = *fixed[o];
      self(self, t + 1);
      return;
    }
    // incoming arrows pin the images of nondegenerate cells hit by the action
    PartialMap pins = empty_partial(B.value[o]);
    bool consistent = true;
    for (std::size_t a = 0; a < S.arrows.size() && consistent; ++a) {
      if (S.arrows[a].second != o) continue;
      int s = S.arrows[a].first;
      const Presheaf& src = B.value[s];
      for (int k = 0; k < src.levels() && consistent; ++k)
        for (int i = 0; i < src.count(k); ++i) {
          Cell x = apply(B.action[a], src.cell(k, i));
          if (x.level != x.dim) continue;
          Cell y = apply(C.action[a], apply(cur[s], src.cell(k, i)));
          auto& slot = pins[x.dim][x.id];
          if (slot && !(*slot == y)) {
            consistent = false;
            break;
          }
          slot = y;
        }
    }
    if (!consistent) return;
    for_each_morphism(B.value[o], C.value[o], *idx[o], &pins, [&](const Morphism& f) {
      cur[o] = f;
      self(self, t + 1);
    }, budget);
  };
  rec(rec, 0);
  return out;
}

inline Key diagram_morphism_key(const DiagramMorphism& f) {
  Key k;
  for (auto& m : f) {
    Key mk = morphism_key(m);
    k.push_back(static_cast<int>(mk.size()));
    k.insert(k.end(), mk.begin(), mk.end());
  }
  return k;
}

// ---- cylinders and homotopies -------------------------------------------------

// B (x) box[1] object-wise, with the two end inclusions.
struct Cylinder {
  Diagram D;
  std::vector<TensorProduct> T;
  std::vector<Morphism> end0, end1, projection;
};

inline Morphism end_inclusion(const Presheaf& B, const TensorProduct& T, int end) {
  Morphism m;
  m.map.resize(B.levels());
  Cell v = nondeg(Site::Box, 0, end);
  for (int k = 0; k < B.levels(); ++k)
    for (int i = 0; i < B.count(k); ++i) {
      Cell c = T.cell_of(B.cell(k, i), v);
      m.map[k].push_back(T.P.cell(c.dim, c.id));
    }
  return m;
}

inline Morphism cylinder_projection(const Presheaf& B, const TensorProduct& T) {
  Morphism m;
  m.map.resize(T.P.levels());
  for (int k = 0; k < T.P.levels(); ++k)
    for (int i = 0; i < T.P.count(k); ++i) {
      auto [da, ia, db, ib] = T.factors[k][i];
      // drop the interval coordinate
      Cell a = B.cell(da, ia);
      int n = da + db;
      std::vector<int> table(std::size_t(1) << n);
      for (int x = 0; x < (1 << n); ++x) table[x] = x >> db;
      m.map[k].push_back(B.act(a, MonotoneMap{cube(n), cube(da), table}));
    }
  return m;
}

inline Cylinder cylinder(const Diagram& B) {
  Cylinder Y;
  Presheaf I = representable(Site::Box, 1);
  Y.D.shape = B.shape;
  for (auto& P : B.value) {
    Y.T.push_back(tensor(P, I));
    Y.D.value.push_back(Y.T.back().P);
    Y.end0.push_back(end_inclusion(P, Y.T.back(), 0));
    Y.end1.push_back(end_inclusion(P, Y.T.back(), 1));
    Y.projection.push_back(cylinder_projection(P, Y.T.back()));
  }
  Morphism idI = identity_morphism(I);
  for (std::size_t a = 0; a < B.shape.arrows.size(); ++a) {
    auto [s, t] = B.shape.arrows[a];
    Y.D.action.push_back(tensor_morphism(B.action[a], idI, Y.T[s], Y.T[t]));
  }
  return Y;
}

// Nodes are natural families B -> C; a directed edge a -> b records some H with H end0 = a
// and H end1 = b.  Fixed components are held stationary through every homotopy.
struct HomotopyGraph {
  std::vector<DiagramMorphism> nodes;
  std::set<std::pair<int, int>> edges;
  std::size_t homotopies = 0;
  std::vector<int> klass;
  int class_count = 0;

  int index_of(const DiagramMorphism& f) const {
    auto it = index.find(diagram_morphism_key(f));
    return it == index.end() ? -1 : it->second;
  }
  std::map<Key, int> index;
};

inline HomotopyGraph homotopy_graph(const Diagram& B, const Diagram& C, const std::vector<std::optional<Morphism>>& fixed = {},
                                    SearchBudget budget = {}) {
  HomotopyGraph G;
  G.nodes = enumerate_diagram_morphisms(B, C, fixed, budget);
  for (int i = 0; i < static_cast<int>(G.nodes.size()); ++i) G.index.emplace(diagram_morphism_key(G.nodes[i]), i);

  Cylinder Y = cylinder(B);
  std::vector<std::optional<Morphism>> yfixed(B.shape.objects);
  for (int o = 0; o < static_cast<int>(fixed.size()); ++o)
    if (fixed[o]) yfixed[o] = compose(*fixed[o], Y.projection[o]);
  auto homotopies = enumerate_diagram_morphisms(Y.D, C, yfixed, budget);
  G.homotopies = homotopies.size();
  for (auto& H : homotopies) {
    DiagramMorphism a(B.shape.objects), b(B.shape.objects);
    for (int o = 0; o < B.shape.objects; ++o) {
      a[o] = compose(H[o], Y.end0[o]);
      b[o] = compose(H[o], Y.end1[o]);
    }
    int ia = G.index_of(a), ib = G.index_of(b);
    if (ia < 0 || ib < 0) throw std::logic_error("homotopy end is not a diagram morphism");
    if (ia != ib) G.edges.emplace(ia, ib);
  }
  detail::UnionFind uf(static_cast<int>(G.nodes.size()));
  for (auto [a, b] : G.edges) uf.unite(a, b);
  std::map<int, int> relabel;
  G.klass.resize(G.nodes.size());
  for (int i = 0; i < static_cast<int>(G.nodes.size()); ++i) {
    auto [it, fresh] = relabel.emplace(uf.find(i), static_cast<int>(relabel.size()));
    G.klass[i] = it->second;
  }
  G.class_count = static_cast<int>(relabel.size());
  return G;
}

// Homotopy classes of maps between plain cubical sets.
inline HomotopyGraph classes(const Presheaf& B, const Presheaf& C, SearchBudget budget = {}) {
  return homotopy_graph(point_diagram(B), point_diagram(C), {}, budget);
}

// ---- vertex-defined maps into nerves ------------------------------------------

// Vertex values of a cell, listed over the vertices of its level shape.
inline std::vector<int> vertex_values(const Presheaf& S, const Cell& c) {
  std::vector<int> out;
  for (auto& v : S.vertices_of(c)) out.push_back(v.id);
  return out;
}

// The map S -> N into a (cubical or simplicial) nerve model sending each vertex v to value[v],
// or nothing when some cell would not land on a monotone map.
inline std::optional<Morphism> map_into_nerve(const Presheaf& S, const Model& N, const std::vector<int>& value) {
  Morphism m;
  m.map.resize(S.levels());
  for (int k = 0; k < S.levels(); ++k)
    for (int i = 0; i < S.count(k); ++i) {
      Key key;
      for (int v : vertex_values(S, S.cell(k, i))) key.push_back(value[v]);
      if (S.site == Site::Delta) {
        auto it = N.cell_of[k].find(key);
        if (it == N.cell_of[k].end()) return std::nullopt;
        m.map[k].push_back(it->second);
        continue;
      }
      if (!N.has(k, key)) return std::nullopt;
      m.map[k].push_back(N.find(k, key));
    }
  return m;
}

// ---- convex nerves --------------------------------------------------------------

inline std::optional<int> meet(const Preorder& P, int a, int b) {
  std::optional<int> best;
  for (int c = 0; c < P.n; ++c) {
    if (!P.leq(c, a) || !P.leq(c, b)) continue;
    if (!best || P.leq(*best, c)) best = c;
  }
  if (!best) return std::nullopt;
  for (int c = 0; c < P.n; ++c)
    if (P.leq(c, a) && P.leq(c, b) && !P.leq(c, *best)) return std::nullopt;
  return best;
}

struct ConvexNerveWitness {
  bool semilattice = false;
  bool first_homotopy = false;   // meet ~> first projection
  bool second_homotopy = false;  // meet ~> second projection
  bool ok() const { return semilattice && first_homotopy && second_homotopy; }
};

// The two projections ner P (x) ner P -> ner P are joined by the zig-zag through the meet.
inline ConvexNerveWitness convex_nerve_check(const Preorder& P, int max_dim = 1) {
  ConvexNerveWitness W;
  std::vector<int> meets(static_cast<std::size_t>(P.n) * P.n);
  W.semilattice = true;
  for (int a = 0; a < P.n && W.semilattice; ++a)
    for (int b = 0; b < P.n; ++b) {
      auto m = meet(P, a, b);
      if (!m) {
        W.semilattice = false;
        break;
      }
      meets[a * P.n + b] = *m;
    }
  if (!W.semilattice) return W;
  Model N = nerve_cubical_model(P, max_dim + 2);
  Presheaf Nt = nerve_cubical(P, max_dim);
  TensorProduct T = tensor(Nt, Nt, max_dim);
  Presheaf I = representable(Site::Box, 1);
  TensorProduct Y = tensor(T.P, I, max_dim + 1);

  // vertices of T are pairs (a, b); vertices of Y are ((a, b), e)
  auto pair_of = [&](int tv) {
    auto [da, ia, db, ib] = T.factors[0][tv];
    return std::pair<int, int>{ia, ib};
  };
  for (int side = 0; side < 2; ++side) {
    std::vector<int> value(Y.P.count(0));
    for (int v = 0; v < Y.P.count(0); ++v) {
      auto [dt, it, di, e] = Y.factors[0][v];
      auto [a, b] = pair_of(it);
      int proj = side == 0 ? a : b;
      value[v] = e == 0 ? meets[a * P.n + b] : proj;
    }
    auto H = map_into_nerve(Y.P, N, value);
    bool ok = H && !check_morphism(*H, Y.P, N.P);
    if (ok) {
      // the ends are the meet and the projection
      Morphism m0 = compose(*H, end_inclusion(T.P, Y, 0)), m1 = compose(*H, end_inclusion(T.P, Y, 1));
      for (int v = 0; v < T.P.count(0) && ok; ++v) {
        auto [a, b] = pair_of(v);
        ok = m0.map[0][v].id == meets[a * P.n + b] && m1.map[0][v].id == (side == 0 ? a : b);
      }
    }
    (side == 0 ? W.first_homotopy : W.second_homotopy) = ok;
  }
  return W;
}

// ---- directed equivalence probing ------------------------------------------------

struct ProbeResult {
  std::string probe;
  int source_classes = 0, target_classes = 0;
  bool injective = false, surjective = false;
  bool stable = false;
};

struct EquivalenceReport {
  std::vector<ProbeResult> probes;
  // NO at a stable truncation certifies non-equivalence; YES is only evidence
  bool refuted() const {
    for (auto& p : probes)
      if (p.stable && (!p.injective || !p.surjective)) return true;
    return false;
  }
};

// Compares h(A, ex^k S) -> h(A, ex^k T) along ex^k psi.  With k = 0 the map itself is used.
inline EquivalenceReport directed_equivalence_probe(const Presheaf& S, const Presheaf& T, const Morphism& psi,
                                                    const std::vector<std::pair<std::string, Presheaf>>& probes, int k = 0,
                                                    CoendBudget budget = {}) {
  EquivalenceReport R;
  std::vector<std::unique_ptr<ExTower>> towers;
  const Presheaf* src = &S;
  const Presheaf* tgt = &T;
  Morphism f = psi;
  bool stable = true;
  if (k > 0) {
    towers.push_back(std::make_unique<ExTower>(S, k, budget));
    towers.push_back(std::make_unique<ExTower>(T, k, budget));
    ExTower& a = *towers[0];
    ExTower& b = *towers[1];
    for (int j = 0; j < k; ++j) {
      f = ex_morphism(a.stage(j + 1), a.source(j), b.stage(j + 1), b.source(j), f);
      stable = stable && ex_stability(a.source(j), budget).stable && ex_stability(b.source(j), budget).stable;
    }
    src = &a.at(k);
    tgt = &b.at(k);
  }
  for (auto& [name, A] : probes) {
    ProbeResult p;
    p.probe = name;
    p.stable = stable;
    HomotopyGraph gs = classes(A, *src), gt = classes(A, *tgt);
    p.source_classes = gs.class_count;
    p.target_classes = gt.class_count;
    std::map<int, std::set<int>> image;
    std::set<int> hit;
    for (int i = 0; i < static_cast<int>(gs.nodes.size()); ++i) {
      int j = gt.index_of({compose(f, gs.nodes[i][0])});
      if (j < 0) throw std::logic_error("probe: image is not a map");
      image[gs.klass[i]].insert(gt.klass[j]);
      hit.insert(gt.klass[j]);
    }
    std::set<int> seen;
    p.injective = true;
    for (auto& [c, img] : image) {
      int t = *img.begin();
      if (!seen.insert(t).second) p.injective = false;
    }
    p.surjective = static_cast<int>(hit.size()) == gt.class_count;
    R.probes.push_back(p);
  }
  return R;
}

}  // namespace dicube
