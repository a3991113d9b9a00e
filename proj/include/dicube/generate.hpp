#pragma once
// Example families: edge paths, subdivided intervals, grids, the square annulus, and pinned
// pair diagrams for dipaths.

#include <dicube/homotopy.hpp>

namespace dicube {

// A cubical set whose vertices carry integer grid coordinates.
struct Complex {
  std::string name;
  Presheaf P;
  std::vector<std::vector<int>> position;

  int vertex_at(const std::vector<int>& p) const {
    for (int v = 0; v < static_cast<int>(position.size()); ++v)
      if (position[v] == p) return v;
    throw std::out_of_range("no vertex at the given position");
  }
};

inline Presheaf points(int n) {
  std::vector<const Presheaf*> pieces;
  Presheaf pt = representable(Site::Box, 0);
  for (int i = 0; i < n; ++i) pieces.push_back(&pt);
  if (n == 0) {
    Presheaf e;
    e.site = Site::Box;
    return e;
  }
  return colimit(pieces, {}, 0).P;
}

// k edges glued head to tail.
inline Complex path_complex(int k) {
  Complex X;
  X.name = "path(" + std::to_string(k) + ")";
  if (k == 0) {
    X.P = representable(Site::Box, 0);
    X.position = {{0}};
    return X;
  }
  Presheaf edge = representable(Site::Box, 1);
  Presheaf pt = representable(Site::Box, 0);
  std::vector<const Presheaf*> pieces(k, &edge);
  std::vector<Relation> rels;
  for (int i = 0; i + 1 < k; ++i) {
    Morphism head, tail;
    head.map = {{nondeg(Site::Box, 0, 1)}};
    tail.map = {{nondeg(Site::Box, 0, 0)}};
    rels.push_back({&pt, i, head, i + 1, tail});
  }
  Colimit C = colimit(pieces, rels, 1);
  X.P = C.P;
  X.position.assign(C.P.count(0), {});
  for (int i = 0; i < k; ++i)
    for (int e = 0; e < 2; ++e) X.position[C.incl[i].map[0][e].id] = {i + e};
  return X;
}

// Positions along a cubical set that is an edge path: the source has no incoming edge.
inline std::vector<std::vector<int>> walk_positions(const Presheaf& P) {
  int n = P.count(0);
  std::vector<int> next(n, -1), indeg(n, 0);
  for (int e = 0; e < P.count(1); ++e) {
    int a = P.face(P.cell(1, e), 0).id, b = P.face(P.cell(1, e), 1).id;
    if (next[a] >= 0) throw std::invalid_argument("walk_positions: not a path");
    next[a] = b;
    ++indeg[b];
  }
  int start = -1;
  for (int v = 0; v < n; ++v)
    if (indeg[v] == 0) start = v;
  if (start < 0) throw std::invalid_argument("walk_positions: no source vertex");
  std::vector<std::vector<int>> pos(n);
  int step = 0;
  for (int v = start; v >= 0; v = next[v]) pos[v] = {step++};
  if (step != n) throw std::invalid_argument("walk_positions: not connected");
  return pos;
}

// sd^k box[1]
inline Complex interval(int k) {
  Complex X;
  X.name = "interval(" + std::to_string(k) + ")";
  SdTower T(representable(Site::Box, 1), k);
  X.P = T.at(k);
  X.position = walk_positions(X.P);
  return X;
}

inline Complex tensor_complex(const Complex& A, const Complex& B) {
  Complex X;
  X.name = A.name + " (x) " + B.name;
  TensorProduct T = tensor(A.P, B.P);
  X.P = T.P;
  for (int v = 0; v < T.P.count(0); ++v) {
    auto [da, ia, db, ib] = T.factors[0][v];
    auto p = A.position[ia];
    p.insert(p.end(), B.position[ib].begin(), B.position[ib].end());
    X.position.push_back(p);
  }
  return X;
}

inline Complex grid(int m, int n) {
  Complex X = tensor_complex(path_complex(m), path_complex(n));
  X.name = "grid(" + std::to_string(m) + "," + std::to_string(n) + ")";
  return X;
}

// Removes top cells whose lowest vertex sits at one of the given positions.
inline Complex remove_squares(const Complex& X, const std::vector<std::vector<int>>& lows) {
  Sub keep = full_sub(X.P);
  int top = X.P.dim();
  for (int i = 0; i < X.P.count(top); ++i) {
    auto vs = X.P.vertices_of(X.P.cell(top, i));
    for (auto& l : lows)
      if (X.position[vs.front().id] == l) keep[top][i] = 0;
  }
  SubPresheaf S = as_presheaf(X.P, keep);
  Complex Y;
  Y.P = S.P;
  for (int v = 0; v < S.P.count(0); ++v) Y.position.push_back(X.position[S.incl.map[0][v].id]);
  return Y;
}

// The 3x3 grid without its middle square.
inline Complex square_annulus() {
  Complex Y = remove_squares(grid(3, 3), {{1, 1}});
  Y.name = "square_annulus";
  return Y;
}

// boundary -> X picking the two given vertices.
inline Diagram pair_diagram(const Presheaf& X, int source, int target) {
  Diagram D;
  D.shape = pair_shape();
  D.value = {points(2), X};
  Morphism ends;
  ends.map = {{X.cell(0, source), X.cell(0, target)}};
  D.action = {ends};
  return D;
}

// The identity on the boundary points, used to pin dipath endpoints.
inline std::vector<std::optional<Morphism>> pinned_ends() { return {identity_morphism(points(2)), std::nullopt}; }

}  // namespace dicube
