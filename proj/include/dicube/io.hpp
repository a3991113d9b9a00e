#pragma once
// JSON files for complexes, diagrams and PL maps.  Keys are written in one fixed order so
// that save(load(file)) reproduces a canonical file byte for byte.

#include <dicube/approximation.hpp>

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>

namespace dicube {

using Json = nlohmann::ordered_json;

struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// ---- exact rationals ------------------------------------------------------------

// Best rational approximation by continued fractions; dyadic coordinates come out exact.
inline std::pair<long long, long long> to_rational(double x, long long max_den = 1LL << 40) {
  if (!std::isfinite(x)) throw FormatError("non-finite coordinate");
  long long sign = x < 0 ? -1 : 1;
  double r = std::fabs(x);
  long long p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  for (int it = 0; it < 64; ++it) {
    double a = std::floor(r);
    long long ai = static_cast<long long>(a);
    long long p2 = ai * p1 + p0, q2 = ai * q1 + q0;
    if (q2 > max_den) break;
    p0 = p1, q0 = q1, p1 = p2, q1 = q2;
    double frac = r - a;
    if (frac < 1e-15 || std::fabs(static_cast<double>(p1) / q1 - std::fabs(x)) < 1e-16) break;
    r = 1 / frac;
  }
  return {sign * p1, q1};
}

inline std::string rational_string(double x) {
  auto [p, q] = to_rational(x);
  return q == 1 ? std::to_string(p) : std::to_string(p) + "/" + std::to_string(q);
}

inline double parse_rational(const Json& j, const std::string& where) {
  if (j.is_number()) return j.get<double>();
  if (!j.is_string()) throw FormatError(where + ": expected a rational");
  std::string s = j.get<std::string>();
  auto slash = s.find('/');
  try {
    std::size_t used = 0;
    if (slash == std::string::npos) {
      double v = std::stod(s, &used);
      if (used != s.size()) throw std::invalid_argument(s);
      return v;
    }
    long long p = std::stoll(s.substr(0, slash), &used);
    if (used != slash) throw std::invalid_argument(s);
    std::string den = s.substr(slash + 1);
    long long q = std::stoll(den, &used);
    if (used != den.size() || q <= 0) throw std::invalid_argument(s);
    return static_cast<double>(p) / static_cast<double>(q);
  } catch (const std::logic_error&) {
    throw FormatError(where + ": bad rational '" + s + "'");
  }
}

// ---- cells and morphisms ---------------------------------------------------------

// [dim, id] for a nondegenerate cell, [dim, id, degeneracy table] otherwise.
inline Json cell_to_json(const Cell& c) {
  Json j = Json::array({c.dim, c.id});
  if (c.degenerate()) j.push_back(c.degen);
  return j;
}

inline Cell cell_from_json(const Json& j, Site s, int level, const std::string& where) {
  if (!j.is_array() || j.size() < 2 || j.size() > 3 || !j[0].is_number_integer() || !j[1].is_number_integer())
    throw FormatError(where + ": expected [dim, id] or [dim, id, degeneracy]");
  Cell c{level, j[0].get<int>(), j[1].get<int>(), {}};
  if (c.dim < 0 || c.dim > level) throw FormatError(where + ": dimension " + std::to_string(c.dim) + " out of range");
  if (j.size() == 3) {
    try {
      c.degen = j[2].get<std::vector<int>>();
    } catch (const Json::exception&) {
      throw FormatError(where + ": degeneracy must be a list of integers");
    }
  } else {
    if (c.dim != level) throw FormatError(where + ": degenerate cell needs a degeneracy table");
    c.degen = nondeg(s, level, 0).degen;
  }
  if (static_cast<int>(c.degen.size()) != level_size(s, level)) throw FormatError(where + ": degeneracy table has wrong size");
  for (int v : c.degen)
    if (v < 0 || v >= level_size(s, c.dim)) throw FormatError(where + ": degeneracy value out of range");
  if (!is_surjection(s, MonotoneMap{level_shape(s, level), level_shape(s, c.dim), c.degen}))
    throw FormatError(where + ": degeneracy is not a surjection of the site");
  return c;
}

inline Json morphism_to_json(const Morphism& f) {
  Json levels = Json::array();
  for (auto& lv : f.map) {
    Json row = Json::array();
    for (auto& c : lv) row.push_back(cell_to_json(c));
    levels.push_back(row);
  }
  return Json{{"map", levels}};
}

inline Morphism morphism_from_json(const Json& j, const Presheaf& S, const Presheaf& T, const std::string& where) {
  if (!j.is_object() || !j.contains("map") || !j["map"].is_array()) throw FormatError(where + ": expected {\"map\": [...]}");
  const Json& m = j["map"];
  if (static_cast<int>(m.size()) != S.levels()) throw FormatError(where + ": expected " + std::to_string(S.levels()) + " levels");
  Morphism f;
  f.map.resize(S.levels());
  for (int k = 0; k < S.levels(); ++k) {
    if (!m[k].is_array() || static_cast<int>(m[k].size()) != S.count(k))
      throw FormatError(where + ": dimension " + std::to_string(k) + " needs " + std::to_string(S.count(k)) + " images");
    for (int i = 0; i < S.count(k); ++i) {
      std::string at = where + ": dimension " + std::to_string(k) + " index " + std::to_string(i);
      Cell c = cell_from_json(m[k][i], T.site, k, at);
      if (c.id < 0 || c.id >= T.count(c.dim)) throw FormatError(at + ": target cell does not exist");
      f.map[k].push_back(c);
    }
  }
  if (auto err = check_morphism(f, S, T)) throw FormatError(where + ": " + *err);
  return f;
}

// ---- complexes ------------------------------------------------------------------

inline Json complex_to_json(const Presheaf& P, const std::string& name = {}, const std::vector<std::vector<int>>& positions = {}) {
  Json j;
  j["kind"] = "complex";
  if (!name.empty()) j["name"] = name;
  j["site"] = site_name(P.site);
  Json cells = Json::array();
  for (int k = 0; k < P.levels(); ++k) {
    Json row = Json::array();
    for (int i = 0; i < P.count(k); ++i) {
      Json c;
      if (k < static_cast<int>(P.names.size()) && i < static_cast<int>(P.names[k].size()) && !P.names[k][i].empty())
        c["name"] = P.names[k][i];
      Json fs = Json::array();
      for (auto& f : P.faces[k][i]) fs.push_back(cell_to_json(f));
      c["faces"] = fs;
      row.push_back(c);
    }
    cells.push_back(row);
  }
  j["cells"] = cells;
  if (!positions.empty()) j["positions"] = positions;
  return j;
}

inline Json complex_to_json(const Complex& X) { return complex_to_json(X.P, X.name, X.position); }

inline Site site_from_json(const Json& j, const std::string& where) {
  if (j == "box") return Site::Box;
  if (j == "delta") return Site::Delta;
  throw FormatError(where + ": site must be \"box\" or \"delta\"");
}

inline Complex complex_from_json(const Json& j, const std::string& where = "complex") {
  if (!j.is_object()) throw FormatError(where + ": expected an object");
  if (j.value("kind", "") != "complex") throw FormatError(where + ": kind must be \"complex\"");
  if (!j.contains("site") || !j.contains("cells") || !j["cells"].is_array()) throw FormatError(where + ": needs site and cells");
  Complex X;
  X.name = j.value("name", "");
  X.P.site = site_from_json(j["site"], where);
  const Json& cells = j["cells"];
  X.P.faces.resize(cells.size());
  X.P.names.resize(cells.size());
  for (std::size_t k = 0; k < cells.size(); ++k) {
    if (!cells[k].is_array()) throw FormatError(where + ": dimension " + std::to_string(k) + " must be a list");
    for (std::size_t i = 0; i < cells[k].size(); ++i) {
      std::string at = where + ": dimension " + std::to_string(k) + " cell " + std::to_string(i);
      const Json& c = cells[k][i];
      if (!c.is_object() || !c.contains("faces") || !c["faces"].is_array()) throw FormatError(at + ": needs a faces list");
      if (static_cast<int>(c["faces"].size()) != num_faces(X.P.site, static_cast<int>(k)))
        throw FormatError(at + ": expected " + std::to_string(num_faces(X.P.site, static_cast<int>(k))) + " faces");
      std::vector<Cell> fs;
      for (std::size_t f = 0; f < c["faces"].size(); ++f)
        fs.push_back(cell_from_json(c["faces"][f], X.P.site, static_cast<int>(k) - 1, at + " face " + std::to_string(f)));
      X.P.faces[k].push_back(std::move(fs));
      X.P.names[k].push_back(c.value("name", ""));
    }
  }
  if (auto err = check_presheaf(X.P)) throw FormatError(where + ": " + *err);
  if (j.contains("positions")) {
    try {
      X.position = j["positions"].get<std::vector<std::vector<int>>>();
    } catch (const Json::exception&) {
      throw FormatError(where + ": positions must be integer lists");
    }
    if (static_cast<int>(X.position.size()) != X.P.count(0)) throw FormatError(where + ": one position per vertex is required");
  }
  return X;
}

inline Json read_json_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  if (!in) throw FormatError("cannot open " + p.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw FormatError(p.string() + ": " + e.what());
  }
}

inline std::string dump(const Json& j) { return j.dump(2) + "\n"; }

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p);
  if (!out) throw FormatError("cannot write " + p.string());
  out << text;
}

// Inline objects, or file names resolved against the referring file's directory.
inline Json resolve(const Json& j, const std::filesystem::path& base) {
  return j.is_string() ? read_json_file(base / j.get<std::string>()) : j;
}

inline Complex load_complex(const std::filesystem::path& p) { return complex_from_json(read_json_file(p), p.string()); }

// ---- diagrams -------------------------------------------------------------------

inline Json diagram_to_json(const Diagram& D) {
  Json shape;
  shape["name"] = D.shape.name;
  shape["objects"] = D.shape.objects;
  Json arrows = Json::array();
  for (auto& [s, t] : D.shape.arrows) arrows.push_back({s, t});
  shape["arrows"] = arrows;
  Json rels = Json::array();
  for (auto& [p, q] : D.shape.relations) rels.push_back({p, q});
  shape["relations"] = rels;
  Json j;
  j["kind"] = "diagram";
  j["shape"] = shape;
  Json values = Json::array();
  for (auto& v : D.value) values.push_back(complex_to_json(v));
  j["values"] = values;
  Json actions = Json::array();
  for (auto& a : D.action) actions.push_back(morphism_to_json(a));
  j["actions"] = actions;
  return j;
}

inline Diagram diagram_from_json(const Json& j, const std::filesystem::path& base = ".", const std::string& where = "diagram") {
  if (!j.is_object() || j.value("kind", "") != "diagram") throw FormatError(where + ": kind must be \"diagram\"");
  Diagram D;
  try {
    const Json& s = j.at("shape");
    D.shape.name = s.value("name", "");
    D.shape.objects = s.at("objects").get<int>();
    for (auto& a : s.at("arrows")) D.shape.arrows.emplace_back(a.at(0).get<int>(), a.at(1).get<int>());
    if (s.contains("relations"))
      for (auto& r : s["relations"]) D.shape.relations.emplace_back(r.at(0).get<std::vector<int>>(), r.at(1).get<std::vector<int>>());
  } catch (const Json::exception& e) {
    throw FormatError(where + ": bad shape: " + e.what());
  }
  for (auto& [s, t] : D.shape.arrows)
    if (s < 0 || t < 0 || s >= D.shape.objects || t >= D.shape.objects) throw FormatError(where + ": arrow endpoint out of range");
  if (!j.contains("values") || static_cast<int>(j["values"].size()) != D.shape.objects)
    throw FormatError(where + ": one value per object is required");
  for (std::size_t o = 0; o < j["values"].size(); ++o)
    D.value.push_back(complex_from_json(resolve(j["values"][o], base), where + ": value " + std::to_string(o)).P);
  if (!j.contains("actions") || j["actions"].size() != D.shape.arrows.size())
    throw FormatError(where + ": one action per arrow is required");
  for (std::size_t a = 0; a < D.shape.arrows.size(); ++a) {
    auto [s, t] = D.shape.arrows[a];
    D.action.push_back(morphism_from_json(j["actions"][a], D.value[s], D.value[t], where + ": action " + std::to_string(a)));
  }
  if (auto err = check_diagram(D)) throw FormatError(where + ": " + *err);
  return D;
}

inline Diagram load_diagram(const std::filesystem::path& p) {
  return diagram_from_json(read_json_file(p), p.parent_path(), p.string());
}

// ---- PL maps ----------------------------------------------------------------------

// Owns source and target so the map's pointers stay valid.
struct PLMapFile {
  std::shared_ptr<Presheaf> source, target;
  PLVertexMap f;
};

inline Json bary_to_json(const Bary& x) {
  Json j = Json::array();
  for (double v : x) j.push_back(rational_string(v));
  return j;
}

inline Bary bary_from_json(const Json& j, std::size_t n, const std::string& where) {
  if (!j.is_array() || j.size() != n) throw FormatError(where + ": expected " + std::to_string(n) + " coordinates");
  Bary x;
  for (std::size_t i = 0; i < n; ++i) x.push_back(parse_rational(j[i], where + " coordinate " + std::to_string(i)));
  try {
    check_bary(x);
  } catch (const std::invalid_argument& e) {
    throw FormatError(where + ": " + e.what());
  }
  return x;
}

inline Json pl_map_to_json(const PLVertexMap& f) {
  Json j;
  j["kind"] = "pl_map";
  j["source"] = complex_to_json(*f.source);
  j["target"] = complex_to_json(*f.target);
  Json vs = Json::array();
  for (auto& p : f.vertex_image) vs.push_back(Json{{"cell", cell_to_json(p.cell)}, {"coords", bary_to_json(p.coords)}});
  j["vertices"] = vs;
  Json charts = Json::array();
  for (auto& lv : f.chart) {
    Json row = Json::array();
    for (auto& c : lv) {
      Json imgs = Json::array();
      for (auto& x : c.images) imgs.push_back(bary_to_json(x));
      row.push_back(Json{{"target", cell_to_json(c.target)}, {"images", imgs}});
    }
    charts.push_back(row);
  }
  j["charts"] = charts;
  return j;
}

inline PLMapFile pl_map_from_json(const Json& j, const std::filesystem::path& base = ".", const std::string& where = "pl map") {
  if (!j.is_object() || j.value("kind", "") != "pl_map") throw FormatError(where + ": kind must be \"pl_map\"");
  if (!j.contains("source") || !j.contains("target") || !j.contains("vertices") || !j.contains("charts"))
    throw FormatError(where + ": needs source, target, vertices and charts");
  PLMapFile out;
  out.source = std::make_shared<Presheaf>(complex_from_json(resolve(j["source"], base), where + ": source").P);
  out.target = std::make_shared<Presheaf>(complex_from_json(resolve(j["target"], base), where + ": target").P);
  const Presheaf& S = *out.source;
  const Presheaf& X = *out.target;
  PLVertexMap& f = out.f;
  f.source = out.source.get();
  f.target = out.target.get();
  auto target_cell = [&](const Json& c, const std::string& at) {
    if (!c.is_array() || c.empty() || !c[0].is_number_integer()) throw FormatError(at + ": expected a cell");
    int level = c.size() == 3 && c[2].is_array() ? static_cast<int>(c[2].size()) - 1 : c[0].get<int>();
    Cell r = cell_from_json(c, X.site, level, at);
    if (r.id < 0 || r.id >= X.count(r.dim)) throw FormatError(at + ": target cell does not exist");
    return r;
  };
  const Json& vs = j["vertices"];
  if (!vs.is_array() || static_cast<int>(vs.size()) != S.count(0)) throw FormatError(where + ": one image per source vertex is required");
  for (int v = 0; v < S.count(0); ++v) {
    std::string at = where + ": vertex " + std::to_string(v);
    Cell c = target_cell(vs[v].value("cell", Json()), at);
    f.vertex_image.push_back(carrier(X, c, bary_from_json(vs[v].value("coords", Json()), c.level + 1, at)));
  }
  const Json& cs = j["charts"];
  if (!cs.is_array() || static_cast<int>(cs.size()) != S.levels()) throw FormatError(where + ": one chart list per dimension is required");
  f.chart.resize(S.levels());
  for (int k = 0; k < S.levels(); ++k) {
    if (!cs[k].is_array() || static_cast<int>(cs[k].size()) != S.count(k))
      throw FormatError(where + ": dimension " + std::to_string(k) + " needs " + std::to_string(S.count(k)) + " charts");
    for (int i = 0; i < S.count(k); ++i) {
      std::string at = where + ": chart dimension " + std::to_string(k) + " index " + std::to_string(i);
      Chart c;
      c.target = target_cell(cs[k][i].value("target", Json()), at);
      const Json& imgs = cs[k][i].value("images", Json());
      if (!imgs.is_array() || static_cast<int>(imgs.size()) != k + 1) throw FormatError(at + ": expected " + std::to_string(k + 1) + " images");
      for (int t = 0; t <= k; ++t) c.images.push_back(bary_from_json(imgs[t], c.target.level + 1, at + " image " + std::to_string(t)));
      f.chart[k].push_back(std::move(c));
    }
  }
  if (auto err = check_pl_map(f)) throw FormatError(where + ": " + *err);
  return out;
}

inline PLMapFile load_pl_map(const std::filesystem::path& p) {
  return pl_map_from_json(read_json_file(p), p.parent_path(), p.string());
}

}  // namespace dicube
