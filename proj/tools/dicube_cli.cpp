// Command line front end: file conversion, constructions, class counts and the property suites.
// Exit codes: 0 ok, 1 a checked property failed, 2 bad usage or bad input.

#include <dicube/dicube.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <random>

using namespace dicube;
namespace fs = std::filesystem;

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// exit 1 with a message: something we checked does not hold
struct ViolationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string counts_line(const Presheaf& P) {
  std::string s;
  for (int c : P.counts()) s += (s.empty() ? "" : " ") + std::to_string(c);
  return s.empty() ? "0" : s;
}

void emit(const Json& j, const std::string& out) {
  if (out.empty()) std::cout << dump(j);
  else write_file(out, dump(j));
}

Complex require_cubical(const std::string& path) {
  Complex X = load_complex(path);
  if (X.P.site != Site::Box) throw UsageError(path + ": a cubical complex is required");
  return X;
}

// "0<1,1<2" on n points, closed reflexively and transitively
Preorder preorder_from_relation(int n, const std::string& rel) {
  if (n < 1) throw UsageError("--points must be positive");
  Preorder p = discrete_preorder(n);
  std::stringstream ss(rel);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    auto lt = item.find('<');
    if (lt == std::string::npos) throw UsageError("relation item '" + item + "' needs the form a<b");
    int a, b;
    try {
      a = std::stoi(item.substr(0, lt));
      b = std::stoi(item.substr(lt + 1));
    } catch (const std::logic_error&) {
      throw UsageError("relation item '" + item + "' is not a<b");
    }
    if (a < 0 || b < 0 || a >= n || b >= n) throw UsageError("relation item '" + item + "' is out of range");
    p.rel[a * n + b] = 1;
  }
  for (int m = 0; m < n; ++m)
    for (int a = 0; a < n; ++a)
      if (p.leq(a, m))
        for (int b = 0; b < n; ++b)
          if (p.leq(m, b)) p.rel[a * n + b] = 1;
  return p;
}

Complex nerve_complex(const Preorder& P, bool cubical, int max_dim) {
  Complex X;
  int d = max_dim >= 0 ? max_dim : default_nerve_dim(P);
  X.P = cubical ? nerve_cubical(P, d) : nerve_simplicial(P, d);
  X.name = std::string(cubical ? "cubical " : "") + "nerve(" + preorder_label(P) + ")";
  if (!P.names.empty())
    for (int v = 0; v < X.P.count(0); ++v) X.P.names[0][v] = P.names[v];
  return X;
}

// qua of the triangulation, for cubical inputs; qua of the input for simplicial ones.
Complex qua_complex(const Complex& X, int max_dim) {
  Presheaf simp = X.P.site == Site::Box ? tri(X.P) : X.P;
  Qua Q = qua(simp, max_dim);
  Complex out;
  out.P = Q.P();
  out.name = "qua(" + std::string(X.P.site == Site::Box ? "tri(" + X.name + ")" : X.name) + ")";
  return out;
}

Diagram pair_dipath_diagram(const Complex& X, const std::vector<int>& from, const std::vector<int>& to, bool through_qua) {
  int a = X.vertex_at(from), b = X.vertex_at(to);
  if (!through_qua) return pair_diagram(X.P, a, b);
  Extension tX = triangulate(X.P);
  Qua Q = qua(tX.C.P, 2);
  Morphism eta = adjunction_unit(X.P, tX, Q);
  return pair_diagram(Q.P(), eta.map[0][a].id, eta.map[0][b].id);
}

// A sampled PL path from the subdivided interval of length 2^k into the triangulated annulus.
PLVertexMap sample_annulus_path(int k, std::mt19937& rng, Complex& I, Extension& tI, Extension& tY, Complex& Y) {
  Y = square_annulus();
  tY = triangulate(Y.P);
  Embedding E = embed_triangulation(Y, tY);
  I = interval(k);
  tI = triangulate(I.P);
  std::vector<int> order(I.P.count(0));
  for (int v = 0; v < I.P.count(0); ++v) order[I.position[v][0]] = tI.C.incl[tI.piece_of[0][v]].map[0][0].id;
  for (int t = 0; t < 200; ++t)
    if (auto f = sample_pl_path(tI.C.P, order, E, {0, 0}, {3, 3}, rng)) return *f;
  throw UsageError("no monotone PL path with " + std::to_string(1 << k) + " edges found in 200 attempts; use --k 3 or more");
}

void write_fixtures(const fs::path& dir, std::mt19937& rng) {
  fs::create_directories(dir);
  auto put = [&](const std::string& name, const Json& j) { write_file(dir / name, dump(j)); };
  for (int n = 0; n <= 3; ++n) {
    put("box" + std::to_string(n) + ".json", complex_to_json(representable(Site::Box, n), "box[" + std::to_string(n) + "]"));
    put("delta" + std::to_string(n) + ".json", complex_to_json(representable(Site::Delta, n), "delta[" + std::to_string(n) + "]"));
  }
  for (int k = 1; k <= 3; ++k) put("interval" + std::to_string(k) + ".json", complex_to_json(interval(k)));
  put("path6.json", complex_to_json(path_complex(6)));
  put("grid3x3.json", complex_to_json(grid(3, 3)));
  put("square_annulus.json", complex_to_json(square_annulus()));
  auto I = path_complex(6);
  put("dipath_source.json", diagram_to_json(pair_diagram(I.P, I.vertex_at({0}), I.vertex_at({6}))));
  put("dipath_annulus.json", diagram_to_json(pair_dipath_diagram(square_annulus(), {0, 0}, {3, 3}, true)));
  for (int pts = 1; pts <= 4; ++pts) {
    auto ps = preorders_up_to_iso(pts);
    for (std::size_t i = 0; i < ps.size(); ++i) {
      char name[32];
      std::snprintf(name, sizeof name, "nerve%d_%02zu.json", pts, i);
      put(name, complex_to_json(nerve_complex(ps[i], false, -1)));
    }
  }
  Complex Ic, Y;
  Extension tI, tY;
  PLVertexMap f = sample_annulus_path(3, rng, Ic, tI, tY, Y);
  put("pl_path.json", pl_map_to_json(f));
}

void print_report(const VerifyReport& R, bool as_json) {
  if (as_json) {
    Json j;
    j["ok"] = R.ok();
    j["failures"] = R.failures();
    Json cs = Json::array();
    for (auto& c : R.cases)
      cs.push_back(Json{{"suite", c.suite}, {"fixture", c.fixture}, {"check", c.check}, {"pass", c.pass}, {"detail", c.detail}});
    j["cases"] = cs;
    std::cout << dump(j);
    return;
  }
  for (auto& c : R.cases)
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.suite << " " << c.fixture << ": " << c.check << " (" << c.detail << ")\n";
  std::cout << R.cases.size() - R.failures() << "/" << R.cases.size() << " passed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"dicube: cubical and simplicial sets, subdivision, triangulation, ex, directed homotopy"};
  app.require_subcommand(1);
  unsigned seed = 1;
  app.add_option("--seed", seed, "seed for every sampled quantity")->capture_default_str();
  std::string out;

  auto* info = app.add_subcommand("info", "summarize a complex, diagram or PL map file");
  std::string info_file;
  info->add_option("file", info_file)->required()->check(CLI::ExistingFile);

  auto* sub = app.add_subcommand("subdivide", "iterated subdivision of a complex");
  std::string sub_file;
  int times = 1;
  sub->add_option("file", sub_file)->required()->check(CLI::ExistingFile);
  sub->add_option("--times", times)->check(CLI::Range(0, 8))->capture_default_str();
  sub->add_option("-o,--out", out);

  auto* tri_cmd = app.add_subcommand("tri", "triangulate a cubical complex");
  std::string tri_file;
  tri_cmd->add_option("file", tri_file)->required()->check(CLI::ExistingFile);
  tri_cmd->add_option("-o,--out", out);

  auto* qua_cmd = app.add_subcommand("qua", "cubical set of simplicial maps out of triangulated cubes");
  std::string qua_file;
  int qua_dim = 2;
  qua_cmd->add_option("file", qua_file)->required()->check(CLI::ExistingFile);
  qua_cmd->add_option("--max-dim", qua_dim)->check(CLI::Range(0, 4))->capture_default_str();
  qua_cmd->add_option("-o,--out", out);

  auto* ex_cmd = app.add_subcommand("ex", "iterate ex on a cubical complex");
  std::string ex_file;
  int depth = 1;
  CoendBudget budget{2, 2};
  ex_cmd->add_option("file", ex_file)->required()->check(CLI::ExistingFile);
  ex_cmd->add_option("--depth", depth)->check(CLI::Range(0, 3))->capture_default_str();
  ex_cmd->add_option("--budget", budget.max_word_length, "longest word in the coend")->check(CLI::Range(0, 4))->capture_default_str();
  ex_cmd->add_option("--max-dim", budget.max_dim)->check(CLI::Range(0, 3))->capture_default_str();
  ex_cmd->add_option("-o,--out", out);

  auto* tensor_cmd = app.add_subcommand("tensor", "tensor product of two cubical complexes");
  std::string ta, tb;
  tensor_cmd->add_option("a", ta)->required()->check(CLI::ExistingFile);
  tensor_cmd->add_option("b", tb)->required()->check(CLI::ExistingFile);
  tensor_cmd->add_option("-o,--out", out);

  auto* hom_cmd = app.add_subcommand("hom", "count (or list) morphisms between two complexes");
  std::string ha, hb;
  bool hom_list = false;
  hom_cmd->add_option("source", ha)->required()->check(CLI::ExistingFile);
  hom_cmd->add_option("target", hb)->required()->check(CLI::ExistingFile);
  hom_cmd->add_flag("--list", hom_list);

  auto* cls_cmd = app.add_subcommand("classes", "directed homotopy classes of maps between complexes or diagrams");
  std::string ca, cb;
  std::vector<int> fixed_objects;
  cls_cmd->add_option("source", ca)->required()->check(CLI::ExistingFile);
  cls_cmd->add_option("target", cb)->required()->check(CLI::ExistingFile);
  cls_cmd->add_option("--fix", fixed_objects, "diagram objects held at the identity");

  auto* probe_cmd = app.add_subcommand("probe-equivalence", "compare homotopy classes out of probe complexes along a map");
  std::string pa, pb, pmap;
  std::vector<std::string> probe_files;
  int probe_depth = 0;
  probe_cmd->add_option("source", pa)->required()->check(CLI::ExistingFile);
  probe_cmd->add_option("target", pb)->required()->check(CLI::ExistingFile);
  probe_cmd->add_option("map", pmap, "file with {\"map\": ...}")->required()->check(CLI::ExistingFile);
  probe_cmd->add_option("--probe", probe_files, "probe complexes (default: point and interval)")->check(CLI::ExistingFile);
  probe_cmd->add_option("--depth", probe_depth, "apply ex this many times first")->check(CLI::Range(0, 2))->capture_default_str();

  auto* approx_cmd = app.add_subcommand("approximate", "simplicial approximation of a PL map file");
  std::string approx_file;
  int max_k = 6;
  approx_cmd->add_option("file", approx_file)->required()->check(CLI::ExistingFile);
  approx_cmd->add_option("--max-k", max_k)->check(CLI::Range(0, 8))->capture_default_str();
  approx_cmd->add_option("-o,--out", out);

  auto* gen = app.add_subcommand("generate", "example complexes, diagrams and PL maps");
  std::string family;
  int gm = 3, gn = 3, gk = 3, points = 2, max_dim = -1;
  std::string site = "box", relation, complex_file, fixtures_dir = "fixtures";
  std::vector<int> from, to;
  bool cubical_nerve = false, through_qua = false;
  gen->add_option("family", family)
      ->required()
      ->check(CLI::IsMember({"cube", "grid", "square_annulus", "interval", "path", "nerve", "pair_dipath", "pl_path", "fixtures"}));
  gen->add_option("--m", gm)->check(CLI::Range(0, 12));
  gen->add_option("--n", gn)->check(CLI::Range(0, 12));
  gen->add_option("--k", gk)->check(CLI::Range(0, 8));
  gen->add_option("--site", site)->check(CLI::IsMember({"box", "delta"}));
  gen->add_option("--points", points)->check(CLI::Range(1, 8));
  gen->add_option("--relation", relation, "e.g. 0<1,1<2");
  gen->add_flag("--cubical", cubical_nerve, "cubical nerve instead of simplicial");
  gen->add_option("--max-dim", max_dim);
  gen->add_option("--complex", complex_file)->check(CLI::ExistingFile);
  gen->add_option("--from", from)->expected(1, 4);
  gen->add_option("--to", to)->expected(1, 4);
  gen->add_flag("--qua", through_qua, "pair diagram into qua tri of the complex");
  gen->add_option("--dir", fixtures_dir, "where `generate fixtures` writes");
  gen->add_option("-o,--out", out);

  auto* ver = app.add_subcommand("verify", "run a property suite");
  std::string suite = "all";
  bool as_json = false;
  ver->add_option("suite", suite)->check(CLI::IsMember([] {
    auto s = suite_names();
    s.push_back("all");
    return s;
  }()));
  ver->add_flag("--json", as_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::mt19937 rng(seed);
  try {
    if (*info) {
      Json j = read_json_file(info_file);
      std::string kind = j.value("kind", "");
      if (kind == "complex") {
        Complex X = complex_from_json(j, info_file);
        std::cout << "kind complex\nname " << (X.name.empty() ? "-" : X.name) << "\nsite " << site_name(X.P.site) << "\ndim "
                  << X.P.dim() << "\ncounts " << counts_line(X.P) << "\n";
      } else if (kind == "diagram") {
        Diagram D = diagram_from_json(j, fs::path(info_file).parent_path(), info_file);
        std::cout << "kind diagram\nshape " << D.shape.name << "\nobjects " << D.shape.objects << "\narrows " << D.shape.arrows.size()
                  << "\n";
        for (std::size_t o = 0; o < D.value.size(); ++o) std::cout << "object " << o << " counts " << counts_line(D.value[o]) << "\n";
      } else if (kind == "pl_map") {
        PLMapFile F = pl_map_from_json(j, fs::path(info_file).parent_path(), info_file);
        auto star = star_condition(F.f);
        std::cout << "kind pl_map\nsource counts " << counts_line(*F.source) << "\ntarget counts " << counts_line(*F.target)
                  << "\nstar condition " << (star.satisfied ? "yes" : "no") << "\n";
      } else {
        throw FormatError(info_file + ": unknown kind '" + kind + "'");
      }
    } else if (*sub) {
      Complex X = load_complex(sub_file);
      SdTower T(X.P, times);
      Complex Y;
      Y.P = T.at(times);
      Y.name = "sd^" + std::to_string(times) + "(" + X.name + ")";
      if (X.P.site == Site::Box && X.P.dim() == 1 && times > 0) {
        try {
          Y.position = walk_positions(Y.P);
        } catch (const std::invalid_argument&) {
          // not a path; leave unplaced
        }
      }
      emit(complex_to_json(Y), out);
      if (!out.empty()) std::cout << "counts " << counts_line(Y.P) << "\n";
    } else if (*tri_cmd) {
      Complex X = require_cubical(tri_file);
      Complex Y;
      Y.P = tri(X.P);
      Y.name = "tri(" + X.name + ")";
      emit(complex_to_json(Y), out);
      if (!out.empty()) std::cout << "counts " << counts_line(Y.P) << "\n";
    } else if (*qua_cmd) {
      Complex Y = qua_complex(load_complex(qua_file), qua_dim);
      emit(complex_to_json(Y), out);
      if (!out.empty()) std::cout << "counts " << counts_line(Y.P) << "\n";
    } else if (*ex_cmd) {
      Complex X = require_cubical(ex_file);
      ExTower T(X.P, depth, budget);
      Complex Y;
      Y.P = T.at(depth);
      Y.name = "ex^" + std::to_string(depth) + "(" + X.name + ")";
      emit(complex_to_json(Y), out);
      if (!out.empty()) std::cout << "counts " << counts_line(Y.P) << "\n";
    } else if (*tensor_cmd) {
      Complex A = require_cubical(ta), B = require_cubical(tb);
      Complex Y;
      if (!A.position.empty() && !B.position.empty()) Y = tensor_complex(A, B);
      else {
        Y.P = tensor(A.P, B.P).P;
        Y.name = A.name + " (x) " + B.name;
      }
      emit(complex_to_json(Y), out);
      if (!out.empty()) std::cout << "counts " << counts_line(Y.P) << "\n";
    } else if (*hom_cmd) {
      Complex A = load_complex(ha), B = load_complex(hb);
      if (A.P.site != B.P.site) throw UsageError("source and target live over different sites");
      auto maps = enumerate_morphisms(A.P, B.P);
      if (hom_list) {
        Json arr = Json::array();
        for (auto& f : maps) arr.push_back(morphism_to_json(f));
        std::cout << dump(arr);
      } else {
        std::cout << "morphisms " << maps.size() << "\n";
      }
    } else if (*cls_cmd) {
      Json ja = read_json_file(ca), jb = read_json_file(cb);
      auto as_diagram = [](const Json& j, const std::string& path) {
        if (j.value("kind", "") == "diagram") return diagram_from_json(j, fs::path(path).parent_path(), path);
        return point_diagram(complex_from_json(j, path).P);
      };
      Diagram B = as_diagram(ja, ca), C = as_diagram(jb, cb);
      if (B.shape.objects != C.shape.objects || B.shape.arrows != C.shape.arrows) throw UsageError("diagrams have different shapes");
      std::vector<std::optional<Morphism>> fixed(B.shape.objects);
      for (int o : fixed_objects) {
        if (o < 0 || o >= B.shape.objects) throw UsageError("--fix object out of range");
        if (B.value[o].faces != C.value[o].faces) throw UsageError("--fix needs equal values at object " + std::to_string(o));
        fixed[o] = identity_morphism(B.value[o]);
      }
      auto G = homotopy_graph(B, C, fixed);
      std::cout << "maps " << G.nodes.size() << "\nhomotopies " << G.homotopies << "\nclasses " << G.class_count << "\n";
    } else if (*probe_cmd) {
      Complex S = require_cubical(pa), T = require_cubical(pb);
      Morphism f = morphism_from_json(read_json_file(pmap), S.P, T.P, pmap);
      std::vector<std::pair<std::string, Presheaf>> probes;
      for (auto& p : probe_files) probes.emplace_back(p, require_cubical(p).P);
      if (probes.empty()) probes = {{"point", representable(Site::Box, 0)}, {"interval", representable(Site::Box, 1)}};
      auto R = directed_equivalence_probe(S.P, T.P, f, probes, probe_depth, budget);
      for (auto& p : R.probes)
        std::cout << "probe " << p.probe << ": classes " << p.source_classes << " -> " << p.target_classes << ", injective "
                  << (p.injective ? "yes" : "no") << ", surjective " << (p.surjective ? "yes" : "no") << ", stable "
                  << (p.stable ? "yes" : "no") << "\n";
      std::cout << "verdict " << (R.refuted() ? "not an equivalence" : "no obstruction found (evidence only)") << "\n";
    } else if (*approx_cmd) {
      PLMapFile F = load_pl_map(approx_file);
      auto A = simplicial_approximation(F.f, max_k);
      if (!A.error.empty()) throw ViolationError("approximation: " + A.error);
      std::cerr << "subdivisions " << A.k << "\nvalid " << (A.valid ? "yes" : "no") << "\nbelow f " << (A.below_f ? "yes" : "no")
                << "\n";
      Json j;
      j["kind"] = "approximation";
      j["subdivisions"] = A.k;
      j["source"] = complex_to_json(*A.subdivided.source);
      j["psi"] = morphism_to_json(A.psi);
      emit(j, out);
      if (!A.valid || !A.below_f) throw ViolationError("approximation is not a valid map below f");
    } else if (*gen) {
      Json j;
      if (family == "cube") {
        Site s = site == "box" ? Site::Box : Site::Delta;
        j = complex_to_json(representable(s, gn), std::string(site_name(s)) + "[" + std::to_string(gn) + "]");
      } else if (family == "grid") {
        j = complex_to_json(grid(gm, gn));
      } else if (family == "square_annulus") {
        j = complex_to_json(square_annulus());
      } else if (family == "interval") {
        j = complex_to_json(interval(gk));
      } else if (family == "path") {
        j = complex_to_json(path_complex(gk));
      } else if (family == "nerve") {
        j = complex_to_json(nerve_complex(preorder_from_relation(points, relation), cubical_nerve, max_dim));
      } else if (family == "pair_dipath") {
        if (complex_file.empty() || from.empty() || to.empty()) throw UsageError("pair_dipath needs --complex, --from and --to");
        Complex X = require_cubical(complex_file);
        if (X.position.empty()) throw UsageError(complex_file + ": vertex positions are required");
        j = diagram_to_json(pair_dipath_diagram(X, from, to, through_qua));
      } else if (family == "pl_path") {
        Complex I, Y;
        Extension tI, tY;
        j = pl_map_to_json(sample_annulus_path(gk, rng, I, tI, tY, Y));
      } else {
        write_fixtures(fixtures_dir, rng);
        std::cout << "wrote fixtures to " << fixtures_dir << "\n";
        return 0;
      }
      emit(j, out);
    } else if (*ver) {
      VerifyReport R = verify(suite);
      print_report(R, as_json);
      if (!R.ok()) return 1;
    }
  } catch (const UsageError& e) {
    std::cerr << "error: usage: " << e.what() << "\n";
    return 2;
  } catch (const FormatError& e) {
    std::cerr << "error: input: " << e.what() << "\n";
    return 2;
  } catch (const ViolationError& e) {
    std::cerr << "error: violation: " << e.what() << "\n";
    return 1;
  } catch (const BudgetExceeded& e) {
    std::cerr << "error: budget: " << e.what() << "\n";
    return 2;
  } catch (const SizeCapExceeded& e) {
    std::cerr << "error: budget: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: input: " << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << "error: input: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
