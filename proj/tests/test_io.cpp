#include <catch2/catch_amalgamated.hpp>

#include <dicube/generate.hpp>
#include <dicube/io.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace dicube;
namespace fs = std::filesystem;

namespace {

fs::path fixture(const std::string& name) { return fs::path(DICUBE_FIXTURE_DIR) / name; }

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string format_error(const Json& j) {
  try {
    complex_from_json(j, "bad.json");
  } catch (const FormatError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("every fixture round-trips byte for byte") {
  int seen = 0;
  for (auto& entry : fs::directory_iterator(DICUBE_FIXTURE_DIR)) {
    if (entry.path().extension() != ".json") continue;
    ++seen;
    INFO(entry.path().filename().string());
    std::string text = slurp(entry.path());
    Json j = Json::parse(text);
    std::string kind = j.value("kind", "");
    std::string again;
    if (kind == "complex") {
      Complex X = complex_from_json(j, entry.path().string());
      again = dump(complex_to_json(X));
    } else if (kind == "diagram") {
      again = dump(diagram_to_json(diagram_from_json(j, entry.path().parent_path(), entry.path().string())));
    } else if (kind == "pl_map") {
      PLMapFile F = pl_map_from_json(j, entry.path().parent_path(), entry.path().string());
      REQUIRE_FALSE(check_pl_map(F.f));
      again = dump(pl_map_to_json(F.f));
    } else {
      FAIL("unknown kind " << kind);
    }
    CHECK(again == text);
  }
  CHECK(seen >= 20);
}

TEST_CASE("the square fixture is the standard square") {
  Complex X = load_complex(fixture("box2.json"));
  CHECK(X.P.site == Site::Box);
  CHECK(X.P.counts() == std::vector<int>{4, 4, 1});
  CHECK(X.P.faces == representable(Site::Box, 2).faces);
}

TEST_CASE("annulus fixture keeps its positions") {
  Complex X = load_complex(fixture("square_annulus.json"));
  Complex Y = square_annulus();
  CHECK(X.P.faces == Y.P.faces);
  CHECK(X.position == Y.position);
  CHECK(X.vertex_at({3, 3}) == Y.vertex_at({3, 3}));
}

TEST_CASE("malformed complexes are rejected with their location") {
  Json good = complex_to_json(representable(Site::Box, 2), "square");

  Json j = good;
  j["cells"][2][0]["faces"][3] = Json::array({1, 9});
  std::string e = format_error(j);
  CHECK_THAT(e, Catch::Matchers::ContainsSubstring("dimension 2 cell 0 face 3"));

  j = good;
  j["cells"][1][2]["faces"].erase(0);
  e = format_error(j);
  CHECK_THAT(e, Catch::Matchers::ContainsSubstring("dimension 1 cell 2"));

  j = good;
  j["site"] = "globe";
  CHECK_FALSE(format_error(j).empty());

  // faces that exist but do not satisfy the face identities
  j = good;
  j["cells"][2][0]["faces"][0] = j["cells"][2][0]["faces"][1];
  CHECK_FALSE(format_error(j).empty());

  CHECK_THROWS_AS(read_json_file(fixture("no_such_file.json")), FormatError);
}

TEST_CASE("morphisms round-trip and bad targets are caught") {
  auto A = representable(Site::Box, 1), S = representable(Site::Box, 2);
  for (auto& f : enumerate_morphisms(A, S)) CHECK(morphism_from_json(morphism_to_json(f), A, S, "f") == f);
  Json bad = morphism_to_json(identity_morphism(A));
  bad["map"][0][1] = Json::array({0, 7});
  CHECK_THROWS_AS(morphism_from_json(bad, A, A, "f"), FormatError);
}

TEST_CASE("rational coordinates") {
  CHECK(rational_string(0.5) == "1/2");
  CHECK(rational_string(0.75) == "3/4");
  CHECK(rational_string(1.0) == "1");
  CHECK(rational_string(1.0 / 3) == "1/3");
  CHECK(parse_rational(Json("3/8"), "x") == 0.375);
  CHECK(parse_rational(Json(0.25), "x") == 0.25);
  CHECK_THROWS_AS(parse_rational(Json("1/0"), "x"), FormatError);
  CHECK_THROWS_AS(parse_rational(Json("half"), "x"), FormatError);
}
