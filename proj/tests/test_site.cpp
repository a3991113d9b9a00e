#include <catch2/catch_amalgamated.hpp>

#include <dicube/site.hpp>

using namespace dicube;

namespace {

// every monotone function between two product shapes, by brute force over all tables
std::vector<MonotoneMap> brute_monotone(const Shape& a, const Shape& b) {
  int na = shape_size(a), nb = shape_size(b);
  std::vector<MonotoneMap> out;
  std::vector<int> t(na, 0);
  while (true) {
    MonotoneMap f{a, b, t};
    if (is_monotone(f)) out.push_back(f);
    int i = 0;
    while (i < na && ++t[i] == nb) t[i++] = 0;
    if (i == na) break;
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

TEST_CASE("ordinal sum of identities and the two inclusions") {
  auto id1 = identity_map(ordinal(1));
  CHECK(ordinal_sum(id1, id1) == identity_map(ordinal(3)));
  CHECK(gamma_delta(1, false).table == std::vector<int>{0, 1});
  CHECK(gamma_delta(1, true).table == std::vector<int>{2, 3});
  CHECK(gamma_delta(1, true).cod == ordinal(3));
}

TEST_CASE("ordinal sum is associative with the empty ordinal as unit") {
  MonotoneMap empty{ordinal(-1), ordinal(-1), {}};
  for (int m = 0; m <= 2; ++m)
    for (int n = 0; n <= 2; ++n)
      for (auto& f : all_monotone_maps(ordinal(m), ordinal(n))) {
        CHECK(ordinal_sum(f, empty) == f);
        CHECK(ordinal_sum(empty, f) == f);
      }
  auto maps = all_monotone_maps(ordinal(1), ordinal(1));
  for (auto& f : maps)
    for (auto& g : maps)
      for (auto& h : maps) CHECK(ordinal_sum(ordinal_sum(f, g), h) == ordinal_sum(f, ordinal_sum(g, h)));
}

TEST_CASE("tensor of maps is associative and interchanges with composition") {
  auto homs11 = box_homs(1, 1);
  auto homs12 = box_homs(1, 2);
  for (auto& f : homs11)
    for (auto& g : homs11)
      for (auto& h : homs12) CHECK(tensor(tensor(f, g), h) == tensor(f, tensor(g, h)));
  for (auto& f : homs11)
    for (auto& g : homs11)
      for (auto& f2 : homs11)
        for (auto& g2 : homs11) CHECK(compose(tensor(f2, g2), tensor(f, g)) == tensor(compose(f2, f), compose(g2, g)));
  MonotoneMap unit = identity_map(Shape{});
  for (auto& f : homs12) CHECK(tensor(unit, f).table == f.table);
}

TEST_CASE("subdivision functor on objects and maps") {
  CHECK(sdf_object(cube(2)) == Shape{2, 2});
  // the face hitting 1 goes to 2
  MonotoneMap top{cube(0), cube(1), {1}};
  auto s = sdf_morphism(top);
  CHECK(s.dom == Shape{});
  CHECK(s.table == std::vector<int>{2});
  MonotoneMap degen{cube(1), cube(0), {0, 0}};
  CHECK(sdf_morphism(degen).table == std::vector<int>{0, 0, 0});
  CHECK_THROWS(sdf_object(Shape{2}));
}

TEST_CASE("subdivision functor preserves composition") {
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c)
        for (auto& f : box_homs(a, b))
          for (auto& g : box_homs(b, c)) CHECK(sdf_morphism(compose(g, f)) == compose(sdf_morphism(g), sdf_morphism(f)));
}

TEST_CASE("gamma components") {
  CHECK(gamma_box(1, false).table == std::vector<int>{0, 0, 1});
  CHECK(gamma_box(1, true).table == std::vector<int>{0, 1, 1});
  CHECK(gamma_box(0, false) == identity_map(Shape{}));
}

TEST_CASE("gamma is natural against subdivision for all box maps up to dimension 3") {
  for (bool barred : {false, true})
    for (int m = 0; m <= 3; ++m)
      for (int n = 0; n <= 3; ++n)
        for (auto& f : box_homs(m, n)) CHECK(compose(gamma_box(n, barred), sdf_morphism(f)) == compose(f, gamma_box(m, barred)));
}

TEST_CASE("hom set sizes") {
  SECTION("subdivided site [1] -> [2] drops only the jump") {
    auto homs = hom_set(HomSite::BoxPlus, Shape{1}, Shape{2});
    CHECK(homs.size() == 5);
    auto all = brute_monotone(Shape{1}, Shape{2});
    CHECK(all.size() == 6);
    MonotoneMap jump{Shape{1}, Shape{2}, {0, 2}};
    CHECK_FALSE(std::binary_search(homs.begin(), homs.end(), jump));
  }
  SECTION("box [1] -> [1]") {
    auto homs = hom_set(HomSite::Box, cube(1), cube(1));
    CHECK(homs.size() == 3);
  }
  SECTION("ambient [1]^2 -> [1] agrees with brute force") {
    auto homs = hom_set(HomSite::Q, cube(2), ordinal(1));
    CHECK(homs.size() == 6);
    CHECK(homs == brute_monotone(cube(2), ordinal(1)));
  }
  SECTION("delta [1] -> [2]") { CHECK(hom_set(HomSite::Delta, ordinal(1), ordinal(2)).size() == 6); }
}

TEST_CASE("box normal forms match the generator closure") {
  // closure of faces and degeneracies under composition and tensor, by fixpoint
  std::map<std::pair<int, int>, std::set<MonotoneMap>> hom;
  for (int n = 0; n <= 3; ++n) hom[{n, n}].insert(identity_map(cube(n)));
  hom[{0, 1}].insert({cube(0), cube(1), {0}});
  hom[{0, 1}].insert({cube(0), cube(1), {1}});
  hom[{1, 0}].insert({cube(1), cube(0), {0, 0}});
  bool grew = true;
  while (grew) {
    grew = false;
    auto snap = hom;
    for (auto& [k1, s1] : snap)
      for (auto& [k2, s2] : snap)
        for (auto& f : s1)
          for (auto& g : s2) {
            if (k1.second == k2.first && hom[{k1.first, k2.second}].insert(compose(g, f)).second) grew = true;
            if (k1.first + k2.first <= 3 && k1.second + k2.second <= 3 &&
                hom[{k1.first + k2.first, k1.second + k2.second}].insert(tensor(f, g)).second)
              grew = true;
          }
  }
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n) {
      auto nf = box_homs(m, n);
      std::vector<MonotoneMap> closed(hom[{m, n}].begin(), hom[{m, n}].end());
      INFO("m=" << m << " n=" << n);
      CHECK(nf == closed);
    }
}

TEST_CASE("normal forms round trip") {
  for (int m = 0; m <= 3; ++m)
    for (int n = 0; n <= 3; ++n)
      for (auto& nf : box_nf_homs(m, n)) {
        auto back = box_nf_from_map(nf.to_map());
        REQUIRE(back);
        CHECK(*back == nf);
        CHECK(is_monotone(nf.to_map()));
      }
  // the swap is monotone but not a box map
  MonotoneMap swap{cube(2), cube(2), {0, 2, 1, 3}};
  CHECK(is_monotone(swap));
  CHECK_FALSE(box_nf_from_map(swap));
}

TEST_CASE("subdivided-site enumeration matches the generator closure") {
  auto closure = boxplus_generator_closure(2);
  for (auto& [key, maps] : closure) {
    std::vector<MonotoneMap> closed(maps.begin(), maps.end());
    INFO("words of sizes " << key.first.size() << " and " << key.second.size());
    CHECK(boxplus_homs(key.first, key.second) == closed);
  }
}

namespace {
std::vector<MonotoneMap> jump_free(const Shape& a, const Shape& b) {
  std::vector<MonotoneMap> out;
  for (auto& f : brute_monotone(a, b)) {
    bool ok = true;
    for (int x = 0; x < shape_size(a) && ok; ++x)
      for (int y = 0; y < shape_size(a); ++y) {
        auto ca = decode(a, x), cb = decode(a, y);
        int diff = 0;
        for (std::size_t j = 0; j < ca.size(); ++j) diff += std::abs(ca[j] - cb[j]);
        if (diff != 1) continue;
        auto fx = decode(b, f.table[x]), fy = decode(b, f.table[y]);
        for (std::size_t j = 0; j < fx.size(); ++j)
          if (std::abs(fx[j] - fy[j]) > 1) ok = false;
      }
    if (ok) out.push_back(f);
  }
  return out;
}
}  // namespace

TEST_CASE("jump-free monotone maps: equal on single factors, strictly bigger on products") {
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b) {
      Shape wa = a ? Shape{a} : Shape{}, wb = b ? Shape{b} : Shape{};
      CHECK(boxplus_homs(wa, wb) == jump_free(wa, wb));
    }
  // max mixes both coordinates, so it is not built factor by factor
  MonotoneMap mx{cube(2), cube(1), {0, 1, 1, 1}};
  auto jf = jump_free(cube(2), cube(1));
  CHECK(std::binary_search(jf.begin(), jf.end(), mx));
  CHECK_FALSE(in_boxplus(mx));
  CHECK(boxplus_homs(cube(2), cube(1)).size() < jf.size());
}

TEST_CASE("subdivided-site size cap") { CHECK_THROWS_AS(boxplus_homs(Shape{1, 1, 1, 1, 1}, Shape{1}), SizeCapExceeded); }

TEST_CASE("subcube inclusion examples") {
  auto v = subcube_inclusion({1, 0}, {1, 0});
  CHECK(v.m == 0);
  CHECK(v.to_map().table == std::vector<int>{2});
  CHECK(subcube_inclusion({0, 0}, {1, 1}).to_map() == identity_map(cube(2)));
  auto e = subcube_inclusion({0, 0}, {0, 1});
  CHECK(e.m == 1);
  CHECK(e.to_map().table == std::vector<int>{0, 1});
  CHECK_THROWS(subcube_inclusion({1, 0}, {0, 1}));
}

TEST_CASE("subcube inclusion is the unique injective map with those extrema, n <= 4") {
  for (int n = 0; n <= 4; ++n)
    for (int lo = 0; lo < (1 << n); ++lo)
      for (int hi = 0; hi < (1 << n); ++hi) {
        if ((lo & hi) != lo) continue;
        int m = __builtin_popcount(static_cast<unsigned>(lo ^ hi));
        std::vector<int> a(n), b(n);
        for (int j = 0; j < n; ++j) {
          a[j] = lo >> (n - 1 - j) & 1;
          b[j] = hi >> (n - 1 - j) & 1;
        }
        int found = 0;
        for (auto& f : hom_set(HomSite::Box, cube(m), cube(n))) {
          std::set<int> img(f.table.begin(), f.table.end());
          if (img.size() == f.table.size() && f.table.front() == lo && f.table.back() == hi) {
            ++found;
            CHECK(f == subcube_inclusion(a, b).to_map());
          }
        }
        CHECK(found == 1);
      }
}
