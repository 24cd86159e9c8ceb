#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_util.hpp"
#include "tvdist/inference.hpp"
#include "tvdist/model.hpp"
#include "tvdist/oracle.hpp"
#include "tvdist/treedecomp.hpp"

using namespace tvdist;
using namespace tvtest;

namespace {

QuerySets random_query(int n, int alphabet, std::uint64_t seed) {
  SplitMix64 rng = SplitMix64::derive(seed, 0x717365ULL);
  QuerySets q = QuerySets::full(n, alphabet);
  for (int i = 0; i < n; ++i) {
    bool any = false;
    for (int s = 0; s < alphabet; ++s) {
      q.allow[i][s] = rng.next_double() < 0.6;
      any = any || q.allow[i][s];
    }
    if (!any) q.allow[i][static_cast<int>(rng.next_below(alphabet))] = true;
  }
  return q;
}

Factor<double> make_factor(std::vector<int> scope, std::vector<double> table,
                           int alphabet) {
  Factor<double> f;
  f.scope = std::move(scope);
  f.table = std::move(table);
  f.alphabet = alphabet;
  return f;
}

}  // namespace

TEST_CASE("restrict_factor masks coordinates") {
  Factor<double> f = make_factor({1}, {0.3, 0.7}, 2);
  SUBCASE("full set is a no-op") {
    auto out = restrict_factor(f, 1, {true, true});
    CHECK(out.table == f.table);
  }
  SUBCASE("empty set zeroes everything") {
    auto out = restrict_factor(f, 1, {false, false});
    CHECK(out.table == std::vector<double>{0.0, 0.0});
  }
  SUBCASE("single symbol keeps its entry") {
    auto out = restrict_factor(f, 1, {false, true});
    CHECK(out.table == std::vector<double>{0.0, 0.7});
  }
  CHECK_THROWS_AS(restrict_factor(f, 5, {true, true}), InputError);
}

TEST_CASE("multiply by the unit factor is the identity") {
  Factor<double> f = make_factor({0, 2}, {0.1, 0.2, 0.3, 0.4}, 2);
  auto out = multiply(f, Factor<double>::unit(2));
  CHECK(out.scope == f.scope);
  CHECK(out.table == f.table);
}

TEST_CASE("multiply on disjoint scopes is the outer product") {
  Factor<double> a = make_factor({0}, {0.25, 0.75}, 2);
  Factor<double> b = make_factor({1}, {0.5, 0.5}, 2);
  auto out = multiply(a, b);
  CHECK(out.scope == std::vector<int>{0, 1});
  CHECK(out.table[0] == doctest::Approx(0.125));
  CHECK(out.table[1] == doctest::Approx(0.125));
  CHECK(out.table[2] == doctest::Approx(0.375));
  CHECK(out.table[3] == doctest::Approx(0.375));
}

TEST_CASE("multiply with a shared variable matches the pointwise product") {
  SplitMix64 rng = SplitMix64::derive(17, 0);
  const int l = 3;
  Factor<double> a = make_factor({0, 1}, {}, l);
  Factor<double> b = make_factor({1, 2}, {}, l);
  for (int i = 0; i < l * l; ++i) a.table.push_back(rng.next_double());
  for (int i = 0; i < l * l; ++i) b.table.push_back(rng.next_double());
  auto out = multiply(a, b);
  REQUIRE(out.scope == std::vector<int>{0, 1, 2});
  for (int x0 = 0; x0 < l; ++x0)
    for (int x1 = 0; x1 < l; ++x1)
      for (int x2 = 0; x2 < l; ++x2) {
        double expect = a.table[x0 * l + x1] * b.table[x1 * l + x2];
        CHECK(out.table[(x0 * l + x1) * l + x2] == doctest::Approx(expect));
      }
}

TEST_CASE("sum_out preserves total mass") {
  SUBCASE("normalized single-variable factor sums to one") {
    Factor<double> f = make_factor({0}, {0.3, 0.7}, 2);
    auto out = sum_out(f, 0);
    CHECK(out.scope.empty());
    CHECK(out.table[0] == doctest::Approx(1.0));
  }
  SUBCASE("mass check on a random factor") {
    SplitMix64 rng = SplitMix64::derive(5, 0);
    Factor<double> f = make_factor({1, 3, 4}, {}, 2);
    double total = 0;
    for (int i = 0; i < 8; ++i) {
      f.table.push_back(rng.next_double());
      total += f.table.back();
    }
    auto out = sum_out(f, 3);
    double after = 0;
    for (double v : out.table) after += v;
    CHECK(after == doctest::Approx(total));
    CHECK(out.scope == std::vector<int>{1, 4});
  }
  Factor<double> f = make_factor({0}, {1.0, 0.0}, 2);
  CHECK_THROWS_AS(sum_out(f, 2), InputError);
}

TEST_CASE("infer returns one for the unconstrained query") {
  BayesNet net = gen_random_net(7, 3, Structure::RandomDag, 2, 12);
  TreeDecomposition td = decompose(moralize(net));
  double p = infer<double>(net, QuerySets::full(7, 3), td);
  CHECK(p == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("infer on the hand-computed chain") {
  BayesNet chain = parse_net(R"({
    "n": 2, "alphabet": 2, "parents": [[], [0]],
    "cpt": [[["3/5","2/5"]], [["9/10","1/10"], ["1/2","1/2"]]]
  })");
  TreeDecomposition td = decompose(moralize(chain));
  QuerySets q = QuerySets::full(2, 2);
  q.allow[0] = {true, false};
  q.allow[1] = {true, false};
  CHECK(infer<double>(chain, q, td) == doctest::Approx(0.54).epsilon(1e-12));
  CHECK(infer<Rational>(chain, q, td) == Rational(27, 50));
  CHECK(oracle::exact_infer(chain, q) == Rational(27, 50));
}

TEST_CASE("infer matches the enumeration oracle on random instances") {
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    int n = 4 + static_cast<int>(seed % 7);
    int l = 2 + static_cast<int>(seed % 2);
    Structure st = (seed % 3 == 0)   ? Structure::Path
                   : (seed % 3 == 1) ? Structure::Tree
                                     : Structure::RandomDag;
    BayesNet net = gen_random_net(n, l, st, 2, seed);
    TreeDecomposition td = decompose(moralize(net));
    QuerySets q = random_query(n, l, seed);
    double got = infer<double>(net, q, td);
    double want = to_double(oracle::exact_infer(net, q));
    CHECK(got == doctest::Approx(want).epsilon(1e-9));
  }
}

TEST_CASE("infer is invariant under the elimination order") {
  BayesNet net = gen_random_net(8, 2, Structure::RandomDag, 2, 77);
  TreeDecomposition td = decompose(moralize(net));
  QuerySets q = random_query(8, 2, 77);
  double base = infer<double>(net, q, td);
  for (int rot : {1, 2, 5}) {
    std::vector<int> order = elimination_order_variant(td, rot);
    CHECK(infer_with_order<double>(net, q, order) ==
          doctest::Approx(base).epsilon(1e-9));
  }
}

TEST_CASE("enlarging a query set never decreases the result") {
  BayesNet net = gen_random_net(6, 3, Structure::Tree, 0, 31);
  TreeDecomposition td = decompose(moralize(net));
  QuerySets q = random_query(6, 3, 31);
  double before = infer<double>(net, q, td);
  for (int i = 0; i < 6; ++i)
    for (int s = 0; s < 3; ++s) {
      if (q.allow[i][s]) continue;
      QuerySets bigger = q;
      bigger.allow[i][s] = true;
      CHECK(infer<double>(net, bigger, td) >= before - 1e-12);
    }
}

TEST_CASE("rational inference is exact") {
  BayesNet net = gen_random_net(5, 2, Structure::RandomDag, 2, 3);
  TreeDecomposition td = decompose(moralize(net));
  QuerySets q = random_query(5, 2, 3);
  CHECK(infer<Rational>(net, q, td) == oracle::exact_infer(net, q));
}

TEST_CASE("the prepared engine agrees with one-shot inference") {
  BayesNet net = gen_random_net(7, 2, Structure::RandomDag, 2, 88);
  TreeDecomposition td = decompose(moralize(net));
  InferenceEngine<double> engine(net, td);
  for (std::uint64_t s = 0; s < 20; ++s) {
    QuerySets q = random_query(7, 2, s * 13 + 1);
    CHECK(engine.query(q) == doctest::Approx(infer<double>(net, q, td)).epsilon(1e-12));
  }
}

TEST_CASE("scope bound violations are detected") {
  BayesNet net = gen_random_net(6, 2, Structure::RandomDag, 2, 4);
  QuerySets q = QuerySets::full(6, 2);
  // max_scope 1 cannot hold for any net with edges.
  std::vector<int> order(6);
  for (int i = 0; i < 6; ++i) order[i] = i;
  CHECK_THROWS_AS(infer_with_order<double>(net, q, order, 1), InputError);
}
