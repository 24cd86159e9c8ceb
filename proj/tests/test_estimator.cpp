#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "test_util.hpp"
#include "tvdist/estimator.hpp"
#include "tvdist/oracle.hpp"
#include "tvdist/treedecomp.hpp"

using namespace tvdist;
using namespace tvtest;

namespace {

bool next_assignment(std::vector<int>& x, int alphabet) {
  for (std::size_t j = x.size(); j-- > 0;) {
    if (++x[j] < alphabet) return true;
    x[j] = 0;
  }
  return false;
}

struct Prepared {
  CouplingNet cn;
  TreeDecomposition td;
  InferenceEngine<double> engine;
  Prepared(const BayesNet& p, const BayesNet& q)
      : cn(build_coupling(p, q)),
        td(decompose(moralize(cn.net))),
        engine(cn.net, td) {}
};

}  // namespace

TEST_CASE("h_term on the worked example") {
  BayesNet p = footnote_p(), q = footnote_q();
  CHECK(h_term(p, q, {0, 0}, 0) == doctest::Approx(1.0 / 3));
  BayesNet same = p;
  CHECK(h_term(p, same, {0, 1}, 1) == doctest::Approx(1.0 / 3));
  // h never exceeds either conditional.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    BayesNet a = gen_random_net(5, 2, Structure::Tree, 0, seed);
    BayesNet b = perturb_net(a, Rational(1, 8), seed);
    std::vector<int> w(5, 0);
    do {
      for (int i = 0; i < 5; ++i) {
        double h = h_term(a, b, w, i);
        std::vector<int> pa;
        for (int par : a.dag.parents[i]) pa.push_back(w[par]);
        CHECK(h <= a.conditional(i, w[i], pa) + 1e-15);
        CHECK(h <= b.conditional(i, w[i], pa) + 1e-15);
      }
    } while (next_assignment(w, 2));
  }
}

TEST_CASE("g_value on the worked example") {
  BayesNet p = footnote_p(), q = footnote_q();
  CHECK(g_value(p, q, {0, 0}) == doctest::Approx(1.0 / 3));
  CHECK(g_value(p, q, {1, 1}) == doctest::Approx(0.0));
  BayesNet same = p;
  std::vector<int> w{1, 0};
  CHECK(g_value(p, same, w) == doctest::Approx(0.0));
}

TEST_CASE("f_value on the worked example") {
  BayesNet p = footnote_p(), q = footnote_q();
  CHECK(f_value(p, q, {0, 0}) == doctest::Approx(1.0));
  CHECK(f_value(p, q, {0, 1}) == doctest::Approx(0.0));
}

TEST_CASE("f stays in [0,1] and g dominates the gap") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    int n = 3 + static_cast<int>(seed % 3);
    int l = 2 + static_cast<int>(seed % 2);
    BayesNet p = gen_random_net(n, l, Structure::RandomDag, 2, seed);
    BayesNet q = perturb_net(p, Rational(1, 9), seed + 1);
    std::vector<int> w(n, 0);
    do {
      Rational g = oracle::exact_g(p, q, w);
      CHECK(g >= 0);
      Rational gap = oracle::exact_mass(p, w) - oracle::exact_mass(q, w);
      if (gap < 0) gap = 0;
      CHECK(g >= gap);
      if (g > 0) {
        Rational f = oracle::exact_f(p, q, w);
        CHECK(f >= 0);
        CHECK(f <= 1);
      }
    } while (next_assignment(w, l));
  }
}

TEST_CASE("sample_count instantiates the Hoeffding bound") {
  CHECK(sample_count(2, 0.1, 0.05) == 2952);
  // Doubling n quadruples m (pre-ceiling scaling).
  long long m1 = sample_count(3, 0.2, 0.1);
  long long m2 = sample_count(6, 0.2, 0.1);
  CHECK(std::abs(4.0 * static_cast<double>(m1) - static_cast<double>(m2)) <= 4.0);
  CHECK_THROWS_AS(sample_count(2, 1.5, 0.1), InputError);
}

TEST_CASE("compute_Z on the worked example is 5/9") {
  BayesNet p = footnote_p(), q = footnote_q();
  Prepared prep(p, q);
  QueryCounter counter;
  double z = compute_Z(prep.cn, prep.engine, counter);
  CHECK(z == doctest::Approx(5.0 / 9).epsilon(1e-12));
  CHECK(counter.count == 1);
  // Z = 0 when the nets agree.
  Prepared same(p, p);
  CHECK(compute_Z(same.cn, same.engine, counter) == doctest::Approx(0.0));
}

TEST_CASE("compute_Z equals the g-sum oracle on random nets") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    int n = 3 + static_cast<int>(seed % 4);
    BayesNet p = gen_random_net(n, 2, Structure::RandomDag, 2, seed);
    BayesNet q = perturb_net(p, Rational(1, 6), seed + 7);
    Prepared prep(p, q);
    QueryCounter counter;
    double z = compute_Z(prep.cn, prep.engine, counter);
    CHECK(z == doctest::Approx(to_double(oracle::exact_Z(p, q))).epsilon(1e-9));
  }
}

TEST_CASE("prefix Z values") {
  BayesNet p = footnote_p(), q = footnote_q();
  Prepared prep(p, q);
  QueryCounter counter;
  SUBCASE("empty prefix reduces to Z") {
    CHECK(compute_Z_prefix(prep.cn, prep.engine, {}, counter) ==
          doctest::Approx(5.0 / 9));
  }
  SUBCASE("worked example prefix (first symbol 0) gives 4/9") {
    CHECK(compute_Z_prefix(prep.cn, prep.engine, {0}, counter) ==
          doctest::Approx(4.0 / 9).epsilon(1e-12));
    CHECK(counter.count == 2);
  }
  SUBCASE("full-length prefix equals g") {
    for (std::uint64_t seed = 0; seed < 6; ++seed) {
      BayesNet a = gen_random_net(4, 2, Structure::Tree, 0, seed);
      BayesNet b = perturb_net(a, Rational(1, 5), seed);
      Prepared pr(a, b);
      std::vector<int> w(4, 0);
      do {
        // Prefix symbols are in topo order.
        std::vector<int> prefix(4);
        for (int k = 0; k < 4; ++k) prefix[k] = w[a.dag.topo_order[k]];
        double got = compute_Z_prefix(pr.cn, pr.engine, prefix, counter);
        CHECK(got == doctest::Approx(to_double(oracle::exact_g(a, b, w)))
                         .epsilon(1e-9));
      } while (next_assignment(w, 2));
    }
  }
  SUBCASE("prefix values match the prefix oracle") {
    for (int b : {0, 1}) {
      double got = compute_Z_prefix(prep.cn, prep.engine, {b}, counter);
      CHECK(got ==
            doctest::Approx(to_double(oracle::exact_prefix_Z(p, q, {b}))));
    }
  }
}

TEST_CASE("sample_pi never leaves the support of pi") {
  BayesNet p = footnote_p(), q = footnote_q();
  Prepared prep(p, q);
  QueryCounter counter;
  double z = compute_Z(prep.cn, prep.engine, counter);
  for (std::uint64_t i = 0; i < 200; ++i) {
    SplitMix64 rng = SplitMix64::derive(11, i);
    std::vector<int> w = sample_pi(prep.cn, prep.engine, z, rng, counter);
    CHECK(g_value(p, q, w) > 0);
    CHECK(w != std::vector<int>{1, 1});  // g(2,2) = 0 in 1-based terms
  }
}

TEST_CASE("sample_pi empirical law matches pi = g/Z") {
  BayesNet p = footnote_p(), q = footnote_q();
  Prepared prep(p, q);
  QueryCounter counter;
  double z = compute_Z(prep.cn, prep.engine, counter);
  const int trials = 100000;
  std::map<std::vector<int>, int> hist;
  for (std::uint64_t i = 0; i < trials; ++i) {
    SplitMix64 rng = SplitMix64::derive(4242, i);
    ++hist[sample_pi(prep.cn, prep.engine, z, rng, counter)];
  }
  // pi(0,0) = 3/5, pi(0,1) = pi(1,0) = 1/5, pi(1,1) = 0.
  auto freq = [&](std::vector<int> w) {
    return static_cast<double>(hist[w]) / trials;
  };
  CHECK(freq({0, 0}) == doctest::Approx(0.6).epsilon(0.02));
  CHECK(freq({0, 1}) == doctest::Approx(0.2).epsilon(0.04));
  CHECK(freq({1, 0}) == doctest::Approx(0.2).epsilon(0.04));
  CHECK(hist[{1, 1}] == 0);
  // Query accounting: at most 2 l n per draw plus the Z query.
  CHECK(counter.count <= 2LL * 2 * 2 * (trials + 200) + 1);
}

TEST_CASE("estimate_tv short-circuits when P = Q") {
  BayesNet p = gen_random_net(5, 2, Structure::Tree, 0, 2);
  EstimateParams params;
  params.eps = 0.1;
  params.delta = 0.1;
  params.seed = 1;
  EstimateReport rep = estimate_tv(p, p, params);
  CHECK(rep.estimate == 0.0);
  CHECK(rep.m == 0);
  CHECK(rep.z == doctest::Approx(0.0));
  CHECK(rep.queries == 1);
}

TEST_CASE("estimate_tv on the worked example hits 1/3 within eps") {
  EstimateParams params;
  params.eps = 0.05;
  params.delta = 0.01;
  params.seed = 7;
  EstimateReport rep = estimate_tv(footnote_p(), footnote_q(), params);
  CHECK(rep.estimate >= (1.0 / 3) * (1 - params.eps));
  CHECK(rep.estimate <= (1.0 / 3) * (1 + params.eps));
  CHECK(rep.z == doctest::Approx(5.0 / 9));
  CHECK(rep.estimate == doctest::Approx(rep.z * rep.alpha_hat));
  CHECK(rep.queries <= 2LL * 2 * 2 * rep.m + 1);
}

TEST_CASE("estimate_tv is deterministic, also across thread counts") {
  BayesNet p = gen_random_net(5, 2, Structure::Path, 0, 31);
  BayesNet q = perturb_net(p, Rational(1, 5), 32);
  EstimateParams params;
  params.eps = 0.2;
  params.delta = 0.2;
  params.seed = 99;
  params.m_override = 500;
  EstimateReport a = estimate_tv(p, q, params);
  EstimateReport b = estimate_tv(p, q, params);
  params.threads = 4;
  EstimateReport c = estimate_tv(p, q, params);
  CHECK(a.estimate == b.estimate);
  CHECK(a.estimate == c.estimate);
  CHECK(a.queries == c.queries);
}

TEST_CASE("estimate_tv in exact arithmetic") {
  BayesNet p = footnote_p(), q = footnote_q();
  EstimateParams params;
  params.eps = 0.1;
  params.delta = 0.1;
  params.seed = 3;
  params.m_override = 2000;
  params.exact_arith = true;
  EstimateReport rep = estimate_tv(p, q, params);
  CHECK(!rep.estimate_exact.empty());
  CHECK(rep.estimate == doctest::Approx(1.0 / 3).epsilon(0.1));
}

TEST_CASE("estimate_tv rejects mismatched nets") {
  BayesNet p = gen_random_net(4, 2, Structure::Path, 0, 1);
  BayesNet q = gen_random_net(4, 3, Structure::Path, 0, 1);
  EstimateParams params;
  CHECK_THROWS_AS(estimate_tv(p, q, params), InputError);
}

TEST_CASE("uniform estimator: uniform net gives zero") {
  BayesNet u = uniform_net(4, 2);
  EstimateParams params;
  params.eps = 0.3;
  params.delta = 0.2;
  params.seed = 5;
  EstimateReport rep = estimate_tv_uniform(u, params);
  CHECK(rep.estimate == doctest::Approx(0.0));
  CHECK(rep.phase == "relative");
}

TEST_CASE("uniform estimator: point mass on one bit gives 1/2") {
  BayesNet p = parse_net(
      R"({"n":1,"alphabet":2,"parents":[[]],"cpt":[[["1","0"]]]})");
  EstimateParams params;
  params.eps = 0.1;
  params.delta = 0.1;
  params.seed = 17;
  EstimateReport rep = estimate_tv_uniform(p, params);
  CHECK(rep.estimate == doctest::Approx(0.5).epsilon(0.05));
  CHECK(rep.phase == "additive");
}

TEST_CASE("uniform estimator tracks the oracle on random nets") {
  int hits = 0, total = 0;
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    BayesNet p = gen_random_net(4, 2, Structure::RandomDag, 2, seed);
    double truth = to_double(oracle::exact_tv_uniform(p));
    EstimateParams params;
    params.eps = 0.15;
    params.delta = 0.1;
    params.seed = seed;
    EstimateReport rep = estimate_tv_uniform(p, params);
    ++total;
    if (std::abs(rep.estimate - truth) <= params.eps * truth) ++hits;
  }
  CHECK(hits >= total - 1);
}

TEST_CASE("Z bounds sandwich d_TV") {
  for (std::uint64_t seed = 0; seed < 15; ++seed) {
    int n = 3 + static_cast<int>(seed % 3);
    BayesNet p = gen_random_net(n, 2, Structure::RandomDag, 2, seed);
    BayesNet q = perturb_net(p, Rational(1, 6), seed + 3);
    Rational tv = oracle::exact_tv(p, q);
    Rational z = oracle::exact_Z(p, q);
    CHECK(tv <= z);
    CHECK(z <= Rational(2 * n) * tv);
  }
}
