#include "tvdist/estimator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <thread>

#include "tvdist/treedecomp.hpp"

namespace tvdist {

namespace {

template <typename T>
T conditional_at(const BayesNet& net, int i, const std::vector<int>& w) {
  int row = net.parent_row(i, w);
  if constexpr (std::is_same_v<T, double>)
    return net.cpts[i].value(row, w[i]);
  else
    return net.cpts[i].exact_value(row, w[i]);
}

template <typename T>
T mass_at(const BayesNet& net, const std::vector<int>& w) {
  T m(1);
  for (int i = 0; i < net.dag.n; ++i) m *= conditional_at<T>(net, i, w);
  return m;
}

template <typename T>
T g_value_t(const BayesNet& p, const BayesNet& q, const std::vector<int>& w) {
  T hprod(1);
  for (int i = 0; i < p.dag.n; ++i)
    hprod *= std::min(conditional_at<T>(p, i, w), conditional_at<T>(q, i, w));
  return mass_at<T>(p, w) - hprod;
}

template <typename T>
T f_value_t(const BayesNet& p, const BayesNet& q, const std::vector<int>& w) {
  T num = mass_at<T>(p, w) - mass_at<T>(q, w);
  if (num < 0) num = T(0);
  T g = g_value_t<T>(p, q, w);
  if (g <= 0) {
    if (num == 0) return T(0);
    throw std::logic_error("f evaluated where g(w) = 0");
  }
  return num / g;
}

inline double to_double_value(double v) { return v; }
inline double to_double_value(const Rational& r) { return to_double(r); }

// Deterministic pairwise-tree sum, independent of thread count.
template <typename T>
T pairwise_sum(const T* values, std::size_t count) {
  if (count <= 8) {
    T s(0);
    for (std::size_t i = 0; i < count; ++i) s += values[i];
    return s;
  }
  std::size_t half = count / 2;
  return pairwise_sum(values, half) + pairwise_sum(values + half, count - half);
}

std::vector<bool> diag_row(int l) {
  std::vector<bool> row(static_cast<std::size_t>(l) * l, false);
  for (int b = 0; b < l; ++b) row[static_cast<std::size_t>(b) * l + b] = true;
  return row;
}

std::vector<bool> first_coord_row(int b, int l) {
  std::vector<bool> row(static_cast<std::size_t>(l) * l, false);
  for (int z = 0; z < l; ++z) row[static_cast<std::size_t>(b) * l + z] = true;
  return row;
}

std::vector<bool> pair_row(int b, int l) {
  std::vector<bool> row(static_cast<std::size_t>(l) * l, false);
  row[static_cast<std::size_t>(b) * l + b] = true;
  return row;
}

}  // namespace

double h_term(const BayesNet& p, const BayesNet& q, const std::vector<int>& w,
              int i) {
  if (i < 0 || i >= p.dag.n) throw InputError("node index out of range");
  return std::min(conditional_at<double>(p, i, w),
                  conditional_at<double>(q, i, w));
}

double g_value(const BayesNet& p, const BayesNet& q,
               const std::vector<int>& w) {
  return g_value_t<double>(p, q, w);
}

double f_value(const BayesNet& p, const BayesNet& q,
               const std::vector<int>& w) {
  return f_value_t<double>(p, q, w);
}

long long sample_count(int n, double eps, double delta) {
  if (!(eps > 0.0 && eps < 1.0)) throw InputError("eps must be in (0,1)");
  if (!(delta > 0.0 && delta < 1.0)) throw InputError("delta must be in (0,1)");
  double m = 2.0 * static_cast<double>(n) * n / (eps * eps) *
             std::log(2.0 / delta);
  return static_cast<long long>(std::ceil(m));
}

template <typename T>
T compute_Z(const CouplingNet& cn, const InferenceEngine<T>& engine,
            QueryCounter& counter) {
  const int n = cn.net.dag.n;
  const int l = cn.base_alphabet;
  QuerySets q;
  q.allow.assign(n, diag_row(l));
  ++counter.count;
  return T(1) - engine.query(q);
}

template <typename T>
T compute_Z_prefix(const CouplingNet& cn, const InferenceEngine<T>& engine,
                   const std::vector<int>& prefix, QueryCounter& counter) {
  const int n = cn.net.dag.n;
  const int l = cn.base_alphabet;
  const int l2 = cn.net.alphabet;
  if (static_cast<int>(prefix.size()) > n) throw InputError("prefix too long");
  for (int b : prefix)
    if (b < 0 || b >= l) throw InputError("prefix symbol out of range");
  if (prefix.empty()) return compute_Z(cn, engine, counter);

  const auto& topo = cn.net.dag.topo_order;
  // First query: the prefix constrains X only; the rest is free.
  QuerySets q1 = QuerySets::full(n, l2);
  // Second query: the prefix pins (X, Y) to the diagonal value; the rest
  // stays on the diagonal.
  QuerySets q2;
  q2.allow.assign(n, diag_row(l));
  for (std::size_t k = 0; k < prefix.size(); ++k) {
    q1.allow[topo[k]] = first_coord_row(prefix[k], l);
    q2.allow[topo[k]] = pair_row(prefix[k], l);
  }
  counter.count += 2;
  return engine.query(q1) - engine.query(q2);
}

template <typename T>
std::vector<int> sample_pi(const CouplingNet& cn,
                           const InferenceEngine<T>& engine, const T& z,
                           SplitMix64& rng, QueryCounter& counter) {
  const int n = cn.net.dag.n;
  const int l = cn.base_alphabet;
  const int l2 = cn.net.alphabet;
  if (z <= 0) throw std::logic_error("sample_pi requires Z > 0");
  const auto& topo = cn.net.dag.topo_order;

  QuerySets q1 = QuerySets::full(n, l2);
  QuerySets q2;
  q2.allow.assign(n, diag_row(l));

  std::vector<int> w(n, 0);
  T denom = z;  // prefix normalizer, reused from the previous step
  std::vector<T> nu(l, T(0));
  for (int k = 0; k < n; ++k) {
    const int v = topo[k];
    T running(0);
    for (int b = 0; b + 1 < l; ++b) {
      q1.allow[v] = first_coord_row(b, l);
      q2.allow[v] = pair_row(b, l);
      counter.count += 2;
      T val = engine.query(q1) - engine.query(q2);
      if (val < 0) val = T(0);
      nu[b] = val;
      running += val;
    }
    nu[l - 1] = denom - running;
    if (nu[l - 1] < 0) nu[l - 1] = T(0);

    T target = T(rng.next_double()) * denom;
    int chosen = -1;
    T cum(0);
    for (int b = 0; b < l; ++b) {
      cum += nu[b];
      if (target < cum) {
        chosen = b;
        break;
      }
    }
    if (chosen == -1) {
      // Float round-off at the top of the CDF; take the last live symbol.
      for (int b = l - 1; b >= 0; --b)
        if (nu[b] > 0) {
          chosen = b;
          break;
        }
      if (chosen == -1) chosen = l - 1;
    }
    w[v] = chosen;
    denom = nu[chosen];
    q1.allow[v] = first_coord_row(chosen, l);
    q2.allow[v] = pair_row(chosen, l);
  }
  return w;
}

namespace {

template <typename T>
void run_tv(const BayesNet& p, const BayesNet& q, const CouplingNet& cn,
            const TreeDecomposition& td, const EstimateParams& params,
            EstimateReport& report) {
  const int n = p.dag.n;
  InferenceEngine<T> engine(cn.net, td);
  QueryCounter counter;
  T z = compute_Z(cn, engine, counter);
  if (z < 0) z = T(0);
  report.z = to_double_value(z);

  bool z_is_zero;
  if constexpr (std::is_same_v<T, double>)
    z_is_zero = z <= 1e-12;
  else
    z_is_zero = z == 0;
  if (z_is_zero) {
    report.estimate = 0.0;
    report.m = 0;
    report.alpha_hat = 0.0;
    report.queries = counter.count;
    if constexpr (std::is_same_v<T, Rational>) report.estimate_exact = "0";
    return;
  }

  const long long m =
      params.m_override ? *params.m_override : sample_count(n, params.eps, params.delta);
  std::vector<T> fvals(static_cast<std::size_t>(m), T(0));

  int threads = std::max(1, params.threads);
  if (static_cast<long long>(threads) > m) threads = static_cast<int>(m);
  std::vector<QueryCounter> local(threads);
  auto worker = [&](int t, long long lo, long long hi) {
    InferenceEngine<T> own = engine;  // query buffers are per-thread
    for (long long i = lo; i < hi; ++i) {
      SplitMix64 rng = SplitMix64::derive(params.seed, static_cast<std::uint64_t>(i) + 1);
      std::vector<int> w = sample_pi(cn, own, z, rng, local[t]);
      fvals[static_cast<std::size_t>(i)] = f_value_t<T>(p, q, w);
    }
  };
  if (threads == 1) {
    worker(0, 0, m);
  } else {
    std::vector<std::thread> pool;
    long long chunk = (m + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
      long long lo = t * chunk, hi = std::min<long long>(m, lo + chunk);
      if (lo >= hi) break;
      pool.emplace_back(worker, t, lo, hi);
    }
    for (auto& th : pool) th.join();
  }
  for (const auto& c : local) counter.count += c.count;

  T total = pairwise_sum(fvals.data(), fvals.size());
  T alpha = total / T(static_cast<double>(m));
  T est = z * alpha;
  report.estimate = to_double_value(est);
  report.alpha_hat = to_double_value(alpha);
  report.m = m;
  report.queries = counter.count;
  if constexpr (std::is_same_v<T, Rational>)
    report.estimate_exact = to_string(est);
}

}  // namespace

EstimateReport estimate_tv(const BayesNet& p, const BayesNet& q,
                           const EstimateParams& params) {
  auto t0 = std::chrono::steady_clock::now();
  if (!(params.eps > 0.0 && params.eps < 1.0))
    throw InputError("eps must be in (0,1)");
  if (!(params.delta > 0.0 && params.delta < 1.0))
    throw InputError("delta must be in (0,1)");

  CouplingNet cn = build_coupling(p, q);
  TreeDecomposition td = decompose(moralize(cn.net));

  EstimateReport report;
  report.seed = params.seed;
  report.width = td.width;
  if (params.exact_arith)
    run_tv<Rational>(p, q, cn, td, params, report);
  else
    run_tv<double>(p, q, cn, td, params, report);

  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return report;
}

EstimateReport estimate_tv_uniform(const BayesNet& p,
                                   const EstimateParams& params) {
  auto t0 = std::chrono::steady_clock::now();
  if (!(params.eps > 0.0 && params.eps < 1.0))
    throw InputError("eps must be in (0,1)");
  if (!(params.delta > 0.0 && params.delta < 1.0))
    throw InputError("delta must be in (0,1)");

  const int n = p.dag.n;
  const int l = p.alphabet;
  const int d = p.dag.max_indegree();
  const double ld1 = std::pow(static_cast<double>(l), d + 1);
  const double threshold = 1.0 / (8.0 * ld1);
  const double log_term = std::log(4.0 / params.delta);
  const double eps2 = params.eps * params.eps;

  EstimateReport report;
  report.seed = params.seed;
  report.z = threshold;
  report.queries = 0;
  report.width = 0;

  const auto& topo = p.dag.topo_order;
  // Ratio P(x) l^n as a running product of per-node (prob * l) terms;
  // keeps the value in range for long chains.
  auto sample_ratio = [&](SplitMix64& rng, std::vector<int>& x) {
    for (int i = 0; i < n; ++i)
      x[i] = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(l)));
    double ratio = 1.0;
    for (int i : topo) {
      int row = p.parent_row(i, x);
      ratio *= p.cpts[i].value(row, x[i]) * l;
    }
    return ratio;
  };

  // Chunked pairwise reduction: deterministic and memory-bounded.
  constexpr std::size_t kChunk = 1 << 16;
  auto run_phase = [&](long long m, std::uint64_t stream_base, bool additive) {
    std::vector<double> buf(kChunk);
    std::vector<double> partials;
    std::vector<int> x(n);
    long long done = 0;
    while (done < m) {
      std::size_t take =
          static_cast<std::size_t>(std::min<long long>(m - done, kChunk));
      for (std::size_t j = 0; j < take; ++j) {
        SplitMix64 rng = SplitMix64::derive(
            params.seed, stream_base + static_cast<std::uint64_t>(done + j));
        double ratio = sample_ratio(rng, x);
        buf[j] = additive ? std::max(0.0, 1.0 - ratio)
                          : std::max(0.0, ratio - 1.0);
      }
      partials.push_back(pairwise_sum(buf.data(), take));
      done += take;
    }
    return pairwise_sum(partials.data(), partials.size()) /
           static_cast<double>(m);
  };

  const long long m_a =
      params.m_override
          ? *params.m_override
          : static_cast<long long>(std::ceil(512.0 * ld1 * ld1 / eps2 * log_term));
  double est_a = run_phase(m_a, 1, /*additive=*/true);

  if (est_a > threshold) {
    report.phase = "additive";
    report.estimate = est_a;
    report.alpha_hat = est_a;
    report.m = m_a;
  } else {
    const long long m_b =
        params.m_override
            ? *params.m_override
            : static_cast<long long>(std::ceil(
                  512.0 * n * n * ld1 * ld1 / eps2 * log_term));
    double est_b = run_phase(m_b, static_cast<std::uint64_t>(m_a) + 1,
                             /*additive=*/false);
    report.phase = "relative";
    report.estimate = est_b;
    report.alpha_hat = est_b;
    report.m = m_a + m_b;
  }

  report.elapsed_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - t0)
                          .count();
  return report;
}

template double compute_Z(const CouplingNet&, const InferenceEngine<double>&,
                          QueryCounter&);
template Rational compute_Z(const CouplingNet&,
                            const InferenceEngine<Rational>&, QueryCounter&);
template double compute_Z_prefix(const CouplingNet&,
                                 const InferenceEngine<double>&,
                                 const std::vector<int>&, QueryCounter&);
template Rational compute_Z_prefix(const CouplingNet&,
                                   const InferenceEngine<Rational>&,
                                   const std::vector<int>&, QueryCounter&);
template std::vector<int> sample_pi(const CouplingNet&,
                                    const InferenceEngine<double>&,
                                    const double&, SplitMix64&, QueryCounter&);
template std::vector<int> sample_pi(const CouplingNet&,
                                    const InferenceEngine<Rational>&,
                                    const Rational&, SplitMix64&,
                                    QueryCounter&);

}  // namespace tvdist
