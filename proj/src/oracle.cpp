#include "tvdist/oracle.hpp"

#include <algorithm>

namespace tvdist {
namespace oracle {

namespace {

// Advance a mixed-radix counter; false once it wraps.
bool next_assignment(std::vector<int>& x, int alphabet) {
  for (std::size_t j = x.size(); j-- > 0;) {
    if (++x[j] < alphabet) return true;
    x[j] = 0;
  }
  return false;
}

void require_same_shape(const BayesNet& p, const BayesNet& q) {
  if (p.dag.n != q.dag.n || p.dag.parents != q.dag.parents)
    throw InputError("nets must share a DAG");
  if (p.alphabet != q.alphabet) throw InputError("nets must share an alphabet");
}

}  // namespace

long long outcome_count(int n, int alphabet, long long budget) {
  __int128 count = 1;
  for (int i = 0; i < n; ++i) {
    count *= alphabet;
    if (count > budget)
      throw BudgetError("enumeration budget exceeded: " + std::to_string(n) +
                        " variables over alphabet " + std::to_string(alphabet) +
                        " need more than " + std::to_string(budget) +
                        " outcomes");
  }
  return static_cast<long long>(count);
}

Rational exact_mass(const BayesNet& net, const std::vector<int>& x) {
  Rational m(1);
  for (int i = 0; i < net.dag.n; ++i) {
    int row = 0;
    for (int par : net.dag.parents[i]) row = row * net.alphabet + x[par];
    m *= net.cpts[i].exact_value(row, x[i]);
  }
  return m;
}

Rational exact_tv(const BayesNet& p, const BayesNet& q, long long budget) {
  require_same_shape(p, q);
  outcome_count(p.dag.n, p.alphabet, budget);
  Rational acc(0);
  std::vector<int> x(p.dag.n, 0);
  do {
    Rational diff = exact_mass(p, x) - exact_mass(q, x);
    if (diff < 0) diff = -diff;
    acc += diff;
  } while (next_assignment(x, p.alphabet));
  return acc / 2;
}

Rational exact_tv_uniform(const BayesNet& p, long long budget) {
  long long total = outcome_count(p.dag.n, p.alphabet, budget);
  Rational u(1, static_cast<unsigned long>(total));
  u.canonicalize();
  Rational acc(0);
  std::vector<int> x(p.dag.n, 0);
  do {
    Rational diff = exact_mass(p, x) - u;
    if (diff < 0) diff = -diff;
    acc += diff;
  } while (next_assignment(x, p.alphabet));
  return acc / 2;
}

Rational exact_infer(const BayesNet& net, const QuerySets& q,
                     long long budget) {
  outcome_count(net.dag.n, net.alphabet, budget);
  if (static_cast<int>(q.allow.size()) != net.dag.n)
    throw InputError("query set count mismatch");
  Rational acc(0);
  std::vector<int> x(net.dag.n, 0);
  do {
    bool consistent = true;
    for (int i = 0; i < net.dag.n && consistent; ++i)
      consistent = q.allow[i][x[i]];
    if (consistent) acc += exact_mass(net, x);
  } while (next_assignment(x, net.alphabet));
  return acc;
}

Rational exact_g(const BayesNet& p, const BayesNet& q,
                 const std::vector<int>& w) {
  Rational hprod(1);
  for (int i = 0; i < p.dag.n; ++i) {
    int row = 0;
    for (int par : p.dag.parents[i]) row = row * p.alphabet + w[par];
    const Rational& pv = p.cpts[i].exact_value(row, w[i]);
    const Rational& qv = q.cpts[i].exact_value(row, w[i]);
    hprod *= (pv < qv) ? pv : qv;
  }
  return exact_mass(p, w) - hprod;
}

Rational exact_f(const BayesNet& p, const BayesNet& q,
                 const std::vector<int>& w) {
  Rational num = exact_mass(p, w) - exact_mass(q, w);
  if (num < 0) num = 0;
  Rational g = exact_g(p, q, w);
  if (g == 0) {
    if (num == 0) return Rational(0);
    throw std::logic_error("f undefined where g(w) = 0");
  }
  return num / g;
}

Rational exact_Z(const BayesNet& p, const BayesNet& q, long long budget) {
  require_same_shape(p, q);
  outcome_count(p.dag.n, p.alphabet, budget);
  Rational acc(0);
  std::vector<int> x(p.dag.n, 0);
  do {
    acc += exact_g(p, q, x);
  } while (next_assignment(x, p.alphabet));
  return acc;
}

Rational exact_prefix_Z(const BayesNet& p, const BayesNet& q,
                        const std::vector<int>& prefix, long long budget) {
  require_same_shape(p, q);
  outcome_count(p.dag.n, p.alphabet, budget);
  const auto& topo = p.dag.topo_order;
  if (prefix.size() > topo.size()) throw InputError("prefix too long");
  Rational acc(0);
  std::vector<int> x(p.dag.n, 0);
  do {
    bool consistent = true;
    for (std::size_t k = 0; k < prefix.size() && consistent; ++k)
      consistent = x[topo[k]] == prefix[k];
    if (consistent) acc += exact_g(p, q, x);
  } while (next_assignment(x, p.alphabet));
  return acc;
}

IdentityCheck exact_identity_check(const BayesNet& p, const BayesNet& q,
                                   long long budget) {
  require_same_shape(p, q);
  const int n = p.dag.n;
  const int l = p.alphabet;
  outcome_count(n, l, budget);
  // The X-marginal check walks the coupling's paired space.
  outcome_count(n, l * l, budget);

  IdentityCheck out;
  Rational tv = exact_tv(p, q, budget);
  Rational z(0), sum_gf(0);
  bool g_nonneg = true, g_dom = true;
  std::vector<int> x(n, 0);
  do {
    Rational g = exact_g(p, q, x);
    if (g < 0) g_nonneg = false;
    Rational gap = exact_mass(p, x) - exact_mass(q, x);
    if (gap < 0) gap = 0;
    if (g < gap) g_dom = false;
    z += g;
    if (g > 0) sum_gf += g * exact_f(p, q, x);
  } while (next_assignment(x, l));

  out.g_nonnegative = g_nonneg;
  out.g_dominates_gap = g_dom;
  out.sum_gf_equals_tv = (sum_gf == tv);
  out.z_lower_bound = (tv <= z);
  out.z_upper_bound = (z <= Rational(2 * n) * tv);

  // X-marginal of the coupling equals P pointwise.
  CouplingNet cn = build_coupling(p, q);
  std::vector<Rational> marginal(
      static_cast<std::size_t>(outcome_count(n, l, budget)), Rational(0));
  std::vector<int> pair_x(n, 0);
  std::vector<int> first(n, 0);
  do {
    Rational mass = exact_mass(cn.net, pair_x);
    if (mass != 0) {
      std::size_t idx = 0;
      for (int i = 0; i < n; ++i) {
        first[i] = pair_x[i] / l;
        idx = idx * l + static_cast<std::size_t>(first[i]);
      }
      marginal[idx] += mass;
    }
  } while (next_assignment(pair_x, l * l));

  bool marginal_ok = true;
  std::fill(x.begin(), x.end(), 0);
  std::size_t idx = 0;
  do {
    if (marginal[idx] != exact_mass(p, x)) {
      marginal_ok = false;
      break;
    }
    ++idx;
  } while (next_assignment(x, l));
  out.x_marginal_is_p = marginal_ok;
  return out;
}

}  // namespace oracle
}  // namespace tvdist
