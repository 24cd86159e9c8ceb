#pragma once

#include <string>
#include <vector>

#include "tvdist/coupling.hpp"
#include "tvdist/inference.hpp"
#include "tvdist/model.hpp"

namespace tvdist {
namespace oracle {

// Brute-force exact references. Everything here enumerates the full
// sample space in rational arithmetic and is deliberately independent of
// the engine's evaluation path. Calls refuse (BudgetError) when the
// outcome count exceeds the budget.

inline constexpr long long kDefaultBudget = 300000;

// l^n outcomes, refusing above the budget.
long long outcome_count(int n, int alphabet, long long budget);

Rational exact_mass(const BayesNet& net, const std::vector<int>& x);

Rational exact_tv(const BayesNet& p, const BayesNet& q,
                  long long budget = kDefaultBudget);

// d_TV(P, U) for the uniform distribution over [l]^n.
Rational exact_tv_uniform(const BayesNet& p,
                          long long budget = kDefaultBudget);

Rational exact_infer(const BayesNet& net, const QuerySets& q,
                     long long budget = kDefaultBudget);

Rational exact_g(const BayesNet& p, const BayesNet& q,
                 const std::vector<int>& w);
Rational exact_f(const BayesNet& p, const BayesNet& q,
                 const std::vector<int>& w);

Rational exact_Z(const BayesNet& p, const BayesNet& q,
                 long long budget = kDefaultBudget);

// Prefix symbols are positions 1..k of the DAG's topological order.
Rational exact_prefix_Z(const BayesNet& p, const BayesNet& q,
                        const std::vector<int>& prefix,
                        long long budget = kDefaultBudget);

struct IdentityCheck {
  bool sum_gf_equals_tv = false;   // sum_w g(w) f(w) = d_TV
  bool z_lower_bound = false;      // d_TV <= Z
  bool z_upper_bound = false;      // Z <= 2 n d_TV
  bool g_nonnegative = false;      // g(w) >= 0 for all w
  bool g_dominates_gap = false;    // g(w) >= max(0, P(w) - Q(w))
  bool x_marginal_is_p = false;    // sum_y L(x, y) = P(x) for all x
  bool all() const {
    return sum_gf_equals_tv && z_lower_bound && z_upper_bound &&
           g_nonnegative && g_dominates_gap && x_marginal_is_p;
  }
};

IdentityCheck exact_identity_check(const BayesNet& p, const BayesNet& q,
                                   long long budget = kDefaultBudget);

}  // namespace oracle
}  // namespace tvdist
