#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tvdist/coupling.hpp"
#include "tvdist/inference.hpp"
#include "tvdist/model.hpp"
#include "tvdist/rng.hpp"

namespace tvdist {

struct EstimateParams {
  double eps = 0.1;
  double delta = 0.1;
  std::uint64_t seed = 0;
  std::optional<long long> m_override;
  int threads = 1;
  bool exact_arith = false;
};

struct EstimateReport {
  double estimate = 0.0;
  long long m = 0;
  double z = 0.0;          // normalizer in d_TV mode, threshold in uniform mode
  double alpha_hat = 0.0;  // mean of the f samples (estimate / z)
  long long queries = 0;   // probabilistic inference queries issued
  std::uint64_t seed = 0;
  double elapsed_ms = 0.0;
  int width = 0;           // achieved decomposition width
  std::string phase;       // uniform mode: "additive" or "relative"
  std::string estimate_exact;  // exact-arithmetic runs: estimate as a/b
};

// min of the two conditionals of node i under the full assignment w.
double h_term(const BayesNet& p, const BayesNet& q, const std::vector<int>& w,
              int i);

// P(w) minus the product of the h terms; nonnegative for valid inputs.
double g_value(const BayesNet& p, const BayesNet& q, const std::vector<int>& w);

// max(0, P(w) - Q(w)) / g(w), always in [0, 1]; requires g(w) > 0, which
// holds on the support of the sampling distribution.
double f_value(const BayesNet& p, const BayesNet& q, const std::vector<int>& w);

// Number of samples closing the Hoeffding bound 2 exp(-m eps^2 / (2 n^2))
// at confidence delta: ceil(2 n^2 eps^-2 ln(2/delta)).
long long sample_count(int n, double eps, double delta);

// Tracks issued inference queries; merged after parallel sections.
struct QueryCounter {
  long long count = 0;
};

// Z = Pr[X != Y] under the coupling, via one diagonal query.
template <typename T>
T compute_Z(const CouplingNet& cn, const InferenceEngine<T>& engine,
            QueryCounter& counter);

// Z restricted to assignments whose first k topo-order symbols match the
// prefix; two queries.
template <typename T>
T compute_Z_prefix(const CouplingNet& cn, const InferenceEngine<T>& engine,
                   const std::vector<int>& prefix, QueryCounter& counter);

// Draws one assignment distributed as g(w)/Z, symbol by symbol in
// topological order; at most 2 l n queries per draw.
template <typename T>
std::vector<int> sample_pi(const CouplingNet& cn,
                           const InferenceEngine<T>& engine, const T& z,
                           SplitMix64& rng, QueryCounter& counter);

// The d_TV FPRAS: builds the coupling, computes Z, and averages f over
// samples from pi. Guarantee: relative error eps with probability
// 1 - delta.
EstimateReport estimate_tv(const BayesNet& p, const BayesNet& q,
                           const EstimateParams& params);

// FPRAS against the uniform distribution. Phase A forms an additive
// estimate from uniform draws of max(0, 1 - P(x) l^n); if it clears the
// threshold 1 / (8 l^(d+1)) it already has relative error eps, otherwise
// phase B averages max(0, P(x) l^n - 1) over fresh uniform draws.
EstimateReport estimate_tv_uniform(const BayesNet& p,
                                   const EstimateParams& params);

extern template double compute_Z(const CouplingNet&,
                                 const InferenceEngine<double>&,
                                 QueryCounter&);
extern template Rational compute_Z(const CouplingNet&,
                                   const InferenceEngine<Rational>&,
                                   QueryCounter&);
extern template double compute_Z_prefix(const CouplingNet&,
                                        const InferenceEngine<double>&,
                                        const std::vector<int>&,
                                        QueryCounter&);
extern template Rational compute_Z_prefix(const CouplingNet&,
                                          const InferenceEngine<Rational>&,
                                          const std::vector<int>&,
                                          QueryCounter&);
extern template std::vector<int> sample_pi(const CouplingNet&,
                                           const InferenceEngine<double>&,
                                           const double&, SplitMix64&,
                                           QueryCounter&);
extern template std::vector<int> sample_pi(const CouplingNet&,
                                           const InferenceEngine<Rational>&,
                                           const Rational&, SplitMix64&,
                                           QueryCounter&);

}  // namespace tvdist
