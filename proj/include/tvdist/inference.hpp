#pragma once

#include <algorithm>
#include <cstddef>
#include <vector>

#include "tvdist/model.hpp"
#include "tvdist/treedecomp.hpp"

namespace tvdist {

// Nonnegative table over an ordered variable scope, row-major over the
// scope with a fixed alphabet. T is double or Rational.
template <typename T>
struct Factor {
  std::vector<int> scope;  // strictly ascending
  std::vector<T> table;
  int alphabet = 0;

  static Factor unit(int alphabet) {
    Factor f;
    f.alphabet = alphabet;
    f.table = {T(1)};
    return f;
  }
};

// Per-variable allowed-symbol sets S_1..S_n; an all-true row means the
// variable is unconstrained.
struct QuerySets {
  std::vector<std::vector<bool>> allow;

  static QuerySets full(int n, int alphabet) {
    QuerySets q;
    q.allow.assign(n, std::vector<bool>(alphabet, true));
    return q;
  }
};

template <typename T>
Factor<T> restrict_factor(const Factor<T>& f, int var,
                          const std::vector<bool>& allowed);

template <typename T>
Factor<T> multiply(const Factor<T>& f1, const Factor<T>& f2);

template <typename T>
Factor<T> sum_out(const Factor<T>& f, int var);

// Variable elimination along an explicit order. When max_scope >= 0, an
// intermediate factor with a larger scope raises InputError (the bound is
// width + 1 for an order derived from a decomposition).
template <typename T>
T infer_with_order(const BayesNet& net, const QuerySets& q,
                   const std::vector<int>& order, int max_scope = -1);

template <typename T>
T infer(const BayesNet& net, const QuerySets& q, const TreeDecomposition& td);

// Repeated queries on one (net, decomposition) pair share the same
// elimination structure; only table entries change under restriction.
// The engine precomputes that structure once and executes queries over
// preallocated buffers.
template <typename T>
class InferenceEngine {
 public:
  InferenceEngine(const BayesNet& net, const TreeDecomposition& td);
  InferenceEngine(const BayesNet& net, const std::vector<int>& order,
                  int max_scope);

  T query(const QuerySets& q) const;
  int width_bound() const { return max_scope_ - 1; }

 private:
  struct MulOp {
    int a = 0, b = 0, dst = 0;
    std::vector<std::size_t> stride_a, stride_b;
    std::size_t out_size = 0;
  };
  struct SumOp {
    int src = 0, dst = 0;
    std::size_t inner = 0, out_size = 0;
  };
  struct Step {
    bool is_mul = false;
    MulOp mul;
    SumOp sum;
  };

  void build(const BayesNet& net, const std::vector<int>& order);

  int n_ = 0;
  int alphabet_ = 0;
  int max_scope_ = 0;
  std::vector<std::vector<T>> base_;             // CPT factor tables
  std::vector<std::vector<int>> scopes_;         // per slot
  std::vector<std::size_t> node_stride_;         // stride of i in its factor
  std::vector<Step> plan_;
  std::vector<int> final_slots_;                 // scalar slots at the end
  mutable std::vector<std::vector<T>> buf_;
};

extern template class InferenceEngine<double>;
extern template class InferenceEngine<Rational>;

extern template struct Factor<double>;
extern template struct Factor<Rational>;
extern template Factor<double> restrict_factor(const Factor<double>&, int,
                                               const std::vector<bool>&);
extern template Factor<Rational> restrict_factor(const Factor<Rational>&, int,
                                                 const std::vector<bool>&);
extern template Factor<double> multiply(const Factor<double>&,
                                        const Factor<double>&);
extern template Factor<Rational> multiply(const Factor<Rational>&,
                                          const Factor<Rational>&);
extern template Factor<double> sum_out(const Factor<double>&, int);
extern template Factor<Rational> sum_out(const Factor<Rational>&, int);
extern template double infer_with_order<double>(const BayesNet&,
                                                const QuerySets&,
                                                const std::vector<int>&, int);
extern template Rational infer_with_order<Rational>(const BayesNet&,
                                                    const QuerySets&,
                                                    const std::vector<int>&,
                                                    int);
extern template double infer<double>(const BayesNet&, const QuerySets&,
                                     const TreeDecomposition&);
extern template Rational infer<Rational>(const BayesNet&, const QuerySets&,
                                         const TreeDecomposition&);

}  // namespace tvdist
