#include "tvdist/inference.hpp"

#include <algorithm>

namespace tvdist {

namespace {

std::size_t table_size(int alphabet, std::size_t scope_size) {
  std::size_t s = 1;
  for (std::size_t i = 0; i < scope_size; ++i) s *= alphabet;
  return s;
}

}  // namespace

template <typename T>
Factor<T> restrict_factor(const Factor<T>& f, int var,
                          const std::vector<bool>& allowed) {
  auto it = std::find(f.scope.begin(), f.scope.end(), var);
  if (it == f.scope.end()) throw InputError("variable not in factor scope");
  std::size_t pos = static_cast<std::size_t>(it - f.scope.begin());
  // Stride of var in row-major layout.
  std::size_t stride = table_size(f.alphabet, f.scope.size() - pos - 1);

  Factor<T> out = f;
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    int sym = static_cast<int>((idx / stride) % f.alphabet);
    if (!allowed[sym]) out.table[idx] = T(0);
  }
  return out;
}

template <typename T>
Factor<T> multiply(const Factor<T>& f1, const Factor<T>& f2) {
  Factor<T> out;
  out.alphabet = f1.scope.empty() ? f2.alphabet : f1.alphabet;
  std::set_union(f1.scope.begin(), f1.scope.end(), f2.scope.begin(),
                 f2.scope.end(), std::back_inserter(out.scope));
  const int l = out.alphabet;
  const std::size_t k = out.scope.size();
  out.table.assign(table_size(l, k), T(0));

  // Per output-position strides into each input (0 when absent).
  std::vector<std::size_t> str1(k, 0), str2(k, 0);
  for (std::size_t j = 0; j < k; ++j) {
    auto it1 = std::find(f1.scope.begin(), f1.scope.end(), out.scope[j]);
    if (it1 != f1.scope.end())
      str1[j] = table_size(l, f1.scope.size() -
                                  static_cast<std::size_t>(it1 - f1.scope.begin()) - 1);
    auto it2 = std::find(f2.scope.begin(), f2.scope.end(), out.scope[j]);
    if (it2 != f2.scope.end())
      str2[j] = table_size(l, f2.scope.size() -
                                  static_cast<std::size_t>(it2 - f2.scope.begin()) - 1);
  }

  std::vector<int> digits(k, 0);
  std::size_t i1 = 0, i2 = 0;
  for (std::size_t idx = 0; idx < out.table.size(); ++idx) {
    out.table[idx] = f1.table[i1] * f2.table[i2];
    // Odometer increment, least-significant digit last.
    for (std::size_t j = k; j-- > 0;) {
      if (++digits[j] < l) {
        i1 += str1[j];
        i2 += str2[j];
        break;
      }
      digits[j] = 0;
      i1 -= str1[j] * (l - 1);
      i2 -= str2[j] * (l - 1);
    }
  }
  return out;
}

template <typename T>
Factor<T> sum_out(const Factor<T>& f, int var) {
  auto it = std::find(f.scope.begin(), f.scope.end(), var);
  if (it == f.scope.end()) throw InputError("variable not in factor scope");
  std::size_t pos = static_cast<std::size_t>(it - f.scope.begin());
  const int l = f.alphabet;
  std::size_t inner = table_size(l, f.scope.size() - pos - 1);
  std::size_t outer = f.table.size() / (inner * l);

  Factor<T> out;
  out.alphabet = l;
  out.scope = f.scope;
  out.scope.erase(out.scope.begin() + pos);
  out.table.assign(f.table.size() / l, T(0));
  for (std::size_t o = 0; o < outer; ++o)
    for (int s = 0; s < l; ++s)
      for (std::size_t in = 0; in < inner; ++in)
        out.table[o * inner + in] += f.table[(o * l + s) * inner + in];
  return out;
}

template <typename T>
T infer_with_order(const BayesNet& net, const QuerySets& q,
                   const std::vector<int>& order, int max_scope) {
  const int n = net.dag.n;
  const int l = net.alphabet;
  if (static_cast<int>(q.allow.size()) != n)
    throw InputError("query set count mismatch");
  for (const auto& row : q.allow)
    if (static_cast<int>(row.size()) != l)
      throw InputError("query set alphabet mismatch");

  std::vector<Factor<T>> factors;
  factors.reserve(n);
  for (int i = 0; i < n; ++i) {
    Factor<T> f;
    f.alphabet = l;
    f.scope = net.dag.parents[i];
    f.scope.push_back(i);
    std::sort(f.scope.begin(), f.scope.end());
    f.table.assign(table_size(l, f.scope.size()), T(0));

    std::vector<int> assign(f.scope.size(), 0);
    std::vector<int> x(n, 0);
    for (std::size_t idx = 0; idx < f.table.size(); ++idx) {
      for (std::size_t j = 0; j < f.scope.size(); ++j) x[f.scope[j]] = assign[j];
      int row = net.parent_row(i, x);
      if constexpr (std::is_same_v<T, double>)
        f.table[idx] = net.cpts[i].value(row, x[i]);
      else
        f.table[idx] = net.cpts[i].exact_value(row, x[i]);
      for (std::size_t j = f.scope.size(); j-- > 0;) {
        if (++assign[j] < l) break;
        assign[j] = 0;
      }
    }
    // Apply the evidence sets for variable i on its own CPT factor.
    bool constrained = false;
    for (bool b : q.allow[i])
      if (!b) constrained = true;
    if (constrained) f = restrict_factor(f, i, q.allow[i]);
    factors.push_back(std::move(f));
  }

  std::vector<bool> alive(factors.size(), true);
  for (int v : order) {
    Factor<T> prod;
    bool have = false;
    for (std::size_t fi = 0; fi < factors.size(); ++fi) {
      if (!alive[fi]) continue;
      if (!std::binary_search(factors[fi].scope.begin(),
                              factors[fi].scope.end(), v))
        continue;
      alive[fi] = false;
      if (!have) {
        prod = std::move(factors[fi]);
        have = true;
      } else {
        prod = multiply(prod, factors[fi]);
      }
      if (max_scope >= 0 && static_cast<int>(prod.scope.size()) > max_scope)
        throw InputError("elimination scope exceeds decomposition bound");
    }
    if (!have) continue;
    factors.push_back(sum_out(prod, v));
    alive.push_back(true);
  }

  T result(1);
  for (std::size_t fi = 0; fi < factors.size(); ++fi) {
    if (!alive[fi]) continue;
    if (!factors[fi].scope.empty())
      throw InputError("elimination order did not cover all variables");
    result *= factors[fi].table[0];
  }
  return result;
}

template <typename T>
T infer(const BayesNet& net, const QuerySets& q, const TreeDecomposition& td) {
  std::vector<int> order = elimination_order(td);
  if (static_cast<int>(order.size()) != net.dag.n)
    throw InputError("decomposition does not match the net");
  int maxbag = 0;
  for (const auto& b : td.bags)
    maxbag = std::max(maxbag, static_cast<int>(b.size()));
  return infer_with_order<T>(net, q, order, maxbag);
}

namespace {

template <typename T>
std::vector<T> build_cpt_table(const BayesNet& net, int i,
                               const std::vector<int>& scope) {
  const int l = net.alphabet;
  std::vector<T> table(table_size(l, scope.size()), T(0));
  std::vector<int> assign(scope.size(), 0);
  std::vector<int> x(net.dag.n, 0);
  for (std::size_t idx = 0; idx < table.size(); ++idx) {
    for (std::size_t j = 0; j < scope.size(); ++j) x[scope[j]] = assign[j];
    int row = net.parent_row(i, x);
    if constexpr (std::is_same_v<T, double>)
      table[idx] = net.cpts[i].value(row, x[i]);
    else
      table[idx] = net.cpts[i].exact_value(row, x[i]);
    for (std::size_t j = scope.size(); j-- > 0;) {
      if (++assign[j] < l) break;
      assign[j] = 0;
    }
  }
  return table;
}

}  // namespace

template <typename T>
InferenceEngine<T>::InferenceEngine(const BayesNet& net,
                                    const TreeDecomposition& td) {
  std::vector<int> order = elimination_order(td);
  if (static_cast<int>(order.size()) != net.dag.n)
    throw InputError("decomposition does not match the net");
  int maxbag = 0;
  for (const auto& b : td.bags)
    maxbag = std::max(maxbag, static_cast<int>(b.size()));
  max_scope_ = maxbag;
  build(net, order);
}

template <typename T>
InferenceEngine<T>::InferenceEngine(const BayesNet& net,
                                    const std::vector<int>& order,
                                    int max_scope)
    : max_scope_(max_scope) {
  build(net, order);
}

template <typename T>
void InferenceEngine<T>::build(const BayesNet& net,
                               const std::vector<int>& order) {
  n_ = net.dag.n;
  alphabet_ = net.alphabet;
  const int l = alphabet_;

  scopes_.clear();
  base_.clear();
  node_stride_.assign(n_, 1);
  for (int i = 0; i < n_; ++i) {
    std::vector<int> scope = net.dag.parents[i];
    scope.push_back(i);
    std::sort(scope.begin(), scope.end());
    auto it = std::find(scope.begin(), scope.end(), i);
    node_stride_[i] = table_size(
        l, scope.size() - static_cast<std::size_t>(it - scope.begin()) - 1);
    base_.push_back(build_cpt_table<T>(net, i, scope));
    scopes_.push_back(std::move(scope));
  }

  buf_.clear();
  for (const auto& t : base_) buf_.emplace_back(t.size());

  std::vector<bool> alive(scopes_.size(), true);
  plan_.clear();
  for (int v : order) {
    int cur = -1;
    for (std::size_t s = 0; s < scopes_.size(); ++s) {
      if (!alive[s]) continue;
      if (!std::binary_search(scopes_[s].begin(), scopes_[s].end(), v))
        continue;
      alive[s] = false;
      if (cur == -1) {
        cur = static_cast<int>(s);
        continue;
      }
      // Multiply cur and s into a fresh slot.
      Step step;
      step.is_mul = true;
      step.mul.a = cur;
      step.mul.b = static_cast<int>(s);
      std::vector<int> uscope;
      std::set_union(scopes_[cur].begin(), scopes_[cur].end(),
                     scopes_[s].begin(), scopes_[s].end(),
                     std::back_inserter(uscope));
      if (max_scope_ >= 0 && static_cast<int>(uscope.size()) > max_scope_)
        throw InputError("elimination scope exceeds decomposition bound");
      const std::size_t k = uscope.size();
      step.mul.stride_a.assign(k, 0);
      step.mul.stride_b.assign(k, 0);
      for (std::size_t j = 0; j < k; ++j) {
        auto ita = std::find(scopes_[cur].begin(), scopes_[cur].end(), uscope[j]);
        if (ita != scopes_[cur].end())
          step.mul.stride_a[j] = table_size(
              l, scopes_[cur].size() -
                     static_cast<std::size_t>(ita - scopes_[cur].begin()) - 1);
        auto itb = std::find(scopes_[s].begin(), scopes_[s].end(), uscope[j]);
        if (itb != scopes_[s].end())
          step.mul.stride_b[j] = table_size(
              l, scopes_[s].size() -
                     static_cast<std::size_t>(itb - scopes_[s].begin()) - 1);
      }
      step.mul.out_size = table_size(l, k);
      step.mul.dst = static_cast<int>(scopes_.size());
      scopes_.push_back(std::move(uscope));
      buf_.emplace_back(step.mul.out_size);
      alive.push_back(false);
      plan_.push_back(std::move(step));
      cur = static_cast<int>(scopes_.size()) - 1;
    }
    if (cur == -1) continue;
    Step step;
    step.is_mul = false;
    step.sum.src = cur;
    auto it = std::find(scopes_[cur].begin(), scopes_[cur].end(), v);
    std::size_t pos = static_cast<std::size_t>(it - scopes_[cur].begin());
    step.sum.inner = table_size(l, scopes_[cur].size() - pos - 1);
    std::vector<int> nscope = scopes_[cur];
    nscope.erase(nscope.begin() + pos);
    step.sum.out_size = table_size(l, nscope.size());
    step.sum.dst = static_cast<int>(scopes_.size());
    scopes_.push_back(std::move(nscope));
    buf_.emplace_back(step.sum.out_size);
    alive.push_back(true);
    plan_.push_back(std::move(step));
  }

  final_slots_.clear();
  for (std::size_t s = 0; s < scopes_.size(); ++s) {
    if (!alive[s]) continue;
    if (!scopes_[s].empty())
      throw InputError("elimination order did not cover all variables");
    final_slots_.push_back(static_cast<int>(s));
  }
}

template <typename T>
T InferenceEngine<T>::query(const QuerySets& q) const {
  const int l = alphabet_;
  if (static_cast<int>(q.allow.size()) != n_)
    throw InputError("query set count mismatch");
  for (int i = 0; i < n_; ++i) {
    std::vector<T>& dst = buf_[i];
    const std::vector<T>& src = base_[i];
    const std::vector<bool>& allow = q.allow[i];
    bool constrained = false;
    for (bool b : allow)
      if (!b) constrained = true;
    if (!constrained) {
      dst = src;
      continue;
    }
    const std::size_t stride = node_stride_[i];
    for (std::size_t idx = 0; idx < src.size(); ++idx) {
      int sym = static_cast<int>((idx / stride) % l);
      dst[idx] = allow[sym] ? src[idx] : T(0);
    }
  }

  std::vector<int> digits;
  for (const Step& step : plan_) {
    if (step.is_mul) {
      const MulOp& op = step.mul;
      const std::vector<T>& a = buf_[op.a];
      const std::vector<T>& b = buf_[op.b];
      std::vector<T>& out = buf_[op.dst];
      const std::size_t k = op.stride_a.size();
      digits.assign(k, 0);
      std::size_t ia = 0, ib = 0;
      for (std::size_t idx = 0; idx < op.out_size; ++idx) {
        out[idx] = a[ia] * b[ib];
        for (std::size_t j = k; j-- > 0;) {
          if (++digits[j] < l) {
            ia += op.stride_a[j];
            ib += op.stride_b[j];
            break;
          }
          digits[j] = 0;
          ia -= op.stride_a[j] * (l - 1);
          ib -= op.stride_b[j] * (l - 1);
        }
      }
    } else {
      const SumOp& op = step.sum;
      const std::vector<T>& src = buf_[op.src];
      std::vector<T>& out = buf_[op.dst];
      const std::size_t inner = op.inner;
      const std::size_t outer = op.out_size / inner;
      for (std::size_t o = 0; o < outer; ++o) {
        std::size_t obase = o * inner;
        std::size_t sbase = o * inner * l;
        for (std::size_t in = 0; in < inner; ++in) out[obase + in] = src[sbase + in];
        for (int s = 1; s < l; ++s) {
          std::size_t row = sbase + static_cast<std::size_t>(s) * inner;
          for (std::size_t in = 0; in < inner; ++in)
            out[obase + in] += src[row + in];
        }
      }
    }
  }

  T result(1);
  for (int s : final_slots_) result *= buf_[s][0];
  return result;
}

template class InferenceEngine<double>;
template class InferenceEngine<Rational>;

template struct Factor<double>;
template struct Factor<Rational>;
template Factor<double> restrict_factor(const Factor<double>&, int,
                                        const std::vector<bool>&);
template Factor<Rational> restrict_factor(const Factor<Rational>&, int,
                                          const std::vector<bool>&);
template Factor<double> multiply(const Factor<double>&, const Factor<double>&);
template Factor<Rational> multiply(const Factor<Rational>&,
                                   const Factor<Rational>&);
template Factor<double> sum_out(const Factor<double>&, int);
template Factor<Rational> sum_out(const Factor<Rational>&, int);
template double infer_with_order<double>(const BayesNet&, const QuerySets&,
                                         const std::vector<int>&, int);
template Rational infer_with_order<Rational>(const BayesNet&, const QuerySets&,
                                             const std::vector<int>&, int);
template double infer<double>(const BayesNet&, const QuerySets&,
                              const TreeDecomposition&);
template Rational infer<Rational>(const BayesNet&, const QuerySets&,
                                  const TreeDecomposition&);

}  // namespace tvdist
