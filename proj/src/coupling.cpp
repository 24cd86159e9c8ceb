#include "tvdist/coupling.hpp"

#include <algorithm>
#include <cmath>

namespace tvdist {

int pair_encode(int b, int z, int alphabet) {
  if (b < 0 || b >= alphabet || z < 0 || z >= alphabet)
    throw InputError("pair symbol out of range");
  return b * alphabet + z;
}

std::pair<int, int> pair_decode(int symbol, int alphabet) {
  if (symbol < 0 || symbol >= alphabet * alphabet)
    throw InputError("pair symbol out of range");
  return {symbol / alphabet, symbol % alphabet};
}

std::vector<Rational> coupling_row(std::span<const Rational> p,
                                   std::span<const Rational> q) {
  const int l = static_cast<int>(p.size());
  if (q.size() != p.size()) throw InputError("conditional row size mismatch");
  Rational psum(0), qsum(0);
  for (const auto& v : p) psum += v;
  for (const auto& v : q) qsum += v;
  // Rows built from fractions must be exactly normalized; rows that came
  // in as decimals carry the usual 1e-9 slack.
  if (std::abs(to_double(psum) - 1.0) > 1e-9 ||
      std::abs(to_double(qsum) - 1.0) > 1e-9)
    throw InputError("coupling_row requires normalized rows");

  std::vector<Rational> row(static_cast<std::size_t>(l) * l, Rational(0));
  std::vector<Rational> rp(l), rq(l);
  Rational rq_total(0);
  for (int b = 0; b < l; ++b) {
    Rational diag = std::min(p[b], q[b]);
    row[static_cast<std::size_t>(b) * l + b] = diag;
    rp[b] = p[b] - diag;
    rq[b] = q[b] - diag;
    rq_total += rq[b];
  }
  // Off-diagonal mass: product of the residuals, normalized by their
  // total; the supports of rp and rq are disjoint, so each row's first
  // marginal comes out to exactly p.
  if (rq_total != 0) {
    for (int b = 0; b < l; ++b) {
      if (rp[b] == 0) continue;
      for (int z = 0; z < l; ++z) {
        if (z == b || rq[z] == 0) continue;
        row[static_cast<std::size_t>(b) * l + z] = rp[b] * rq[z] / rq_total;
      }
    }
  }
  return row;
}

CouplingNet build_coupling(const BayesNet& p, const BayesNet& q) {
  if (p.dag.n != q.dag.n || p.dag.parents != q.dag.parents)
    throw InputError("coupling requires nets over the same DAG");
  if (p.alphabet != q.alphabet)
    throw InputError("coupling requires a shared alphabet");
  const int n = p.dag.n;
  const int l = p.alphabet;
  const int l2 = l * l;

  CouplingNet cn;
  cn.base_alphabet = l;
  cn.net.dag = p.dag;
  cn.net.alphabet = l2;
  cn.net.cpts.resize(n);

  for (int i = 0; i < n; ++i) {
    const int npar = static_cast<int>(p.dag.parents[i].size());
    Cpt& c = cn.net.cpts[i];
    c.node = i;
    c.alphabet = l2;
    std::size_t rows = 1;
    for (int j = 0; j < npar; ++j) rows *= l2;
    c.rows = static_cast<int>(rows);
    c.exact.assign(rows * l2, Rational(0));
    c.table.assign(rows * l2, 0.0);

    std::vector<int> pair_assign(npar, 0);  // paired symbols, row-major
    for (std::size_t r = 0; r < rows; ++r) {
      // Decode the paired parent assignment into the P-side and Q-side rows.
      int row_p = 0, row_q = 0;
      for (int j = 0; j < npar; ++j) {
        auto [c1, c2] = pair_decode(pair_assign[j], l);
        row_p = row_p * l + c1;
        row_q = row_q * l + c2;
      }
      std::span<const Rational> prow(
          p.cpts[i].exact.data() + static_cast<std::size_t>(row_p) * l, l);
      std::span<const Rational> qrow(
          q.cpts[i].exact.data() + static_cast<std::size_t>(row_q) * l, l);
      std::vector<Rational> crow = coupling_row(prow, qrow);
      for (int s = 0; s < l2; ++s) c.set(static_cast<int>(r), s, crow[s]);
      for (int j = npar; j-- > 0;) {
        if (++pair_assign[j] < l2) break;
        pair_assign[j] = 0;
      }
    }
  }
  return cn;
}

}  // namespace tvdist
