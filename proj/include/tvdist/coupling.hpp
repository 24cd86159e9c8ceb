#pragma once

#include <span>
#include <vector>

#include "tvdist/model.hpp"

namespace tvdist {

// A coupling net over the shared DAG with alphabet l^2; symbol (b, z)
// encodes as b*l + z (0-based).
struct CouplingNet {
  BayesNet net;
  int base_alphabet = 0;

  int encode(int b, int z) const { return b * base_alphabet + z; }
  std::pair<int, int> decode(int symbol) const {
    return {symbol / base_alphabet, symbol % base_alphabet};
  }
};

int pair_encode(int b, int z, int alphabet);
std::pair<int, int> pair_decode(int symbol, int alphabet);

// One coupling row for conditionals p and q over [l]: the diagonal gets
// min(p_b, q_b); leftover mass goes to r(b, z) = rp_b * rq_z / D where
// rp, rq are the residuals and D their common total. The row's first
// marginal is p and its second marginal is q.
std::vector<Rational> coupling_row(std::span<const Rational> p,
                                   std::span<const Rational> q);

CouplingNet build_coupling(const BayesNet& p, const BayesNet& q);

}  // namespace tvdist
