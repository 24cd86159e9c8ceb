#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "tvdist/model.hpp"
#include "tvdist/rng.hpp"

namespace tvtest {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string data_path(const std::string& name) {
  return std::string(TVDIST_DATA_DIR) + "/" + name;
}

// The worked two-node example: P = (2/3, 1/3) twice, Q = (1/3, 2/3) twice.
inline tvdist::BayesNet footnote_p() {
  return tvdist::parse_net(read_file(data_path("footnote_p.json")));
}
inline tvdist::BayesNet footnote_q() {
  return tvdist::parse_net(read_file(data_path("footnote_q.json")));
}

// Q = P with CPT rows perturbed; keeps rows exactly normalized by moving
// mass between two symbols.
inline tvdist::BayesNet perturb_net(const tvdist::BayesNet& p,
                                    const tvdist::Rational& amount,
                                    std::uint64_t seed) {
  tvdist::BayesNet q = p;
  tvdist::SplitMix64 rng = tvdist::SplitMix64::derive(seed, 0x70657274ULL);
  for (auto& cpt : q.cpts) {
    for (int r = 0; r < cpt.rows; ++r) {
      int a = static_cast<int>(rng.next_below(q.alphabet));
      int b = static_cast<int>(rng.next_below(q.alphabet));
      if (a == b) continue;
      tvdist::Rational va = cpt.exact_value(r, a);
      tvdist::Rational vb = cpt.exact_value(r, b);
      tvdist::Rational shift = std::min(amount, va);
      cpt.set(r, a, va - shift);
      cpt.set(r, b, vb + shift);
    }
  }
  return q;
}

// Uniform product net over the same node count / alphabet.
inline tvdist::BayesNet uniform_net(int n, int alphabet) {
  tvdist::BayesNet net;
  net.dag.n = n;
  net.alphabet = alphabet;
  net.dag.parents.assign(n, {});
  tvdist::finalize_topo_order(net.dag);
  net.cpts.resize(n);
  for (int i = 0; i < n; ++i) {
    auto& c = net.cpts[i];
    c.node = i;
    c.alphabet = alphabet;
    c.rows = 1;
    c.exact.assign(alphabet, tvdist::Rational(0));
    c.table.assign(alphabet, 0.0);
    for (int s = 0; s < alphabet; ++s) {
      tvdist::Rational v(1, alphabet);
      v.canonicalize();
      c.set(0, s, v);
    }
  }
  return net;
}

}  // namespace tvtest
