#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "tvdist/rational.hpp"

namespace tvdist {

// Nodes and symbols are 0-based throughout, matching the on-disk format.

struct Dag {
  int n = 0;
  std::vector<std::vector<int>> parents;  // ordered parent list per node
  std::vector<int> topo_order;            // every parent precedes its child

  int max_indegree() const;
};

// Conditional probability table of one node. Rows are indexed row-major
// over the declared parent order; entry (r, s) is Pr[X = s | parents = r].
// Every entry is held exactly as a rational, with a double mirror for the
// fast evaluation path.
struct Cpt {
  int node = 0;
  int alphabet = 0;
  int rows = 0;
  std::vector<Rational> exact;  // rows * alphabet entries
  std::vector<double> table;    // same entries as doubles
  bool exact_input = true;      // all entries were given as fractions

  double value(int row, int symbol) const {
    return table[static_cast<std::size_t>(row) * alphabet + symbol];
  }
  const Rational& exact_value(int row, int symbol) const {
    return exact[static_cast<std::size_t>(row) * alphabet + symbol];
  }
  void set(int row, int symbol, const Rational& v) {
    std::size_t idx = static_cast<std::size_t>(row) * alphabet + symbol;
    exact[idx] = v;
    table[idx] = to_double(v);
  }
};

struct BayesNet {
  Dag dag;
  int alphabet = 0;
  std::vector<Cpt> cpts;

  // Row index of the parent assignment of node i under x, row-major in
  // the declared parent order.
  int parent_row(int i, const std::vector<int>& x) const {
    int row = 0;
    for (int p : dag.parents[i]) row = row * alphabet + x[p];
    return row;
  }

  double conditional(int i, int symbol, const std::vector<int>& pa) const;
  Rational conditional_exact(int i, int symbol,
                             const std::vector<int>& pa) const;

  double mass(const std::vector<int>& x) const;
  Rational mass_exact(const std::vector<int>& x) const;
};

struct UndirectedGraph {
  int n = 0;
  std::vector<std::vector<bool>> adj;  // symmetric, no self-loops

  explicit UndirectedGraph(int n_ = 0)
      : n(n_), adj(n_, std::vector<bool>(n_, false)) {}

  void add_edge(int u, int v) {
    if (u == v) return;
    adj[u][v] = true;
    adj[v][u] = true;
  }
  bool has_edge(int u, int v) const { return adj[u][v]; }
  std::vector<std::pair<int, int>> edges() const;
};

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
};

// Recomputes topo_order from the parent lists; throws InputError on cycles.
void finalize_topo_order(Dag& dag);

ValidationReport validate(const BayesNet& net);

UndirectedGraph moralize(const BayesNet& net);

enum class Structure { Path, Tree, RandomDag };

BayesNet gen_random_net(int n, int alphabet, Structure structure,
                        int max_indegree, std::uint64_t seed);

// JSON net format; see README. parse_net throws InputError on malformed
// documents, serialize_net emits the canonical form (fractions as "a/b").
BayesNet parse_net(const std::string& bytes);
std::string serialize_net(const BayesNet& net, int base_alphabet = 0);

// The optional "base_alphabet" sidecar (coupling nets record the
// underlying alphabet there); 0 when absent.
int parse_base_alphabet(const std::string& bytes);

}  // namespace tvdist
