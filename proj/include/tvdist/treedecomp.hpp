#pragma once

#include <vector>

#include "tvdist/model.hpp"

namespace tvdist {

struct TreeDecomposition {
  std::vector<std::vector<int>> bags;          // sorted vertex subsets
  std::vector<std::pair<int, int>> tree_edges;  // tree over bag indices
  int width = 0;                                // max bag size - 1
};

// Min-fill heuristic over the moral graph; ties broken by minimum degree,
// then lowest vertex index. Deterministic for a fixed input.
TreeDecomposition decompose(const UndirectedGraph& g);

// Checks vertex coverage, edge coverage, and the running-intersection
// property.
bool verify_decomposition(const UndirectedGraph& g,
                          const TreeDecomposition& td);

// Elimination order obtained by peeling leaf bags; eliminating in this
// order never creates a factor scope larger than the largest bag.
std::vector<int> elimination_order(const TreeDecomposition& td);

// Same peeling, but leaf selection walks bag indices in a rotated order;
// yields alternative valid orders for cross-checking inference.
std::vector<int> elimination_order_variant(const TreeDecomposition& td,
                                           int rotation);

}  // namespace tvdist
