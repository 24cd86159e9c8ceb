#include "tvdist/treedecomp.hpp"

#include <algorithm>
#include <deque>
#include <numeric>

namespace tvdist {

TreeDecomposition decompose(const UndirectedGraph& g) {
  const int n = g.n;
  TreeDecomposition td;
  if (n == 0) {
    td.bags.push_back({});
    td.width = -1;
    return td;
  }

  std::vector<std::vector<bool>> adj = g.adj;
  std::vector<bool> gone(n, false);
  std::vector<int> elim_pos(n, -1);
  std::vector<int> order;
  order.reserve(n);

  auto fill_cost = [&](int v) {
    int deg = 0, fill = 0;
    std::vector<int> nb;
    for (int u = 0; u < n; ++u)
      if (!gone[u] && u != v && adj[v][u]) nb.push_back(u);
    deg = static_cast<int>(nb.size());
    for (std::size_t a = 0; a < nb.size(); ++a)
      for (std::size_t b = a + 1; b < nb.size(); ++b)
        if (!adj[nb[a]][nb[b]]) ++fill;
    return std::pair<int, int>(fill, deg);
  };

  for (int step = 0; step < n; ++step) {
    int best = -1;
    std::pair<int, int> best_cost{0, 0};
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      auto cost = fill_cost(v);
      if (best == -1 || cost < best_cost) {
        best = v;
        best_cost = cost;
      }
    }
    std::vector<int> bag{best};
    for (int u = 0; u < n; ++u)
      if (!gone[u] && u != best && adj[best][u]) bag.push_back(u);
    std::sort(bag.begin(), bag.end());
    td.bags.push_back(bag);
    elim_pos[best] = step;
    order.push_back(best);
    // Marry the remaining neighbors.
    for (std::size_t a = 0; a < bag.size(); ++a)
      for (std::size_t b = a + 1; b < bag.size(); ++b) {
        adj[bag[a]][bag[b]] = true;
        adj[bag[b]][bag[a]] = true;
      }
    gone[best] = true;
  }

  // Connect each bag to the bag of the earliest-eliminated vertex of its
  // remainder clique; bags with an empty remainder attach to the next bag.
  for (int k = 0; k + 1 < static_cast<int>(td.bags.size()); ++k) {
    int attach = -1;
    for (int v : td.bags[k]) {
      if (elim_pos[v] <= k) continue;
      if (attach == -1 || elim_pos[v] < elim_pos[attach]) attach = v;
    }
    int target = (attach == -1) ? k + 1 : elim_pos[attach];
    td.tree_edges.emplace_back(k, target);
  }

  int maxbag = 0;
  for (const auto& b : td.bags)
    maxbag = std::max(maxbag, static_cast<int>(b.size()));
  td.width = maxbag - 1;
  return td;
}

bool verify_decomposition(const UndirectedGraph& g,
                          const TreeDecomposition& td) {
  const int m = static_cast<int>(td.bags.size());
  if (m == 0) return false;
  // Edges must form a tree over all bags.
  if (static_cast<int>(td.tree_edges.size()) != m - 1) return false;
  std::vector<std::vector<int>> bag_adj(m);
  for (auto [a, b] : td.tree_edges) {
    if (a < 0 || a >= m || b < 0 || b >= m || a == b) return false;
    bag_adj[a].push_back(b);
    bag_adj[b].push_back(a);
  }
  std::vector<bool> seen(m, false);
  std::deque<int> q{0};
  seen[0] = true;
  int reached = 0;
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    ++reached;
    for (int v : bag_adj[u])
      if (!seen[v]) {
        seen[v] = true;
        q.push_back(v);
      }
  }
  if (reached != m) return false;

  // Vertex coverage.
  std::vector<bool> covered(g.n, false);
  for (const auto& bag : td.bags)
    for (int v : bag) {
      if (v < 0 || v >= g.n) return false;
      covered[v] = true;
    }
  for (int v = 0; v < g.n; ++v)
    if (!covered[v]) return false;

  // Edge coverage.
  std::vector<std::vector<bool>> in_bag(m, std::vector<bool>(g.n, false));
  for (int k = 0; k < m; ++k)
    for (int v : td.bags[k]) in_bag[k][v] = true;
  for (auto [u, v] : g.edges()) {
    bool ok = false;
    for (int k = 0; k < m && !ok; ++k) ok = in_bag[k][u] && in_bag[k][v];
    if (!ok) return false;
  }

  // Running intersection: bags containing v form a connected subtree.
  for (int v = 0; v < g.n; ++v) {
    int start = -1, total = 0;
    for (int k = 0; k < m; ++k)
      if (in_bag[k][v]) {
        ++total;
        if (start == -1) start = k;
      }
    std::vector<bool> vis(m, false);
    std::deque<int> bfs{start};
    vis[start] = true;
    int hit = 0;
    while (!bfs.empty()) {
      int u = bfs.front();
      bfs.pop_front();
      ++hit;
      for (int w : bag_adj[u])
        if (!vis[w] && in_bag[w][v]) {
          vis[w] = true;
          bfs.push_back(w);
        }
    }
    if (hit != total) return false;
  }
  return true;
}

namespace {

std::vector<int> peel(const TreeDecomposition& td, int rotation) {
  const int m = static_cast<int>(td.bags.size());
  std::vector<std::vector<int>> bag_adj(m);
  for (auto [a, b] : td.tree_edges) {
    bag_adj[a].push_back(b);
    bag_adj[b].push_back(a);
  }
  std::vector<int> deg(m, 0);
  for (int k = 0; k < m; ++k) deg[k] = static_cast<int>(bag_adj[k].size());
  std::vector<bool> removed(m, false);
  std::vector<bool> emitted_vertex;
  int n = 0;
  for (const auto& bag : td.bags)
    for (int v : bag) n = std::max(n, v + 1);
  emitted_vertex.assign(n, false);

  std::vector<int> order;
  order.reserve(n);
  int remaining = m;
  while (remaining > 1) {
    int leaf = -1;
    for (int off = 0; off < m; ++off) {
      int k = (off + rotation) % m;
      if (!removed[k] && deg[k] <= 1) {
        leaf = k;
        break;
      }
    }
    // The single live neighbor.
    int nb = -1;
    for (int w : bag_adj[leaf])
      if (!removed[w]) nb = w;
    std::vector<bool> in_nb(n, false);
    if (nb >= 0)
      for (int v : td.bags[nb]) in_nb[v] = true;
    for (int v : td.bags[leaf])
      if (!in_nb[v] && !emitted_vertex[v]) {
        emitted_vertex[v] = true;
        order.push_back(v);
      }
    removed[leaf] = true;
    --remaining;
    if (nb >= 0) --deg[nb];
  }
  for (int k = 0; k < m; ++k)
    if (!removed[k])
      for (int v : td.bags[k])
        if (!emitted_vertex[v]) {
          emitted_vertex[v] = true;
          order.push_back(v);
        }
  return order;
}

}  // namespace

std::vector<int> elimination_order(const TreeDecomposition& td) {
  return peel(td, 0);
}

std::vector<int> elimination_order_variant(const TreeDecomposition& td,
                                           int rotation) {
  return peel(td, rotation);
}

}  // namespace tvdist
