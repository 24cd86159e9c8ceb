#include "tvdist/model.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <set>
#include <sstream>

#include "tvdist/rng.hpp"
#include <nlohmann/json.hpp>

namespace tvdist {

using nlohmann::json;

int Dag::max_indegree() const {
  int d = 0;
  for (const auto& p : parents) d = std::max(d, static_cast<int>(p.size()));
  return d;
}

double BayesNet::conditional(int i, int symbol,
                             const std::vector<int>& pa) const {
  if (i < 0 || i >= dag.n) throw InputError("node index out of range");
  if (symbol < 0 || symbol >= alphabet) throw InputError("symbol out of range");
  if (pa.size() != dag.parents[i].size())
    throw InputError("parent assignment length mismatch");
  int row = 0;
  for (int s : pa) {
    if (s < 0 || s >= alphabet) throw InputError("parent symbol out of range");
    row = row * alphabet + s;
  }
  return cpts[i].value(row, symbol);
}

Rational BayesNet::conditional_exact(int i, int symbol,
                                     const std::vector<int>& pa) const {
  if (i < 0 || i >= dag.n) throw InputError("node index out of range");
  if (symbol < 0 || symbol >= alphabet) throw InputError("symbol out of range");
  int row = 0;
  for (int s : pa) {
    if (s < 0 || s >= alphabet) throw InputError("parent symbol out of range");
    row = row * alphabet + s;
  }
  return cpts[i].exact_value(row, symbol);
}

double BayesNet::mass(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != dag.n)
    throw InputError("assignment length mismatch");
  double p = 1.0;
  for (int i = 0; i < dag.n; ++i) {
    if (x[i] < 0 || x[i] >= alphabet) throw InputError("symbol out of range");
    p *= cpts[i].value(parent_row(i, x), x[i]);
  }
  return p;
}

Rational BayesNet::mass_exact(const std::vector<int>& x) const {
  if (static_cast<int>(x.size()) != dag.n)
    throw InputError("assignment length mismatch");
  Rational p(1);
  for (int i = 0; i < dag.n; ++i) {
    if (x[i] < 0 || x[i] >= alphabet) throw InputError("symbol out of range");
    p *= cpts[i].exact_value(parent_row(i, x), x[i]);
  }
  return p;
}

std::vector<std::pair<int, int>> UndirectedGraph::edges() const {
  std::vector<std::pair<int, int>> out;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (adj[u][v]) out.emplace_back(u, v);
  return out;
}

void finalize_topo_order(Dag& dag) {
  std::vector<int> indeg(dag.n, 0);
  std::vector<std::vector<int>> children(dag.n);
  for (int i = 0; i < dag.n; ++i) {
    for (int p : dag.parents[i]) {
      if (p < 0 || p >= dag.n) throw InputError("parent index out of range");
      children[p].push_back(i);
      ++indeg[i];
    }
  }
  std::deque<int> ready;
  for (int i = 0; i < dag.n; ++i)
    if (indeg[i] == 0) ready.push_back(i);
  dag.topo_order.clear();
  while (!ready.empty()) {
    int u = ready.front();
    ready.pop_front();
    dag.topo_order.push_back(u);
    for (int c : children[u])
      if (--indeg[c] == 0) ready.push_back(c);
  }
  if (static_cast<int>(dag.topo_order.size()) != dag.n)
    throw InputError("graph is not acyclic");
}

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

ValidationReport validate(const BayesNet& net) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };
  const int n = net.dag.n;
  if (n < 1) fail("node count must be positive");
  if (net.alphabet < 2) fail("alphabet must be at least 2");
  if (static_cast<int>(net.dag.parents.size()) != n)
    fail("parent list count mismatch");
  if (static_cast<int>(net.cpts.size()) != n) fail("CPT count mismatch");
  if (!rep.ok) return rep;

  for (int i = 0; i < n; ++i) {
    std::set<int> seen;
    for (int p : net.dag.parents[i]) {
      if (p == i) fail("self-loop at node " + std::to_string(i));
      if (p < 0 || p >= n)
        fail("parent index out of range at node " + std::to_string(i));
      if (!seen.insert(p).second)
        fail("duplicate parent at node " + std::to_string(i));
    }
  }

  // Acyclicity and topo_order consistency.
  try {
    Dag copy = net.dag;
    finalize_topo_order(copy);
    std::vector<int> pos(n, -1);
    if (static_cast<int>(net.dag.topo_order.size()) != n) {
      fail("topo_order has wrong length");
    } else {
      for (int k = 0; k < n; ++k) {
        int v = net.dag.topo_order[k];
        if (v < 0 || v >= n || pos[v] != -1) {
          fail("topo_order is not a permutation");
          break;
        }
        pos[v] = k;
      }
      for (int i = 0; i < n && rep.ok; ++i)
        for (int p : net.dag.parents[i])
          if (pos[p] >= 0 && pos[i] >= 0 && pos[p] > pos[i])
            fail("topo_order violates edge " + std::to_string(p) + "->" +
                 std::to_string(i));
    }
  } catch (const InputError&) {
    fail("graph has a cycle");
  }

  const Rational one(1);
  for (int i = 0; i < n; ++i) {
    const Cpt& c = net.cpts[i];
    if (c.node != i) fail("cpt node index mismatch at " + std::to_string(i));
    std::size_t want = ipow(net.alphabet, static_cast<int>(net.dag.parents[i].size()));
    if (static_cast<std::size_t>(c.rows) != want) {
      fail("cpt at node " + std::to_string(i) + " has " +
           std::to_string(c.rows) + " rows, expected " + std::to_string(want));
      continue;
    }
    for (int r = 0; r < c.rows; ++r) {
      Rational sum(0);
      double dsum = 0.0;
      bool neg = false;
      for (int s = 0; s < net.alphabet; ++s) {
        const Rational& v = c.exact_value(r, s);
        if (v < 0) neg = true;
        sum += v;
        dsum += c.value(r, s);
      }
      if (neg)
        fail("negative probability at node " + std::to_string(i) + " row " +
             std::to_string(r));
      bool bad = c.exact_input ? (sum != one) : (std::abs(dsum - 1.0) > 1e-9);
      if (bad) {
        std::ostringstream os;
        os << "row sum " << dsum << " != 1 at node " << i << " row " << r;
        fail(os.str());
      }
    }
  }
  return rep;
}

UndirectedGraph moralize(const BayesNet& net) {
  UndirectedGraph g(net.dag.n);
  for (int i = 0; i < net.dag.n; ++i) {
    const auto& pa = net.dag.parents[i];
    for (int p : pa) g.add_edge(p, i);
    for (std::size_t a = 0; a < pa.size(); ++a)
      for (std::size_t b = a + 1; b < pa.size(); ++b) g.add_edge(pa[a], pa[b]);
  }
  return g;
}

BayesNet gen_random_net(int n, int alphabet, Structure structure,
                        int max_indegree, std::uint64_t seed) {
  if (n < 1) throw InputError("n must be at least 1");
  if (alphabet < 2) throw InputError("alphabet must be at least 2");
  SplitMix64 rng = SplitMix64::derive(seed, 0x6e65740ULL);

  BayesNet net;
  net.alphabet = alphabet;
  net.dag.n = n;
  net.dag.parents.assign(n, {});
  for (int i = 1; i < n; ++i) {
    switch (structure) {
      case Structure::Path:
        net.dag.parents[i] = {i - 1};
        break;
      case Structure::Tree:
        net.dag.parents[i] = {static_cast<int>(rng.next_below(i))};
        break;
      case Structure::RandomDag: {
        int cap = std::min(max_indegree, i);
        int k = static_cast<int>(rng.next_below(cap + 1));
        std::vector<int> pool(i);
        for (int j = 0; j < i; ++j) pool[j] = j;
        for (int j = 0; j < k; ++j) {
          std::size_t pick = j + rng.next_below(pool.size() - j);
          std::swap(pool[j], pool[pick]);
        }
        pool.resize(k);
        std::sort(pool.begin(), pool.end());
        net.dag.parents[i] = pool;
        break;
      }
    }
  }
  finalize_topo_order(net.dag);

  // Rows are exact by construction: positive integer weights normalized
  // by their sum.
  net.cpts.resize(n);
  for (int i = 0; i < n; ++i) {
    Cpt& c = net.cpts[i];
    c.node = i;
    c.alphabet = alphabet;
    c.rows = static_cast<int>(
        ipow(alphabet, static_cast<int>(net.dag.parents[i].size())));
    c.exact.assign(static_cast<std::size_t>(c.rows) * alphabet, Rational(0));
    c.table.assign(static_cast<std::size_t>(c.rows) * alphabet, 0.0);
    for (int r = 0; r < c.rows; ++r) {
      std::vector<long> w(alphabet);
      long total = 0;
      for (int s = 0; s < alphabet; ++s) {
        w[s] = 1 + static_cast<long>(rng.next_below(1000));
        total += w[s];
      }
      for (int s = 0; s < alphabet; ++s) {
        Rational v(w[s], total);
        v.canonicalize();
        c.set(r, s, v);
      }
    }
  }
  return net;
}

namespace {

Rational prob_from_json(const json& j, bool& exact_input) {
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    auto r = parse_fraction(s);
    if (!r && s.find('/') == std::string::npos &&
        s.find_first_not_of("0123456789") == std::string::npos && !s.empty()) {
      Rational whole(s);
      whole.canonicalize();
      r = whole;
    }
    if (!r || *r < 0) throw InputError("bad probability string: " + s);
    return *r;
  }
  if (j.is_number()) {
    double v = j.get<double>();
    if (!(v >= 0.0) || !std::isfinite(v))
      throw InputError("probability must be a finite nonnegative number");
    // Integers (0, 1) stay exact; other decimals carry the double's value.
    if (v != std::floor(v)) exact_input = false;
    return rational_from_double(v);
  }
  throw InputError("probability must be a number or \"a/b\" string");
}

}  // namespace

BayesNet parse_net(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  if (!doc.is_object()) throw InputError("top-level document must be an object");
  for (const char* key : {"n", "alphabet", "parents", "cpt"})
    if (!doc.contains(key))
      throw InputError(std::string("missing field \"") + key + "\"");

  BayesNet net;
  net.dag.n = doc["n"].get<int>();
  net.alphabet = doc["alphabet"].get<int>();
  if (net.dag.n < 1) throw InputError("\"n\" must be positive");
  if (net.alphabet < 2) throw InputError("\"alphabet\" must be at least 2");

  const json& parents = doc["parents"];
  if (!parents.is_array() || static_cast<int>(parents.size()) != net.dag.n)
    throw InputError("\"parents\" must be an array of n lists");
  net.dag.parents.resize(net.dag.n);
  for (int i = 0; i < net.dag.n; ++i) {
    if (!parents[i].is_array())
      throw InputError("parents[" + std::to_string(i) + "] must be a list");
    for (const auto& p : parents[i]) {
      int v = p.get<int>();
      if (v < 0 || v >= net.dag.n)
        throw InputError("parent index out of range at node " +
                         std::to_string(i));
      net.dag.parents[i].push_back(v);
    }
  }
  finalize_topo_order(net.dag);

  const json& cpt = doc["cpt"];
  if (!cpt.is_array() || static_cast<int>(cpt.size()) != net.dag.n)
    throw InputError("\"cpt\" must be an array of n tables");
  net.cpts.resize(net.dag.n);
  for (int i = 0; i < net.dag.n; ++i) {
    const json& tbl = cpt[i];
    std::size_t want =
        ipow(net.alphabet, static_cast<int>(net.dag.parents[i].size()));
    if (!tbl.is_array() || tbl.size() != want)
      throw InputError("cpt[" + std::to_string(i) + "] must have " +
                       std::to_string(want) + " rows");
    Cpt& c = net.cpts[i];
    c.node = i;
    c.alphabet = net.alphabet;
    c.rows = static_cast<int>(want);
    c.exact.assign(want * net.alphabet, Rational(0));
    c.table.assign(want * net.alphabet, 0.0);
    for (std::size_t r = 0; r < want; ++r) {
      const json& row = tbl[r];
      if (!row.is_array() || static_cast<int>(row.size()) != net.alphabet)
        throw InputError("cpt[" + std::to_string(i) + "][" +
                         std::to_string(r) + "] must have alphabet entries");
      for (int s = 0; s < net.alphabet; ++s)
        c.set(static_cast<int>(r), s, prob_from_json(row[s], c.exact_input));
    }
  }
  return net;
}

std::string serialize_net(const BayesNet& net, int base_alphabet) {
  json doc;
  doc["n"] = net.dag.n;
  doc["alphabet"] = net.alphabet;
  if (base_alphabet > 0) doc["base_alphabet"] = base_alphabet;
  json parents = json::array();
  for (const auto& p : net.dag.parents) parents.push_back(p);
  doc["parents"] = std::move(parents);
  json cpt = json::array();
  for (const Cpt& c : net.cpts) {
    json tbl = json::array();
    for (int r = 0; r < c.rows; ++r) {
      json row = json::array();
      for (int s = 0; s < net.alphabet; ++s) {
        const Rational& v = c.exact_value(r, s);
        if (v.get_den() == 1)
          row.push_back(v.get_num().get_si());
        else
          row.push_back(to_string(v));
      }
      tbl.push_back(std::move(row));
    }
    cpt.push_back(std::move(tbl));
  }
  doc["cpt"] = std::move(cpt);
  return doc.dump(2) + "\n";
}

int parse_base_alphabet(const std::string& bytes) {
  json doc;
  try {
    doc = json::parse(bytes);
  } catch (const json::parse_error& e) {
    throw InputError(std::string("JSON parse error: ") + e.what());
  }
  if (doc.is_object() && doc.contains("base_alphabet"))
    return doc["base_alphabet"].get<int>();
  return 0;
}

}  // namespace tvdist
