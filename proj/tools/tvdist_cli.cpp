#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "tvdist/coupling.hpp"
#include "tvdist/estimator.hpp"
#include "tvdist/inference.hpp"
#include "tvdist/model.hpp"
#include "tvdist/oracle.hpp"
#include "tvdist/treedecomp.hpp"

using json = nlohmann::ordered_json;
using namespace tvdist;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

BayesNet load_net(const std::string& path) { return parse_net(slurp(path)); }

// SPEC is semicolon-separated `var:{s,s,...}` entries; unlisted variables
// keep the full alphabet.
QuerySets parse_sets(const std::string& spec, int n, int alphabet) {
  QuerySets q = QuerySets::full(n, alphabet);
  std::istringstream in(spec);
  std::string entry;
  while (std::getline(in, entry, ';')) {
    if (entry.empty()) continue;
    auto colon = entry.find(':');
    auto open = entry.find('{');
    auto close = entry.find('}');
    if (colon == std::string::npos || open == std::string::npos ||
        close == std::string::npos || open < colon || close < open)
      throw InputError("bad --sets entry: " + entry);
    int var = std::stoi(entry.substr(0, colon));
    if (var < 0 || var >= n) throw InputError("--sets variable out of range");
    std::vector<bool> allow(alphabet, false);
    std::istringstream syms(entry.substr(open + 1, close - open - 1));
    std::string tok;
    bool any = false;
    while (std::getline(syms, tok, ',')) {
      if (tok.empty()) continue;
      int s = std::stoi(tok);
      if (s < 0 || s >= alphabet) throw InputError("--sets symbol out of range");
      allow[s] = true;
      any = true;
    }
    if (!any) throw InputError("--sets entry has an empty set: " + entry);
    q.allow[var] = allow;
  }
  return q;
}

json report_json(const EstimateReport& rep, bool uniform_mode) {
  json out;
  out["estimate"] = rep.estimate;
  out["m"] = rep.m;
  out["z"] = rep.z;
  out["alpha_hat"] = rep.alpha_hat;
  out["queries"] = rep.queries;
  out["seed"] = rep.seed;
  out["elapsed_ms"] = rep.elapsed_ms;
  out["width"] = rep.width;
  if (uniform_mode) out["phase"] = rep.phase;
  if (!rep.estimate_exact.empty()) out["estimate_exact"] = rep.estimate_exact;
  return out;
}

Structure parse_structure(const std::string& s, int& max_indegree) {
  std::string name = s;
  auto colon = s.find(':');
  if (colon != std::string::npos) {
    name = s.substr(0, colon);
    max_indegree = std::stoi(s.substr(colon + 1));
    if (max_indegree < 1) throw InputError("structure in-degree must be >= 1");
  }
  if (name == "path") return Structure::Path;
  if (name == "tree") return Structure::Tree;
  if (name == "random-dag") return Structure::RandomDag;
  throw InputError("unknown structure: " + s);
}

int run(int argc, char** argv) {
  std::cout.precision(17);
  CLI::App app{"total variation distance estimation between Bayes nets"};
  app.require_subcommand(1);

  std::string net_path, p_path, q_path, out_path, sets_spec, format = "json";
  std::string structure = "path";
  double eps = 0.1, delta = 0.1;
  std::uint64_t seed = 0;
  long long samples = -1, budget = oracle::kDefaultBudget;
  int threads = 1, gen_n = 2, gen_alphabet = 2;
  bool exact_arith = false;

  auto add_format = [&](CLI::App* cmd) {
    cmd->add_option("--format", format, "json or text")
        ->check(CLI::IsMember({"json", "text"}));
  };

  auto* c_validate = app.add_subcommand("validate", "check a net file");
  c_validate->add_option("--net", net_path)->required();
  add_format(c_validate);

  auto* c_infer = app.add_subcommand("infer", "probability of a box event");
  c_infer->add_option("--net", net_path)->required();
  c_infer->add_option("--sets", sets_spec, "e.g. 0:{0};3:{1,2}");
  c_infer->add_flag("--exact-arith", exact_arith);
  add_format(c_infer);

  auto* c_decomp = app.add_subcommand("decompose", "tree-decompose the moral graph");
  c_decomp->add_option("--net", net_path)->required();
  add_format(c_decomp);

  auto* c_est = app.add_subcommand("tv-estimate", "FPRAS for d_TV(P, Q)");
  c_est->add_option("--p", p_path)->required();
  c_est->add_option("--q", q_path)->required();
  c_est->add_option("--eps", eps);
  c_est->add_option("--delta", delta);
  c_est->add_option("--seed", seed);
  c_est->add_option("--samples", samples, "override the sample count");
  c_est->add_option("--threads", threads);
  c_est->add_flag("--exact-arith", exact_arith);
  add_format(c_est);

  auto* c_exact = app.add_subcommand("tv-exact", "exact d_TV by enumeration");
  c_exact->add_option("--p", p_path)->required();
  c_exact->add_option("--q", q_path)->required();
  c_exact->add_option("--budget", budget);
  add_format(c_exact);

  auto* c_uni = app.add_subcommand("tv-uniform", "FPRAS for d_TV(P, uniform)");
  c_uni->add_option("--p", p_path)->required();
  c_uni->add_option("--eps", eps);
  c_uni->add_option("--delta", delta);
  c_uni->add_option("--seed", seed);
  c_uni->add_option("--samples", samples, "override the sample count");
  add_format(c_uni);

  auto* c_check = app.add_subcommand("check", "exact coupling identity checks");
  c_check->add_option("--p", p_path)->required();
  c_check->add_option("--q", q_path)->required();
  c_check->add_option("--budget", budget);
  add_format(c_check);

  auto* c_gen = app.add_subcommand("gen", "generate a random net file");
  c_gen->add_option("--n", gen_n)->check(CLI::PositiveNumber);
  c_gen->add_option("--alphabet", gen_alphabet)->check(CLI::Range(2, 64));
  c_gen->add_option("--structure", structure, "path, tree, or random-dag[:k]");
  c_gen->add_option("--seed", seed);
  c_gen->add_option("--out", out_path, "output file (default stdout)");
  add_format(c_gen);

  CLI11_PARSE(app, argc, argv);

  if (c_validate->parsed()) {
    ValidationReport rep = validate(load_net(net_path));
    if (format == "text") {
      std::cout << (rep.ok ? "ok" : "invalid") << "\n";
      for (const auto& v : rep.violations) std::cout << "  " << v << "\n";
    } else {
      json out{{"ok", rep.ok}};
      if (!rep.ok) out["violations"] = rep.violations;
      std::cout << out.dump() << "\n";
    }
    return rep.ok ? 0 : 2;
  }

  if (c_infer->parsed()) {
    BayesNet net = load_net(net_path);
    QuerySets q = parse_sets(sets_spec, net.dag.n, net.alphabet);
    TreeDecomposition td = decompose(moralize(net));
    if (exact_arith) {
      Rational pr = infer<Rational>(net, q, td);
      if (format == "text")
        std::cout << to_string(pr) << " = " << to_double(pr) << "\n";
      else
        std::cout << json{{"probability", to_double(pr)},
                          {"probability_exact", to_string(pr)}}
                         .dump()
                  << "\n";
    } else {
      double pr = infer<double>(net, q, td);
      if (format == "text")
        std::cout << pr << "\n";
      else
        std::cout << json{{"probability", pr}}.dump() << "\n";
    }
    return 0;
  }

  if (c_decomp->parsed()) {
    BayesNet net = load_net(net_path);
    TreeDecomposition td = decompose(moralize(net));
    if (format == "json") {
      std::cout << json{{"width", td.width},
                        {"bags", td.bags},
                        {"tree_edges", td.tree_edges}}
                       .dump()
                << "\n";
    } else {
      std::cout << "width " << td.width << "\n";
      for (std::size_t k = 0; k < td.bags.size(); ++k) {
        std::cout << "bag " << k << ":";
        for (int v : td.bags[k]) std::cout << " " << v;
        std::cout << "\n";
      }
      for (auto [a, b] : td.tree_edges)
        std::cout << "edge " << a << " - " << b << "\n";
    }
    return 0;
  }

  if (c_est->parsed() || c_uni->parsed()) {
    EstimateParams params;
    params.eps = eps;
    params.delta = delta;
    params.seed = seed;
    params.threads = threads;
    params.exact_arith = exact_arith;
    if (samples >= 0) params.m_override = samples;
    EstimateReport rep;
    if (c_est->parsed())
      rep = estimate_tv(load_net(p_path), load_net(q_path), params);
    else
      rep = estimate_tv_uniform(load_net(p_path), params);
    if (format == "text")
      std::cout << "estimate " << rep.estimate << " (m=" << rep.m
                << ", z=" << rep.z << ", queries=" << rep.queries
                << ", width=" << rep.width << ")\n";
    else
      std::cout << report_json(rep, c_uni->parsed()).dump() << "\n";
    return 0;
  }

  if (c_exact->parsed()) {
    Rational tv = oracle::exact_tv(load_net(p_path), load_net(q_path), budget);
    if (format == "text")
      std::cout << to_string(tv) << "\n" << to_double(tv) << "\n";
    else
      std::cout << json{{"tv_exact", to_string(tv)}, {"tv", to_double(tv)}}
                       .dump()
                << "\n";
    return 0;
  }

  if (c_check->parsed()) {
    oracle::IdentityCheck chk = oracle::exact_identity_check(
        load_net(p_path), load_net(q_path), budget);
    json out{{"sum_gf_equals_tv", chk.sum_gf_equals_tv},
             {"z_lower_bound", chk.z_lower_bound},
             {"z_upper_bound", chk.z_upper_bound},
             {"g_nonnegative", chk.g_nonnegative},
             {"g_dominates_gap", chk.g_dominates_gap},
             {"x_marginal_is_p", chk.x_marginal_is_p},
             {"all", chk.all()}};
    if (format == "text") {
      for (auto& [k, v] : out.items())
        std::cout << k << " " << (v.get<bool>() ? "pass" : "fail") << "\n";
    } else {
      std::cout << out.dump() << "\n";
    }
    return chk.all() ? 0 : 2;
  }

  if (c_gen->parsed()) {
    int max_indegree = 2;
    Structure st = parse_structure(structure, max_indegree);
    BayesNet net = gen_random_net(gen_n, gen_alphabet, st, max_indegree, seed);
    std::string doc = serialize_net(net);
    if (out_path.empty()) {
      std::cout << doc << "\n";
    } else {
      std::ofstream out(out_path);
      if (!out) throw InputError("cannot write " + out_path);
      out << doc << "\n";
    }
    TreeDecomposition td = decompose(moralize(net));
    std::cerr << "width " << td.width << "\n";
    return 0;
  }

  return 2;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const BudgetError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
