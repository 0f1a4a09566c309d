// Command-line driver for the library: instance generation, LP solving,
// rounding, greedy, CNCP checking, probing simulations and ratio reports.
// Every stochastic verb requires an explicit --seed so runs replay exactly.

#include <cmath>
#include <cstdio>
#include <exception>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "probecert/adaptive_opt.hpp"
#include "probecert/eval.hpp"
#include "probecert/greedy.hpp"
#include "probecert/instances.hpp"
#include "probecert/io.hpp"
#include "probecert/lp.hpp"
#include "probecert/probecert.hpp"
#include "probecert/rounding.hpp"

using namespace probecert;

namespace {

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

std::vector<int> parse_order(const std::string& csv) {
  std::vector<int> out;
  size_t pos = 0;
  while (pos < csv.size()) {
    size_t next = csv.find(',', pos);
    if (next == std::string::npos) next = csv.size();
    out.push_back(std::stoi(csv.substr(pos, next - pos)));
    pos = next + 1;
  }
  return out;
}

json summary_json(const PolicyEvalResult& res) {
  json j;
  j["worlds"] = res.probes.count;
  j["mean_probes"] = res.probes.mean;
  j["std_probes"] = res.probes.stddev;
  j["min_probes"] = res.probes.min;
  j["max_probes"] = res.probes.max;
  j["mean_phase1_probes"] = res.phase1.mean;
  j["invariants"] = {{"probe_runs", res.stats.probe_vertex_runs},
                     {"m0m1_checks", res.stats.m0m1_checks},
                     {"independence_checks", res.stats.independence_checks},
                     {"phase_checks", res.stats.phase_checks},
                     {"violations", res.stats.violations}};
  return j;
}

void write_world_rows(const std::string& path, const PolicyEvalResult& res) {
  std::vector<std::vector<std::string>> rows;
  for (const auto& r : res.rows)
    rows.push_back({std::to_string(r.world), std::to_string(r.probes), std::to_string(r.actives),
                    std::to_string(r.phases), std::to_string(r.phase1_probes)});
  save_csv(path, {"world", "probes", "actives", "phases", "phase1_probes"}, rows);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"stochastic Boolean function certification toolkit"};
  app.require_subcommand(1);

  // ---- gen ----------------------------------------------------------------
  auto* gen = app.add_subcommand("gen", "generate instance files");
  gen->require_subcommand(1);

  struct {
    int n = 4, support = 4, k = 1, sets = 3;
    std::string matroid = "uniform", out = "instance.json", sets_file;
    uint64_t seed = 0;
  } g_opt;

  auto* gen_random = gen->add_subcommand("random", "random correlated instance");
  gen_random->add_option("--n", g_opt.n);
  gen_random->add_option("--support", g_opt.support);
  gen_random->add_option("--matroid", g_opt.matroid)->check(CLI::IsMember({"uniform", "partition", "graphic"}));
  gen_random->add_option("--seed", g_opt.seed)->required();
  gen_random->add_option("--out", g_opt.out);
  gen_random->callback([&] {
    const Matroid::Kind kind = g_opt.matroid == "uniform"     ? Matroid::Kind::Uniform
                               : g_opt.matroid == "partition" ? Matroid::Kind::Partition
                                                              : Matroid::Kind::Graphic;
    save_json(g_opt.out, instance_to_json(random_correlated_instance(g_opt.n, g_opt.support, kind, g_opt.seed)));
  });

  auto* gen_kmssc = gen->add_subcommand("kmssc", "k-min-sum-set-cover style instance");
  gen_kmssc->add_option("--n", g_opt.n);
  gen_kmssc->add_option("--k", g_opt.k);
  gen_kmssc->add_option("--sets", g_opt.sets);
  gen_kmssc->add_option("--seed", g_opt.seed)->required();
  gen_kmssc->add_option("--out", g_opt.out);
  gen_kmssc->callback(
      [&] { save_json(g_opt.out, instance_to_json(kmssc_instance(g_opt.n, g_opt.k, g_opt.sets, g_opt.seed))); });

  auto* gen_hs = gen->add_subcommand("hitting-set", "hitting-set reduction instance");
  gen_hs->add_option("--n", g_opt.n, "number of sets / universe size when generating randomly");
  gen_hs->add_option("--sets-file", g_opt.sets_file, "JSON array of id arrays; empty = random");
  gen_hs->add_option("--seed", g_opt.seed)->required();
  gen_hs->add_option("--out", g_opt.out);
  gen_hs->callback([&] {
    std::vector<Bits> sets;
    if (!g_opt.sets_file.empty()) {
      for (const auto& ids : load_json(g_opt.sets_file))
        sets.push_back(Bits::from_ids(g_opt.n, ids.get<std::vector<int>>()));
    } else {
      Rng rng(g_opt.seed, 7);
      for (int i = 0; i < g_opt.n; ++i) {
        Bits a(g_opt.n);
        while (a.none())
          for (int e = 0; e < g_opt.n; ++e)
            if (rng.bernoulli(0.5)) a.set(e);
        sets.push_back(a);
      }
    }
    json j = instance_to_json(hitting_set_reduction(sets));
    save_json(g_opt.out, j);
  });

  auto* gen_star = gen->add_subcommand("star", "adaptivity-gap star union graph");
  gen_star->add_option("--n", g_opt.n)->required();
  gen_star->add_option("--out", g_opt.out);
  gen_star->callback([&] {
    auto [graph, k] = star_gap_instance(g_opt.n);
    json j = graph_to_json(graph);
    j["k"] = k;
    save_json(g_opt.out, j);
  });

  auto* gen_hgp = gen->add_subcommand("hgp", "random hypergraph probing instance");
  struct {
    int latents = 5, observed = 5, rho = 3;
    uint64_t seed = 0;
    std::string out = "hgp.json";
  } hg_opt;
  gen_hgp->add_option("--latents", hg_opt.latents);
  gen_hgp->add_option("--observed", hg_opt.observed);
  gen_hgp->add_option("--rho", hg_opt.rho);
  gen_hgp->add_option("--seed", hg_opt.seed)->required();
  gen_hgp->add_option("--out", hg_opt.out);
  gen_hgp->callback([&] {
    Rng rng(hg_opt.seed, 5);
    std::vector<double> probs(hg_opt.latents);
    for (double& p : probs) p = 0.1 + 0.8 * rng.next_unit();
    std::vector<std::vector<int>> obs;
    for (int i = 0; i < hg_opt.observed; ++i) {
      const int width = 1 + static_cast<int>(rng.next_below(hg_opt.rho));
      auto ids = rng.permutation(hg_opt.latents);
      ids.resize(width);
      obs.push_back(ids);
    }
    save_json(hg_opt.out, hypergraph_to_json(ProbeHypergraph(probs, obs)));
  });

  // ---- lp-solve -----------------------------------------------------------
  auto* lp = app.add_subcommand("lp-solve", "solve the certification LP");
  struct {
    std::string instance, out = "solution.json", trace, mode = "sgd";
    long long iters = 0;
    double eps = 0.05;
    uint64_t seed = 0;
  } lp_opt;
  lp->add_option("--instance", lp_opt.instance)->required();
  lp->add_option("--mode", lp_opt.mode)->check(CLI::IsMember({"sgd", "full"}));
  lp->add_option("--iters", lp_opt.iters);
  lp->add_option("--eps", lp_opt.eps);
  lp->add_option("--seed", lp_opt.seed);
  lp->add_option("--out", lp_opt.out);
  lp->add_option("--trace", lp_opt.trace);
  lp->callback([&] {
    if (lp_opt.mode == "sgd" && !lp->count("--seed"))
      throw CLI::ValidationError("--seed", "sgd mode is stochastic; --seed is required");
    auto inst = instance_from_json(load_json(lp_opt.instance));
    SgdConfig cfg;
    cfg.mode = lp_opt.mode == "sgd" ? SgdConfig::Mode::Sgd : SgdConfig::Mode::FullGradient;
    cfg.iterations = lp_opt.iters;
    cfg.epsilon = lp_opt.eps;
    cfg.seed = lp_opt.seed;
    auto sol = solve_lp(inst.dist, inst.matroid, cfg);
    save_json(lp_opt.out, solution_to_json(sol.x, sol.objective, lp_opt.mode));
    if (!lp_opt.trace.empty()) {
      std::vector<std::vector<std::string>> rows;
      for (auto [it, f] : sol.trace) rows.push_back({std::to_string(it), fmt(f)});
      save_csv(lp_opt.trace, {"iteration", "objective"}, rows);
    }
    std::printf("objective %.6f (%s)\n", sol.objective, lp_opt.mode.c_str());
  });

  // ---- round --------------------------------------------------------------
  auto* rd = app.add_subcommand("round", "randomized rounding of an LP solution");
  struct {
    std::string instance, solution, out = "rounds.csv", summary = "round_summary.json";
    double alpha = 0;
    bool alpha_log_n = false;
    double theta = 1.0;
    bool k_uniform = false;
    long trials = 1000;
    uint64_t seed = 0;
  } rd_opt;
  rd->add_option("--instance", rd_opt.instance)->required();
  rd->add_option("--solution", rd_opt.solution)->required();
  rd->add_option("--alpha", rd_opt.alpha);
  rd->add_flag("--alpha-log-n", rd_opt.alpha_log_n, "use alpha = 4 ln n");
  rd->add_flag("--k-uniform", rd_opt.k_uniform, "alpha-point rounding for uniform matroids");
  rd->add_option("--theta", rd_opt.theta);
  rd->add_option("--trials", rd_opt.trials);
  rd->add_option("--seed", rd_opt.seed)->required();
  rd->add_option("--out", rd_opt.out);
  rd->add_option("--summary", rd_opt.summary);
  rd->callback([&] {
    auto inst = instance_from_json(load_json(rd_opt.instance));
    auto x = schedule_from_json(load_json(rd_opt.solution));
    const int n = static_cast<int>(inst.dist.n());
    const double alpha = rd_opt.alpha_log_n ? 4 * std::log(std::max(2, n)) : rd_opt.alpha;
    Rng rng(rd_opt.seed);
    std::vector<double> costs;
    std::vector<std::vector<std::string>> rows;
    for (long t = 0; t < rd_opt.trials; ++t) {
      Rng sub = rng.substream(t);
      RoundedOrder order = rd_opt.k_uniform ? round_k_uniform(x, rd_opt.theta, sub)
                                            : randomized_rounding(x, alpha, sub);
      const double cost = order_cost(complete_order(order, n), inst.dist, inst.matroid);
      costs.push_back(cost);
      rows.push_back({std::to_string(t), fmt(cost)});
    }
    save_csv(rd_opt.out, {"seed", "cost"}, rows);
    Summary s = summarize(costs);
    const double lp_obj = objective(x, inst.dist, inst.matroid);
    json j{{"mean", s.mean},     {"std", s.stddev},        {"min", s.min},
           {"max", s.max},       {"lp_objective", lp_obj}, {"lp_ratio", lp_obj > 0 ? s.mean / lp_obj : 0.0},
           {"alpha", alpha},     {"trials", rd_opt.trials}};
    save_json(rd_opt.summary, j);
    std::printf("mean cost %.4f over %ld roundings (LP %.4f)\n", s.mean, rd_opt.trials, lp_obj);
  });

  // ---- greedy / cna-check ---------------------------------------------------
  auto* gr = app.add_subcommand("greedy", "conditional greedy order for 1-of-n");
  struct {
    std::string instance, out = "greedy.json";
  } gr_opt;
  gr->add_option("--instance", gr_opt.instance)->required();
  gr->add_option("--out", gr_opt.out);
  gr->callback([&] {
    auto inst = instance_from_json(load_json(gr_opt.instance));
    auto tr = conditional_greedy(inst.dist);
    json j{{"order", tr.order}, {"cost", greedy_cost(tr)}, {"q", tr.q}, {"c", tr.c}, {"r", tr.r}};
    save_json(gr_opt.out, j);
    std::printf("greedy cost %.6f\n", greedy_cost(tr));
  });

  auto* cna = app.add_subcommand("cna-check", "exhaustive CNCP verdict");
  struct {
    std::string instance, out = "cncp.json";
  } cna_opt;
  cna->add_option("--instance", cna_opt.instance)->required();
  cna->add_option("--out", cna_opt.out);
  cna->callback([&] {
    auto inst = instance_from_json(load_json(cna_opt.instance));
    auto verdict = check_cncp(inst.dist);
    json j;
    j["cncp"] = !verdict.has_value();
    if (verdict) {
      j["witness"] = {{"event_active", verdict->event_active.ids()},
                      {"event_inactive", verdict->event_inactive.ids()},
                      {"A", verdict->a.ids()},
                      {"B", verdict->b.ids()},
                      {"lhs", verdict->lhs},
                      {"rhs", verdict->rhs}};
    }
    save_json(cna_opt.out, j);
    std::printf("CNCP %s\n", verdict ? "violated" : "holds");
  });

  // ---- gp-run / hgp-run -----------------------------------------------------
  auto* gp = app.add_subcommand("gp-run", "adaptive graph probing simulation");
  struct {
    std::string graph, out = "gp.csv", summary = "gp_summary.json", policy = "default";
    int k = 1;
    long worlds = 1000;
    uint64_t seed = 0;
  } gp_opt;
  gp->add_option("--graph", gp_opt.graph)->required();
  gp->add_option("--k", gp_opt.k)->required();
  gp->add_option("--worlds", gp_opt.worlds);
  gp->add_option("--seed", gp_opt.seed)->required();
  gp->add_option("--policy", gp_opt.policy)->check(CLI::IsMember({"default"}));
  gp->add_option("--out", gp_opt.out);
  gp->add_option("--summary", gp_opt.summary);
  gp->callback([&] {
    auto g = graph_from_json(load_json(gp_opt.graph));
    auto res = evaluate_gp(g, gp_opt.k, default_vertex_policy(), gp_opt.worlds, gp_opt.seed);
    write_world_rows(gp_opt.out, res);
    save_json(gp_opt.summary, summary_json(res));
    std::printf("mean probes %.4f over %ld worlds\n", res.probes.mean, gp_opt.worlds);
  });

  auto* hgp = app.add_subcommand("hgp-run", "adaptive hypergraph probing simulation");
  struct {
    std::string hypergraph, out = "hgp.csv", summary = "hgp_summary.json";
    int k = 1;
    long worlds = 1000;
    uint64_t seed = 0;
  } hgp_opt;
  hgp->add_option("--hypergraph", hgp_opt.hypergraph)->required();
  hgp->add_option("--k", hgp_opt.k)->required();
  hgp->add_option("--worlds", hgp_opt.worlds);
  hgp->add_option("--seed", hgp_opt.seed)->required();
  hgp->add_option("--out", hgp_opt.out);
  hgp->add_option("--summary", hgp_opt.summary);
  hgp->callback([&] {
    auto h = hypergraph_from_json(load_json(hgp_opt.hypergraph));
    auto res = evaluate_hgp(h, hgp_opt.k, default_vertex_policy(), hgp_opt.worlds, hgp_opt.seed);
    write_world_rows(hgp_opt.out, res);
    save_json(hgp_opt.summary, summary_json(res));
    std::printf("mean probes %.4f over %ld worlds\n", res.probes.mean, hgp_opt.worlds);
  });

  // ---- eval -----------------------------------------------------------------
  auto* ev = app.add_subcommand("eval", "evaluate a fixed probe order on an instance");
  struct {
    std::string instance, order, out = "order_eval.json";
  } ev_opt;
  ev->add_option("--order-instance", ev_opt.instance)->required();
  ev->add_option("--order", ev_opt.order)->required();
  ev->add_option("--out", ev_opt.out);
  ev->callback([&] {
    auto inst = instance_from_json(load_json(ev_opt.instance));
    auto order = parse_order(ev_opt.order);
    const double cost = order_cost(order, inst.dist, inst.matroid);
    json j{{"order", order}, {"expected_cost", cost}};
    save_json(ev_opt.out, j);
    std::printf("expected cost %.6f\n", cost);
  });

  // ---- report ---------------------------------------------------------------
  auto* rp = app.add_subcommand("report", "ratio of an algorithm summary against an oracle value");
  struct {
    std::string alg, out = "report.json";
    double oracle = 0, bound = 0;
  } rp_opt;
  rp->add_option("--alg", rp_opt.alg)->required();
  rp->add_option("--oracle", rp_opt.oracle)->required();
  rp->add_option("--bound", rp_opt.bound)->required();
  rp->add_option("--out", rp_opt.out);
  rp->callback([&] {
    json a = load_json(rp_opt.alg);
    const double alg = a.contains("mean_probes") ? a["mean_probes"].get<double>()
                                                 : a.at("mean").get<double>();
    RatioRow row = make_ratio_row(rp_opt.alg, alg, rp_opt.oracle, rp_opt.bound);
    json j{{"algorithm", row.algorithm},
           {"oracle", row.oracle},
           {"ratio", row.ratio},
           {"bound", row.bound},
           {"within_bound", row.within_bound}};
    save_json(rp_opt.out, j);
    std::printf("ratio %.4f vs bound %.4f -> %s\n", row.ratio, row.bound,
                row.within_bound ? "ok" : "VIOLATED");
    if (!row.within_bound) std::exit(3);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const InvariantViolation& e) {
    std::fprintf(stderr, "invariant violation: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
