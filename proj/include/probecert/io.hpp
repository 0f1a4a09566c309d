#pragma once

#include <fstream>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "probecert/bits.hpp"
#include "probecert/errors.hpp"
#include "probecert/graph_probe.hpp"
#include "probecert/hypergraph_probe.hpp"
#include "probecert/instances.hpp"
#include "probecert/lp.hpp"
#include "probecert/matroid.hpp"
#include "probecert/scenario.hpp"

namespace probecert {

using json = nlohmann::json;

// ----------------------------------------------------------------------------
// Matroid descriptor: { "kind": "uniform"|"partition"|"graphic", ... }.

inline json matroid_to_json(const Matroid& m) {
  json j;
  switch (m.kind()) {
    case Matroid::Kind::Uniform:
      j["kind"] = "uniform";
      j["n"] = m.n();
      j["k"] = m.uniform_k();
      break;
    case Matroid::Kind::Partition:
      j["kind"] = "partition";
      j["parts"] = m.parts();
      j["quotas"] = m.quotas();
      break;
    case Matroid::Kind::Graphic: {
      j["kind"] = "graphic";
      j["vertices"] = m.num_vertices();
      std::vector<std::vector<int>> es;
      for (auto [u, v] : m.edges()) es.push_back({u, v});
      j["edges"] = es;
      break;
    }
  }
  return j;
}

inline Matroid matroid_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "uniform") return Matroid::uniform(j.at("n").get<int>(), j.at("k").get<int>());
  if (kind == "partition")
    return Matroid::partition(j.at("parts").get<std::vector<std::vector<int>>>(),
                              j.at("quotas").get<std::vector<int>>());
  if (kind == "graphic") {
    std::vector<std::pair<int, int>> edges;
    for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
    return Matroid::graphic(j.at("vertices").get<int>(), edges);
  }
  throw ValidationError("matroid_from_json: unknown kind '" + kind + "'");
}

// ----------------------------------------------------------------------------
// Instance file: { "n": int, "kind": string, "support": [{"set": [...], "p": f}],
//                  "matroid": {...} }; generative kinds carry their parameters.

inline json distribution_to_json(const ScenarioDistribution& d) {
  json j;
  j["n"] = d.n();
  j["kind"] = to_string(d.kind());
  switch (d.kind()) {
    case DistKind::Explicit: {
      json sup = json::array();
      for (const auto& [s, p] : d.support()) sup.push_back({{"set", s.ids()}, {"p", p}});
      j["support"] = sup;
      break;
    }
    case DistKind::LatentVertex:
      j["latents"] = d.latent_probs();
      j["observed"] = d.neighborhoods();
      break;
    case DistKind::PermutationReduction: {
      json sets = json::array();
      for (const Bits& a : d.hs_sets()) sets.push_back(a.ids());
      j["hs_sets"] = sets;
      break;
    }
  }
  return j;
}

inline ScenarioDistribution distribution_from_json(const json& j) {
  const uint32_t n = j.at("n").get<uint32_t>();
  const std::string kind = j.value("kind", "explicit");
  if (kind == "explicit") {
    std::vector<std::pair<Bits, double>> atoms;
    for (const auto& atom : j.at("support"))
      atoms.emplace_back(Bits::from_ids(n, atom.at("set").get<std::vector<int>>()),
                         atom.at("p").get<double>());
    return ScenarioDistribution::explicit_support(n, std::move(atoms));
  }
  if (kind == "latent-vertex")
    return ScenarioDistribution::latent_or_model(j.at("latents").get<std::vector<double>>(),
                                                 j.at("observed").get<std::vector<std::vector<int>>>());
  if (kind == "permutation-reduction") {
    const auto raw = j.at("hs_sets").get<std::vector<std::vector<int>>>();
    const int N = static_cast<int>(raw.size());
    std::vector<Bits> sets;
    for (const auto& ids : raw) sets.push_back(Bits::from_ids(N, ids));
    return ScenarioDistribution::permutation_reduction(std::move(sets));
  }
  throw ValidationError("distribution_from_json: unknown kind '" + kind + "'");
}

inline json instance_to_json(const MatroidInstance& inst) {
  json j = distribution_to_json(inst.dist);
  j["matroid"] = matroid_to_json(inst.matroid);
  return j;
}

inline MatroidInstance instance_from_json(const json& j) {
  return {matroid_from_json(j.at("matroid")), distribution_from_json(j)};
}

// ----------------------------------------------------------------------------
// Graph / hypergraph files.

inline json graph_to_json(const ProbeGraph& g) {
  json j;
  j["p"] = g.vertex_prob;
  std::vector<std::vector<int>> es;
  for (auto [u, v] : g.edges) es.push_back({u, v});
  j["edges"] = es;
  return j;
}

inline ProbeGraph graph_from_json(const json& j) {
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e.at(0).get<int>(), e.at(1).get<int>());
  return ProbeGraph(j.at("p").get<std::vector<double>>(), std::move(edges));
}

inline json hypergraph_to_json(const ProbeHypergraph& h) {
  json j;
  j["latents"] = h.latent_prob;
  j["observed"] = h.observed;
  return j;
}

inline ProbeHypergraph hypergraph_from_json(const json& j) {
  return ProbeHypergraph(j.at("latents").get<std::vector<double>>(),
                         j.at("observed").get<std::vector<std::vector<int>>>());
}

// ----------------------------------------------------------------------------
// LP solution file: { "x": [[...]], "objective": f, "mode": "sgd"|"full" }.

inline json solution_to_json(const FractionalSchedule& x, double objective, const std::string& mode) {
  json j;
  std::vector<std::vector<double>> rows;
  for (uint32_t e = 0; e < x.n(); ++e) {
    std::vector<double> row;
    for (uint32_t t = 0; t < x.n(); ++t) row.push_back(x(e, t));
    rows.push_back(std::move(row));
  }
  j["x"] = rows;
  j["objective"] = objective;
  j["mode"] = mode;
  return j;
}

inline FractionalSchedule schedule_from_json(const json& j) {
  const auto rows = j.at("x").get<std::vector<std::vector<double>>>();
  FractionalSchedule x(static_cast<uint32_t>(rows.size()));
  for (size_t e = 0; e < rows.size(); ++e) {
    if (rows[e].size() != rows.size()) throw ValidationError("schedule_from_json: x must be square");
    for (size_t t = 0; t < rows[e].size(); ++t) x.at(static_cast<int>(e), static_cast<int>(t)) = rows[e][t];
  }
  return x;
}

// ----------------------------------------------------------------------------
// File helpers.

inline json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  json j;
  in >> j;
  return j;
}

inline void save_json(const std::string& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << "\n";
}

inline void save_csv(const std::string& path, const std::vector<std::string>& header,
                     const std::vector<std::vector<std::string>>& rows) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  for (size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << "\n";
  for (const auto& row : rows) {
    for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << "\n";
  }
}

}  // namespace probecert
