#include <set>
#include <string>
#include <vector>

#include "doctest.h"
#include "soctat/cluster.hpp"

using namespace soctat;

namespace {

CoreProfile prof(const char* id, int inputs, int gates) {
  CoreProfile p;
  p.core_id = id;
  p.n_inputs = inputs;
  p.n_gates = gates;
  return p;
}

std::vector<std::vector<std::string>> ids_of(
    const std::vector<CoreProfile>& profiles, const Clustering& cl) {
  std::vector<std::vector<std::string>> out;
  for (const Cluster& c : cl.clusters) {
    std::vector<std::string> ids;
    for (std::size_t m : c.members) ids.push_back(profiles[m].core_id);
    out.push_back(ids);
  }
  return out;
}

}  // namespace

TEST_CASE("similarity predicates sit exactly on their thresholds") {
  CHECK(similar_inputs(prof("a", 24, 0), prof("b", 24, 0), 0));
  CHECK_FALSE(similar_inputs(prof("a", 24, 0), prof("b", 25, 0), 0));
  CHECK(similar_inputs(prof("a", 24, 0), prof("b", 25, 0), 1));
  CHECK(similar_inputs(prof("a", 25, 0), prof("b", 24, 0), 1));

  // 0.2 * max(101,119) = 23.8, and the gap is 18.
  CHECK(similar_gates(prof("a", 0, 101), prof("b", 0, 119), 0.20));
  // 0.2 * 119 = 23.8 < 35.
  CHECK_FALSE(similar_gates(prof("a", 0, 84), prof("b", 0, 119), 0.20));
  // Exactly on the boundary: gap 20 <= 0.2 * 100.
  CHECK(similar_gates(prof("a", 0, 80), prof("b", 0, 100), 0.20));
  CHECK_FALSE(similar_gates(prof("a", 0, 79), prof("b", 0, 100), 0.20));
  CHECK(similar_gates(prof("a", 0, 0), prof("b", 0, 0), 0.20));
}

TEST_CASE("the six-core system clusters as published") {
  // Profile order matters: greedy first-fit seeds in list order.
  std::vector<CoreProfile> p{prof("s344", 24, 101), prof("s1196", 32, 388),
                             prof("s382", 24, 99),  prof("s713", 54, 139),
                             prof("s444", 24, 119), prof("s1238", 32, 428)};
  Clustering cl = cluster_cores(p);
  auto ids = ids_of(p, cl);
  REQUIRE(ids.size() == 3);
  CHECK(ids[0] == std::vector<std::string>{"s344", "s382", "s444"});
  CHECK(ids[1] == std::vector<std::string>{"s1196", "s1238"});
  CHECK(ids[2] == std::vector<std::string>{"s713"});
  CHECK(cl.clusters[0].tier == ClusterTier::InputsAndGates);
  CHECK(cl.clusters[1].tier == ClusterTier::InputsAndGates);
  CHECK(cl.clusters[2].tier == ClusterTier::Singleton);
}

TEST_CASE("membership requires similarity to every member, not just the seed") {
  // B joins A (gap 19 <= 23.8). C is similar to A (16 <= 20.2) but not to
  // B (35 > 23.8), so C may not ride in on the seed alone.
  std::vector<CoreProfile> p{prof("A", 10, 100), prof("B", 10, 119),
                             prof("C", 10, 84)};
  Clustering cl = cluster_cores(p);
  auto ids = ids_of(p, cl);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == std::vector<std::string>{"A", "B"});
  CHECK(ids[1] == std::vector<std::string>{"C"});
  CHECK(cl.clusters[0].tier == ClusterTier::InputsAndGates);
  CHECK(cl.clusters[1].tier == ClusterTier::Singleton);
}

TEST_CASE("input-only matching is the fallback tier") {
  std::vector<CoreProfile> p{prof("A", 10, 1), prof("B", 10, 1000),
                             prof("C", 10, 1000000)};
  Clustering cl = cluster_cores(p);
  auto ids = ids_of(p, cl);
  REQUIRE(ids.size() == 1);
  CHECK(ids[0] == std::vector<std::string>{"A", "B", "C"});
  CHECK(cl.clusters[0].tier == ClusterTier::InputsOnly);
}

TEST_CASE("gate similarity beats input-only membership") {
  // D matches the seed on gates too, E only on inputs: the gate-similar
  // cluster forms first and E falls back to its own cluster.
  std::vector<CoreProfile> p{prof("S", 8, 100), prof("E", 8, 500),
                             prof("D", 8, 110)};
  Clustering cl = cluster_cores(p);
  auto ids = ids_of(p, cl);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == std::vector<std::string>{"S", "D"});
  CHECK(cl.clusters[0].tier == ClusterTier::InputsAndGates);
  CHECK(ids[1] == std::vector<std::string>{"E"});
}

TEST_CASE("clusters partition the cores") {
  std::vector<CoreProfile> p;
  for (int i = 0; i < 40; ++i)
    p.push_back(prof(("c" + std::to_string(i)).c_str(), (i * 7) % 13,
                     (i * 31) % 400));
  Clustering cl = cluster_cores(p);
  std::set<std::size_t> seen;
  for (const Cluster& c : cl.clusters) {
    REQUIRE_FALSE(c.members.empty());
    bool sorted = std::is_sorted(c.members.begin(), c.members.end());
    CHECK(sorted);
    for (std::size_t m : c.members) CHECK(seen.insert(m).second);
    // Tier claims hold pairwise.
    for (std::size_t i = 0; i < c.members.size(); ++i)
      for (std::size_t j = i + 1; j < c.members.size(); ++j) {
        const CoreProfile& a = p[c.members[i]];
        const CoreProfile& b = p[c.members[j]];
        CHECK(similar_inputs(a, b, 0));
        if (c.tier == ClusterTier::InputsAndGates)
          CHECK(similar_gates(a, b, 0.20));
      }
  }
  CHECK(seen.size() == p.size());
}

TEST_CASE("a gate budget splits oversized clusters") {
  std::vector<CoreProfile> p{prof("A", 4, 100), prof("B", 4, 100),
                             prof("C", 4, 100)};
  ClusterConfig cfg;
  cfg.max_cluster_gates = 250;
  Clustering cl = cluster_cores(p, cfg);
  auto ids = ids_of(p, cl);
  REQUIRE(ids.size() == 2);
  CHECK(ids[0] == std::vector<std::string>{"A", "B"});
  CHECK(ids[1] == std::vector<std::string>{"C"});
  CHECK(cl.clusters[0].tier == ClusterTier::InputsAndGates);
  CHECK(cl.clusters[1].tier == ClusterTier::InputsAndGates);

  // A budget below a single member still yields singletons rather than
  // dropping cores.
  cfg.max_cluster_gates = 50;
  Clustering tiny = cluster_cores(p, cfg);
  CHECK(tiny.clusters.size() == 3);

  // Unlimited keeps one cluster.
  cfg.max_cluster_gates = 0;
  CHECK(cluster_cores(p, cfg).clusters.size() == 1);
}

TEST_CASE("export prints one line per cluster") {
  std::vector<CoreProfile> p{prof("s344", 24, 101), prof("s382", 24, 99),
                             prof("s713", 54, 139)};
  Clustering cl = cluster_cores(p);
  CHECK(export_clusters(p, cl) ==
        "cluster 0 [inputs_and_gates] : s344,s382\n"
        "cluster 1 [singleton] : s713\n");
}

TEST_CASE("empty input yields an empty clustering") {
  Clustering cl = cluster_cores({});
  CHECK(cl.clusters.empty());
  CHECK(export_clusters({}, cl).empty());
}
