// cluster: greedy structural clustering of cores by input-count and
// gate-count similarity.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soctat {

struct CoreProfile {
  std::string core_id;
  int n_inputs = 0;  // scan-view inputs: PIs + flip-flops
  int n_gates = 0;   // logic gates
  // Carried along for reporting; the clustering itself ignores these.
  int n_pis = 0;
  int n_pos = 0;
  int n_ffs = 0;
  std::size_t n_faults = 0;
};

struct ClusterConfig {
  int eps_inputs = 0;           // absolute tolerance on input counts
  double eps_gates_rel = 0.20;  // relative tolerance on gate counts
  long max_cluster_gates = 0;   // 0 = unlimited; otherwise split greedily
};

enum class ClusterTier { InputsAndGates, InputsOnly, Singleton };

const char* to_string(ClusterTier t);

struct Cluster {
  std::vector<std::size_t> members;  // indices into the profile list
  ClusterTier tier = ClusterTier::Singleton;
};

struct Clustering {
  std::vector<Cluster> clusters;
};

// |a.n_inputs - b.n_inputs| <= eps
bool similar_inputs(const CoreProfile& a, const CoreProfile& b, int eps);

// |a.n_gates - b.n_gates| <= eps_rel * max(a.n_gates, b.n_gates)
bool similar_gates(const CoreProfile& a, const CoreProfile& b, double eps_rel);

// Greedy first-fit pass in profile order: each unassigned core seeds a
// cluster and pulls in every later unassigned core similar to all members
// so far, preferring input+gate similarity, falling back to input-only,
// else a singleton. Clusters partition the cores and keep member order.
Clustering cluster_cores(const std::vector<CoreProfile>& profiles,
                         const ClusterConfig& cfg = {});

// One line per cluster: "cluster <k> [<tier>] : id,id,..."
std::string export_clusters(const std::vector<CoreProfile>& profiles,
                            const Clustering& clustering);

}  // namespace soctat
