#include "soctat/cluster.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

namespace soctat {

const char* to_string(ClusterTier t) {
  switch (t) {
    case ClusterTier::InputsAndGates: return "inputs_and_gates";
    case ClusterTier::InputsOnly: return "inputs_only";
    case ClusterTier::Singleton: return "singleton";
  }
  return "?";
}

bool similar_inputs(const CoreProfile& a, const CoreProfile& b, int eps) {
  return std::abs(a.n_inputs - b.n_inputs) <= eps;
}

bool similar_gates(const CoreProfile& a, const CoreProfile& b,
                   double eps_rel) {
  int hi = std::max(a.n_gates, b.n_gates);
  return std::abs(a.n_gates - b.n_gates) <= eps_rel * hi;
}

namespace {

// Splits an oversized cluster into runs whose gate totals stay within the
// cap; a member that alone exceeds the cap still gets its own cluster.
void append_capped(std::vector<Cluster>& out, const Cluster& cl,
                   const std::vector<CoreProfile>& profiles, long cap) {
  Cluster cur{{}, cl.tier};
  long total = 0;
  for (std::size_t m : cl.members) {
    long g = profiles[m].n_gates;
    if (!cur.members.empty() && total + g > cap) {
      out.push_back(std::move(cur));
      cur = Cluster{{}, cl.tier};
      total = 0;
    }
    cur.members.push_back(m);
    total += g;
  }
  if (!cur.members.empty()) out.push_back(std::move(cur));
}

}  // namespace

Clustering cluster_cores(const std::vector<CoreProfile>& profiles,
                         const ClusterConfig& cfg) {
  std::size_t n = profiles.size();
  std::vector<bool> assigned(n, false);
  Clustering result;

  auto gather = [&](std::size_t seed, bool use_gates) {
    std::vector<std::size_t> members{seed};
    for (std::size_t j = seed + 1; j < n; ++j) {
      if (assigned[j]) continue;
      bool ok = true;
      for (std::size_t m : members) {
        if (!similar_inputs(profiles[m], profiles[j], cfg.eps_inputs) ||
            (use_gates &&
             !similar_gates(profiles[m], profiles[j], cfg.eps_gates_rel))) {
          ok = false;
          break;
        }
      }
      if (ok) members.push_back(j);
    }
    return members;
  };

  for (std::size_t i = 0; i < n; ++i) {
    if (assigned[i]) continue;
    Cluster cl;
    if (auto both = gather(i, true); both.size() > 1) {
      cl = {std::move(both), ClusterTier::InputsAndGates};
    } else if (auto ins = gather(i, false); ins.size() > 1) {
      cl = {std::move(ins), ClusterTier::InputsOnly};
    } else {
      cl = {{i}, ClusterTier::Singleton};
    }
    for (std::size_t m : cl.members) assigned[m] = true;
    if (cfg.max_cluster_gates > 0)
      append_capped(result.clusters, cl, profiles, cfg.max_cluster_gates);
    else
      result.clusters.push_back(std::move(cl));
  }
  return result;
}

std::string export_clusters(const std::vector<CoreProfile>& profiles,
                            const Clustering& clustering) {
  std::ostringstream out;
  for (std::size_t k = 0; k < clustering.clusters.size(); ++k) {
    const Cluster& cl = clustering.clusters[k];
    out << "cluster " << k << " [" << to_string(cl.tier) << "] :";
    for (std::size_t i = 0; i < cl.members.size(); ++i)
      out << (i ? "," : " ") << profiles[cl.members[i]].core_id;
    out << '\n';
  }
  return out.str();
}

}  // namespace soctat
