#include "soctat/tat.hpp"

#include <cmath>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace soctat {

long long core_clk_cycle(long long inputs, long long tests) {
  return inputs * tests;
}

long long cluster_clk_cycle(long long ci, long long tests) {
  return ci * tests;
}

double improvement(const std::vector<long long>& core_cycles,
                   long long cluster_cycle) {
  long long total = std::accumulate(core_cycles.begin(), core_cycles.end(),
                                    0ll);
  return total_improvement(total, cluster_cycle);
}

double total_improvement(long long total_core_cycles,
                         long long total_cluster_cycles) {
  if (total_core_cycles == 0) return 0.0;
  return 100.0 *
         static_cast<double>(total_core_cycles - total_cluster_cycles) /
         static_cast<double>(total_core_cycles);
}

double round2(double x) {
  return static_cast<double>(std::llround(x * 100.0)) / 100.0;
}

std::string format_pct(double x) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2) << round2(x);
  return out.str();
}

std::string ReportCluster::members_label() const {
  std::string s;
  for (std::size_t i = 0; i < member_ids.size(); ++i) {
    if (i) s += '+';
    s += member_ids[i];
  }
  return s;
}

void finalize_report(TatReport& r) {
  r.total_core_cycles = 0;
  for (ReportCore& c : r.cores) {
    c.clk_cycle = core_clk_cycle(c.inputs, c.tests);
    r.total_core_cycles += c.clk_cycle;
  }
  r.total_cluster_cycles = 0;
  for (ReportCluster& cl : r.clusters) {
    cl.clk_cycle = cluster_clk_cycle(cl.ci, cl.tests);
    cl.imp = improvement(cl.member_cycles, cl.clk_cycle);
    r.total_cluster_cycles += cl.clk_cycle;
  }
  r.total_imp = total_improvement(r.total_core_cycles, r.total_cluster_cycles);
}

std::string report_text(const TatReport& r) {
  std::ostringstream out;
  std::size_t id_w = 8, mem_w = 12;
  for (const ReportCore& c : r.cores) id_w = std::max(id_w, c.core_id.size());
  for (const ReportCluster& cl : r.clusters)
    mem_w = std::max(mem_w, cl.members_label().size());

  out << std::left << std::setw(static_cast<int>(id_w) + 2) << "core"
      << std::right << std::setw(8) << "inputs" << std::setw(8) << "tests"
      << std::setw(12) << "clk_cycle" << '\n';
  for (const ReportCore& c : r.cores)
    out << std::left << std::setw(static_cast<int>(id_w) + 2) << c.core_id
        << std::right << std::setw(8) << c.inputs << std::setw(8) << c.tests
        << std::setw(12) << c.clk_cycle << '\n';
  out << '\n';
  out << std::left << std::setw(static_cast<int>(mem_w) + 2) << "cluster"
      << std::right << std::setw(6) << "ci" << std::setw(8) << "tests"
      << std::setw(12) << "clk_cycle" << std::setw(10) << "imp(%)" << '\n';
  for (const ReportCluster& cl : r.clusters)
    out << std::left << std::setw(static_cast<int>(mem_w) + 2)
        << cl.members_label() << std::right << std::setw(6) << cl.ci
        << std::setw(8) << cl.tests << std::setw(12) << cl.clk_cycle
        << std::setw(10) << format_pct(cl.imp) << '\n';
  out << '\n';
  out << "total core cycles:    " << r.total_core_cycles << '\n';
  out << "total cluster cycles: " << r.total_cluster_cycles << '\n';
  out << "total improvement:    " << format_pct(r.total_imp) << "%\n";
  return out.str();
}

std::string report_cores_csv(const TatReport& r) {
  std::ostringstream out;
  out << "core_id,inputs,tests,clk_cycle\n";
  for (const ReportCore& c : r.cores)
    out << c.core_id << ',' << c.inputs << ',' << c.tests << ','
        << c.clk_cycle << '\n';
  return out.str();
}

std::string report_clusters_csv(const TatReport& r) {
  std::ostringstream out;
  out << "cluster,members,ci,tests,clk_cycle,imp\n";
  for (std::size_t k = 0; k < r.clusters.size(); ++k) {
    const ReportCluster& cl = r.clusters[k];
    out << k << ',' << cl.members_label() << ',' << cl.ci << ',' << cl.tests
        << ',' << cl.clk_cycle << ',' << format_pct(cl.imp) << '\n';
  }
  return out.str();
}

std::string report_summary_csv(const TatReport& r) {
  std::ostringstream out;
  out << "total_core_cycles,total_cluster_cycles,total_imp\n";
  out << r.total_core_cycles << ',' << r.total_cluster_cycles << ','
      << format_pct(r.total_imp) << '\n';
  return out.str();
}

}  // namespace soctat
