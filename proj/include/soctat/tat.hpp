// tat: scan test-application-time accounting and the text/CSV reports.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace soctat {

// One full-scan load per test: cycles = scan-chain length x test count,
// with the chain length equal to the (shared) input count.
long long core_clk_cycle(long long inputs, long long tests);
long long cluster_clk_cycle(long long ci, long long tests);

// 100 * (sum(core cycles) - cluster cycles) / sum(core cycles).
// Negative when sharing loses; 0 when the sums are both zero.
double improvement(const std::vector<long long>& core_cycles,
                   long long cluster_cycle);
double total_improvement(long long total_core_cycles,
                         long long total_cluster_cycles);

// Half-up rounding to two decimals, and the fixed "12.34" rendering used
// by every report.
double round2(double x);
std::string format_pct(double x);

struct ReportCore {
  std::string core_id;
  long long inputs = 0;
  long long tests = 0;
  long long clk_cycle = 0;
};

struct ReportCluster {
  std::vector<std::string> member_ids;
  std::vector<long long> member_cycles;
  long long ci = 0;
  long long tests = 0;
  long long clk_cycle = 0;
  double imp = 0.0;  // percent vs summing its members

  std::string members_label() const;  // "id+id+id"
};

struct TatReport {
  std::vector<ReportCore> cores;
  std::vector<ReportCluster> clusters;
  long long total_core_cycles = 0;
  long long total_cluster_cycles = 0;
  double total_imp = 0.0;
};

// Fills the cycle, improvement, and total fields from inputs/tests/ci
// already present in the rows.
void finalize_report(TatReport& r);

std::string report_text(const TatReport& r);
std::string report_cores_csv(const TatReport& r);
std::string report_clusters_csv(const TatReport& r);
std::string report_summary_csv(const TatReport& r);

}  // namespace soctat
