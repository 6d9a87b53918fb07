#include "soctat/cli.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "soctat/merge.hpp"
#include "soctat/sim.hpp"
#include "soctat/tat.hpp"

namespace soctat {

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw NetlistError("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw NetlistError("cannot write '" + path.string() + "'");
  out << text;
}

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

// fn(i) for every index; results must be written to per-index slots so the
// outcome is identical for any worker count.
template <typename Fn>
void parallel_indexed(std::size_t n, int threads, Fn&& fn) {
  threads = std::min<int>(threads, static_cast<int>(n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr failure;
  std::mutex failure_mu;
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mu);
          if (!failure) failure = std::current_exception();
        }
      }
    });
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

long long parse_ll(const std::string& s, const std::string& what,
                   const std::string& filename, int lineno) {
  std::size_t used = 0;
  long long v = 0;
  bool ok = !s.empty();
  if (ok) {
    try {
      v = std::stoll(s, &used);
    } catch (...) {
      ok = false;
    }
  }
  if (!ok || used != s.size())
    throw NetlistError(filename + ":" + std::to_string(lineno) + ": bad " +
                       what + " '" + s + "'");
  return v;
}

}  // namespace

std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::string& filename) {
  std::vector<ManifestEntry> entries;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::size_t ws = line.find_first_of(" \t");
    if (ws == std::string::npos)
      throw NetlistError(filename + ":" + std::to_string(lineno) +
                         ": expected 'core_id path'");
    ManifestEntry e;
    e.core_id = line.substr(0, ws);
    e.path = trim(line.substr(ws));
    if (e.path.empty())
      throw NetlistError(filename + ":" + std::to_string(lineno) +
                         ": missing netlist path for core '" + e.core_id +
                         "'");
    for (const ManifestEntry& prev : entries)
      if (prev.core_id == e.core_id)
        throw NetlistError(filename + ":" + std::to_string(lineno) +
                           ": duplicate core id '" + e.core_id + "'");
    entries.push_back(std::move(e));
  }
  if (entries.empty())
    throw NetlistError("manifest '" + filename + "' lists no cores");
  return entries;
}

std::vector<ManifestEntry> load_manifest(const std::string& path) {
  auto entries = parse_manifest(read_file(path), path);
  std::filesystem::path dir = std::filesystem::path(path).parent_path();
  for (ManifestEntry& e : entries) {
    std::filesystem::path p(e.path);
    if (p.is_relative()) e.path = (dir / p).string();
  }
  return entries;
}

TestsFrom parse_tests_from(const std::string& text,
                           const std::string& filename) {
  TestsFrom tf;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(trim(f));
    if (fields.size() < 3)
      throw NetlistError(filename + ":" + std::to_string(lineno) +
                         ": expected 'core,<id>,<tests>[,<inputs>]' or "
                         "'cluster,<members>,<tests>'");
    if (fields[0] == "core") {
      TestsFrom::CoreRow row;
      row.tests = parse_ll(fields[2], "test count", filename, lineno);
      if (fields.size() > 3 && !fields[3].empty())
        row.inputs = parse_ll(fields[3], "input count", filename, lineno);
      tf.cores[fields[1]] = row;
    } else if (fields[0] == "cluster") {
      tf.clusters[fields[1]] =
          parse_ll(fields[2], "test count", filename, lineno);
    } else {
      throw NetlistError(filename + ":" + std::to_string(lineno) +
                         ": unknown row kind '" + fields[0] + "'");
    }
  }
  return tf;
}

TestsFrom load_tests_from(const std::string& path) {
  return parse_tests_from(read_file(path), path);
}

int cmd_profile(const ProfileOptions& opt, std::ostream& out) {
  bool csv = opt.format == "csv";
  if (csv) {
    out << "core,pi,po,ff,gates";
    if (opt.all_cells) out << ",cells";
    out << ",inputs,faults\n";
  } else {
    out << std::left << std::setw(10) << "core" << std::right << std::setw(6)
        << "pi" << std::setw(6) << "po" << std::setw(6) << "ff" << std::setw(8)
        << "gates";
    if (opt.all_cells) out << std::setw(8) << "cells";
    out << std::setw(8) << "inputs" << std::setw(8) << "faults" << '\n';
  }
  for (const std::string& path : opt.bench_paths) {
    Circuit c = load_bench(path);
    ScanView v = scan_view(c);
    FaultList fl = build_fault_list(v);
    if (csv) {
      out << c.name << ',' << c.inputs.size() << ',' << c.outputs.size() << ','
          << c.dffs.size() << ',' << count_gates(c);
      if (opt.all_cells) out << ',' << count_gates(c, true);
      out << ',' << v.inputs.size() << ',' << fl.size() << '\n';
    } else {
      out << std::left << std::setw(10) << c.name << std::right << std::setw(6)
          << c.inputs.size() << std::setw(6) << c.outputs.size() << std::setw(6)
          << c.dffs.size() << std::setw(8) << count_gates(c);
      if (opt.all_cells) out << std::setw(8) << count_gates(c, true);
      out << std::setw(8) << v.inputs.size() << std::setw(8) << fl.size()
          << '\n';
    }
  }
  return 0;
}

int cmd_atpg(const AtpgOptions& opt, std::ostream& out) {
  Circuit c = load_bench(opt.bench_path);
  ScanView v = scan_view(c);
  FaultList fl = build_fault_list(v);
  TestSet ts = generate_test_set(v, fl, opt.config);

  if (!opt.out_path.empty()) write_file(opt.out_path, to_text(ts));
  if (!opt.dump_faults_path.empty())
    write_file(opt.dump_faults_path, export_faults(v, fl));

  out << "circuit " << c.name << '\n';
  out << "inputs " << v.inputs.size() << '\n';
  out << "faults " << fl.size() << '\n';
  out << "detected " << ts.n_detected << '\n';
  out << "untestable " << ts.n_untestable << '\n';
  out << "aborted " << ts.n_aborted << '\n';
  out << "coverage " << format_pct(ts.coverage()) << '\n';
  out << "tests " << ts.patterns.size() << '\n';
  out << "clk_cycle "
      << core_clk_cycle(static_cast<long long>(v.inputs.size()),
                        static_cast<long long>(ts.patterns.size()))
      << '\n';
  return 0;
}

int cmd_run(const RunOptions& opt, std::ostream& out) {
  std::vector<ManifestEntry> entries = load_manifest(opt.manifest_path);
  std::size_t n = entries.size();
  int threads = resolve_threads(opt.config.max_threads);

  std::vector<std::unique_ptr<Circuit>> circuits(n);
  std::vector<ScanView> views(n);
  std::vector<FaultList> faults(n);
  std::vector<CoreProfile> profiles(n);
  parallel_indexed(n, threads, [&](std::size_t i) {
    circuits[i] = std::make_unique<Circuit>(load_bench(entries[i].path));
    Circuit& c = *circuits[i];
    views[i] = scan_view(c);
    faults[i] = build_fault_list(views[i]);
    profiles[i] = CoreProfile{entries[i].core_id,
                              static_cast<int>(views[i].inputs.size()),
                              count_gates(c),
                              static_cast<int>(c.inputs.size()),
                              static_cast<int>(c.outputs.size()),
                              static_cast<int>(c.dffs.size()),
                              faults[i].size()};
  });

  // Parsed truth for the profile artifact, before any external override.
  std::ostringstream profile_csv;
  profile_csv << "core,pi,po,ff,gates,inputs,faults\n";
  for (std::size_t i = 0; i < n; ++i)
    profile_csv << profiles[i].core_id << ',' << profiles[i].n_pis << ','
                << profiles[i].n_pos << ',' << profiles[i].n_ffs << ','
                << profiles[i].n_gates << ',' << profiles[i].n_inputs << ','
                << profiles[i].n_faults << '\n';

  TestsFrom tf;
  bool use_tests_from = !opt.tests_from_path.empty();
  if (use_tests_from) {
    tf = load_tests_from(opt.tests_from_path);
    for (std::size_t i = 0; i < n; ++i) {
      auto it = tf.cores.find(profiles[i].core_id);
      if (it == tf.cores.end())
        throw NetlistError("no core row for '" + profiles[i].core_id +
                           "' in " + opt.tests_from_path);
      if (it->second.inputs >= 0)
        profiles[i].n_inputs = static_cast<int>(it->second.inputs);
    }
  }

  Clustering clustering = cluster_cores(profiles, opt.cluster);
  std::size_t nc = clustering.clusters.size();

  // Per-core solo test sets give the baseline side of every comparison.
  std::vector<long long> core_tests(n, 0);
  if (use_tests_from) {
    for (std::size_t i = 0; i < n; ++i)
      core_tests[i] = tf.cores.at(profiles[i].core_id).tests;
  } else {
    parallel_indexed(n, threads, [&](std::size_t i) {
      FaultList fl = faults[i];
      TestSet ts = generate_test_set(views[i], fl, opt.config);
      core_tests[i] = static_cast<long long>(ts.patterns.size());
    });
  }

  std::vector<MergedCircuit> merged(nc);
  parallel_indexed(nc, threads, [&](std::size_t k) {
    const Cluster& cl = clustering.clusters[k];
    std::vector<const ScanView*> member_views;
    std::vector<std::string> ids;
    for (std::size_t m : cl.members) {
      member_views.push_back(&views[m]);
      ids.push_back(profiles[m].core_id);
    }
    merged[k] =
        merge_cluster(member_views, ids, "cluster" + std::to_string(k));
  });

  std::vector<long long> cluster_tests(nc, 0);
  std::vector<std::string> cluster_test_text(nc);
  if (use_tests_from) {
    for (std::size_t k = 0; k < nc; ++k) {
      std::string key;
      for (std::size_t i = 0; i < clustering.clusters[k].members.size(); ++i) {
        if (i) key += '+';
        key += profiles[clustering.clusters[k].members[i]].core_id;
      }
      auto it = tf.clusters.find(key);
      if (it == tf.clusters.end())
        throw NetlistError("no cluster row for '" + key + "' in " +
                           opt.tests_from_path);
      cluster_tests[k] = it->second;
    }
  } else {
    parallel_indexed(nc, threads, [&](std::size_t k) {
      SharedTestResult shared = shared_test_set(merged[k], opt.config);
      cluster_tests[k] = static_cast<long long>(shared.tests.patterns.size());
      cluster_test_text[k] = to_text(shared.tests);
    });
  }

  TatReport report;
  for (std::size_t i = 0; i < n; ++i)
    report.cores.push_back(ReportCore{profiles[i].core_id,
                                      profiles[i].n_inputs, core_tests[i], 0});
  for (std::size_t k = 0; k < nc; ++k) {
    ReportCluster rc;
    long long ci = 0;
    for (std::size_t m : clustering.clusters[k].members) {
      rc.member_ids.push_back(profiles[m].core_id);
      rc.member_cycles.push_back(
          core_clk_cycle(profiles[m].n_inputs, core_tests[m]));
      ci = std::max<long long>(ci, profiles[m].n_inputs);
    }
    rc.ci = ci;
    rc.tests = cluster_tests[k];
    report.clusters.push_back(std::move(rc));
  }
  finalize_report(report);

  if (!opt.out_dir.empty()) {
    std::filesystem::path dir(opt.out_dir);
    std::filesystem::create_directories(dir);
    write_file(dir / "profile.csv", profile_csv.str());
    write_file(dir / "clusters.txt", export_clusters(profiles, clustering));
    for (std::size_t k = 0; k < nc; ++k) {
      write_file(dir / ("cluster" + std::to_string(k) + ".bench"),
                 to_bench(merged[k].circuit()));
      if (!use_tests_from)
        write_file(dir / ("cluster" + std::to_string(k) + ".tests"),
                   cluster_test_text[k]);
    }
    write_file(dir / "report.txt", report_text(report));
    write_file(dir / "cores.csv", report_cores_csv(report));
    write_file(dir / "clusters.csv", report_clusters_csv(report));
    write_file(dir / "summary.csv", report_summary_csv(report));
  }

  if (opt.format == "csv") {
    out << report_cores_csv(report) << '\n'
        << report_clusters_csv(report) << '\n'
        << report_summary_csv(report);
  } else {
    out << report_text(report);
  }
  return 0;
}

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  CLI::App app{
      "soctat: scan-view ATPG, core clustering, and broadcast test sharing "
      "for core-based SoCs"};
  app.require_subcommand(1);
  app.footer(
      "SOCTAT_THREADS caps worker threads; results are identical for any "
      "value.");

  ProfileOptions prof;
  CLI::App* p = app.add_subcommand(
      "profile", "Parse .bench cores and print structural profiles");
  p->add_option("benches", prof.bench_paths, ".bench netlists")
      ->required()
      ->check(CLI::ExistingFile);
  p->add_flag("--all-cells", prof.all_cells,
              "also count NOT/BUFF/DFF cells");
  p->add_option("--format", prof.format, "text or csv (default text)")
      ->check(CLI::IsMember({"text", "csv"}));

  AtpgOptions atpg;
  bool atpg_no_compaction = false;
  std::string atpg_fill = "random";
  CLI::App* a = app.add_subcommand(
      "atpg", "Generate a stuck-at test set for one core");
  a->add_option("bench", atpg.bench_path, ".bench netlist")
      ->required()
      ->check(CLI::ExistingFile);
  a->add_option("--seed", atpg.config.seed, "X-fill RNG seed (default 1)");
  a->add_option("--backtrack-limit", atpg.config.backtrack_limit,
                "PODEM backtrack limit per fault (default 10000)");
  a->add_flag("--no-compaction", atpg_no_compaction,
              "skip reverse-order compaction");
  a->add_option("--fill", atpg_fill, "X-fill policy: random, zeros, ones")
      ->check(CLI::IsMember({"random", "zeros", "ones"}));
  a->add_option("--out", atpg.out_path, "write the test set to this file");
  a->add_option("--dump-faults", atpg.dump_faults_path,
                "write the collapsed fault list with statuses");

  RunOptions run;
  bool run_no_compaction = false;
  CLI::App* r = app.add_subcommand(
      "run", "Cluster an SoC manifest and build shared broadcast test sets");
  r->add_option("manifest", run.manifest_path, "manifest: 'core_id path' lines")
      ->required()
      ->check(CLI::ExistingFile);
  r->add_option("--seed", run.config.seed, "X-fill RNG seed (default 1)");
  r->add_option("--eps-inputs", run.cluster.eps_inputs,
                "input-count tolerance (default 0)");
  r->add_option("--eps-gates-rel", run.cluster.eps_gates_rel,
                "relative gate-count tolerance (default 0.20)");
  r->add_option("--backtrack-limit", run.config.backtrack_limit,
                "PODEM backtrack limit per fault (default 10000)");
  r->add_flag("--no-compaction", run_no_compaction,
              "skip reverse-order compaction");
  r->add_option("--max-cluster-gates", run.cluster.max_cluster_gates,
                "split clusters above this many summed gates");
  r->add_option("--tests-from", run.tests_from_path,
                "CSV of externally supplied test counts; skips ATPG");
  r->add_option("--out", run.out_dir, "directory for artifacts");
  r->add_option("--format", run.format, "text or csv (default text)")
      ->check(CLI::IsMember({"text", "csv"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  try {
    if (*p) return cmd_profile(prof, out);
    if (*a) {
      atpg.config.compaction = !atpg_no_compaction;
      if (atpg_fill == "zeros") atpg.config.fill = AtpgConfig::Fill::Zeros;
      else if (atpg_fill == "ones") atpg.config.fill = AtpgConfig::Fill::Ones;
      return cmd_atpg(atpg, out);
    }
    if (*r) {
      run.config.compaction = !run_no_compaction;
      return cmd_run(run, out);
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace soctat
