// cli: manifest handling and the profile/atpg/run subcommands.
#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "soctat/atpg.hpp"
#include "soctat/cluster.hpp"

namespace soctat {

struct ManifestEntry {
  std::string core_id;
  std::string path;
};

// "core_id  path" per line; '#' starts a comment. Paths are taken relative
// to the manifest's directory. Duplicate ids and malformed lines are errors.
std::vector<ManifestEntry> parse_manifest(const std::string& text,
                                          const std::string& filename);
std::vector<ManifestEntry> load_manifest(const std::string& path);

// Externally supplied test counts so TAT reports can be built without
// running ATPG. Rows: "core,<id>,<tests>[,<inputs>]" and
// "cluster,<id+id+...>,<tests>"; an inputs field overrides the core's
// profiled scan-input count.
struct TestsFrom {
  struct CoreRow {
    long long tests = 0;
    long long inputs = -1;  // <0: use the profiled value
  };
  std::map<std::string, CoreRow> cores;
  std::map<std::string, long long> clusters;  // keyed by "id+id+..."
};

TestsFrom parse_tests_from(const std::string& text,
                           const std::string& filename);
TestsFrom load_tests_from(const std::string& path);

struct ProfileOptions {
  std::vector<std::string> bench_paths;
  bool all_cells = false;
  std::string format = "text";  // text | csv
};

struct AtpgOptions {
  std::string bench_path;
  AtpgConfig config;
  std::string out_path;          // test set file; empty: skip
  std::string dump_faults_path;  // fault list file; empty: skip
};

struct RunOptions {
  std::string manifest_path;
  AtpgConfig config;
  ClusterConfig cluster;
  std::string tests_from_path;  // empty: run ATPG
  std::string out_dir;          // empty: no artifacts
  std::string format = "text";  // text | csv
};

int cmd_profile(const ProfileOptions& opt, std::ostream& out);
int cmd_atpg(const AtpgOptions& opt, std::ostream& out);
int cmd_run(const RunOptions& opt, std::ostream& out);

// Full argv interface: parses flags, dispatches, maps exceptions to
// "error: ..." on stderr and a nonzero exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err);

}  // namespace soctat
