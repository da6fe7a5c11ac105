#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "plate/config.hpp"

namespace plate {

// Outcome of one run.  exit_code: 0 = all checks passed, 2 = numerical
// failure reported as data (e.g. a diverged march), 3 = a verification
// criterion failed.  Config errors and hard numerical errors are thrown
// instead and mapped to exit codes 1 and 2 by the CLI.
struct RunSummary {
    std::string experiment;
    std::filesystem::path run_dir;
    int exit_code = 0;
    std::vector<std::string> lines;
};

struct CompareResult {
    double max_rel_dev = 0.0;
    std::map<std::string, double> per_column;
    bool pass = false;
    std::string note;
};

// Execute one experiment from a parsed config.  `experiment` (the CLI
// subcommand) wins over any `experiment` key in the config.  The run
// directory is created under out_root (which itself defaults to
// $PLATE_OUT_ROOT or ./runs when empty) and always receives: a config
// snapshot, norms.csv / reports.csv / fits.csv (headers always, rows when
// applicable), summary.txt (written atomically), plot data + a gnuplot
// script, and a FAILED marker if the run aborts with an exception.
RunSummary run(const Config& cfg, const std::string& experiment,
               const std::filesystem::path& out_root,
               std::optional<std::uint64_t> seed_override, int jobs);

// Column-wise comparison of two runs' norms.csv: max relative deviation
// per column; pass when every deviation is <= tolerance.
CompareResult compare_runs(const std::filesystem::path& run_a,
                           const std::filesystem::path& run_b, double tolerance);

// Shortest round-trip decimal rendering of a binary64, shared by every CSV
// writer so equal numbers always serialize to equal bytes.
std::string format_csv_double(double v);

// Resolve the output root: explicit value, else $PLATE_OUT_ROOT, else ./runs.
std::filesystem::path resolve_out_root(const std::string& cli_out);

} // namespace plate
