#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kaclab/config.hpp"
#include "kaclab/csv.hpp"

namespace kaclab {

class Histogram;
struct ObservableSeries;

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int usage = 2;
inline constexpr int numerical = 3;
inline constexpr int io = 4;
inline constexpr int unknown_key = 5;
inline constexpr int malformed_value = 6;
}  // namespace exit_code

/// time,K,T,m1..m6
CsvTable simulate_table(const ObservableSeries& series);
/// bin_left,bin_right,mass
CsvTable histogram_table(const Histogram& histogram);

/// Computes the table a verb writes to its main output.
CsvTable spectrum_table(const RunConfig& config);
CsvTable boltzmann_table(const RunConfig& config);
CsvTable entropy_table(const RunConfig& config);
CsvTable chaos_table(const RunConfig& config);

/// Comment block written in front of every output: a banner line followed by
/// the effective configuration.
std::vector<std::string> output_comments(const RunConfig& config);

/// Runs the verb and writes its CSV file(s).
void execute(const RunConfig& config);

/// Full command-line entry point: parses, executes and maps failures to
/// exit codes, reporting them on `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kaclab
