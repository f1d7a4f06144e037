#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "kaclab/core.hpp"
#include "kaclab/errors.hpp"

namespace kaclab {

class InitialCondition;

enum class Verb
{
  Simulate,
  Spectrum,
  Boltzmann,
  Entropy,
  Chaos
};

std::string to_string(Verb verb);
std::optional<Verb> parse_verb(std::string_view name);

/// Bad command line: missing verb, missing required key, flag without value.
class UsageError : public Error
{
 public:
  using Error::Error;
};

class UnknownKeyError : public Error
{
 public:
  using Error::Error;
};

/// Value that does not parse or is out of range.
class MalformedValueError : public Error
{
 public:
  using Error::Error;
};

/// Product initial law: "gaussian" (temperature, mean) or "two-temperature"
/// (hot-fraction, hot-temperature, cold-temperature).
struct InitialSpec
{
  std::string family = "gaussian";
  double temperature = 1.0;
  double mean = 0.0;
  double hot_fraction = 0.5;
  double hot_temperature = 3.0;
  double cold_temperature = 0.2;

  InitialCondition build() const;
  bool operator==(const InitialSpec&) const = default;
};

/// Fully resolved run configuration: every default is filled in, so the echo
/// of a config parses back to an identical value.
struct RunConfig
{
  Verb verb = Verb::Simulate;
  Params params;
  /// Particle numbers; spectrum and chaos accept a list, the other verbs use
  /// the single entry (also stored in params.n_particles).
  std::vector<int> sizes;
  std::uint64_t seed = 1;
  std::size_t replicas = 1000;
  double horizon = 0.0;
  int intervals = 20;
  /// "-" writes to standard output.
  std::string output;

  InitialSpec initial;
  std::string histogram_output;
  int histogram_bins = 256;
  int order = 8;
  int bootstrap = 64;

  bool operator==(const RunConfig&) const = default;
};

/// Parses `verb [--key value | --key=value]... [--config path]`. Values from
/// the config file are overridden by flags. Throws UsageError,
/// UnknownKeyError, MalformedValueError, or IoError for an unreadable file.
RunConfig parse_config(const std::vector<std::string>& args);

/// Builds a config from `key = value` pairs (one per line, `#` comments,
/// optional `verb = ...` line). A leading block written by
/// `config_comment_lines` is accepted as well.
RunConfig parse_config_text(std::string_view text, std::optional<Verb> verb = std::nullopt);

/// Effective configuration as `key = value` lines in a fixed order, led by
/// the `verb` line.
std::vector<std::string> config_lines(const RunConfig& config);

/// Output path after applying the KACLAB_OUTPUT_DIR default.
std::string resolve_output_path(const std::string& path, const std::string& fallback_name);

/// Keys accepted by a verb, in echo order.
const std::vector<std::string>& keys_for(Verb verb);

}  // namespace kaclab
