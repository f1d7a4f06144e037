#include "kaclab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "kaclab/csv.hpp"
#include "kaclab/simulator.hpp"

namespace kaclab {

namespace {

const std::vector<std::string> kInitialKeys{"initial", "temperature", "mean", "hot-fraction", "hot-temperature",
                                            "cold-temperature"};

std::vector<std::string> join(std::initializer_list<std::vector<std::string>> parts)
{
  std::vector<std::string> out;
  for (const auto& p : parts)
    out.insert(out.end(), p.begin(), p.end());
  return out;
}

std::string_view trim(std::string_view s)
{
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos)
    return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view text)
{
  text = trim(text);
  double x = 0.0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty() || !std::isfinite(x))
    throw MalformedValueError("key '" + key + "': expected a finite number, got '" + std::string(text) + "'");
  return x;
}

template <class Int>
Int parse_integer(const std::string& key, std::string_view text)
{
  text = trim(text);
  Int x = 0;
  const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || end != text.data() + text.size() || text.empty())
    throw MalformedValueError("key '" + key + "': expected an integer, got '" + std::string(text) + "'");
  return x;
}

std::vector<int> parse_int_list(const std::string& key, std::string_view text)
{
  std::vector<int> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = text.find(',', start);
    out.push_back(parse_integer<int>(key, text.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos)
      break;
    start = comma + 1;
  }
  return out;
}

void require(bool ok, const std::string& key, const std::string& what)
{
  if (!ok)
    throw MalformedValueError("key '" + key + "': " + what);
}

double default_horizon(Verb verb, double mu)
{
  switch (verb) {
    case Verb::Entropy:
      return 6.0 / mu;
    case Verb::Chaos:
      return 1.0 / mu;
    default:
      return 10.0 / mu;
  }
}

using Pairs = std::map<std::string, std::string>;

RunConfig build(Verb verb, const Pairs& pairs)
{
  const auto& allowed = keys_for(verb);
  const std::set<std::string> accepted(allowed.begin(), allowed.end());
  for (const auto& [key, value] : pairs) {
    if (!accepted.count(key) && !(verb == Verb::Simulate && key == "k0"))
      throw UnknownKeyError("unknown key '" + key + "' for verb " + to_string(verb));
  }
  auto has = [&](const char* key) { return pairs.count(key) > 0; };
  auto get = [&](const char* key) -> const std::string& { return pairs.at(key); };

  if (!has("mu"))
    throw UsageError("missing required key 'mu'");
  if ((verb == Verb::Simulate || verb == Verb::Spectrum || verb == Verb::Entropy) && !has("n"))
    throw UsageError("missing required key 'n'");

  RunConfig c;
  c.verb = verb;
  c.params.mu = parse_double("mu", get("mu"));
  require(c.params.mu >= 0.0, "mu", "must be non-negative");
  if (has("lambda"))
    c.params.lambda = parse_double("lambda", get("lambda"));
  require(c.params.lambda >= 0.0, "lambda", "must be non-negative");
  if (has("beta"))
    c.params.beta = parse_double("beta", get("beta"));
  require(c.params.beta > 0.0, "beta", "must be positive");

  if (has("n"))
    c.sizes = parse_int_list("n", get("n"));
  else if (verb == Verb::Chaos)
    c.sizes = {10, 50, 250, 1250};
  else if (verb == Verb::Boltzmann)
    c.sizes = {1};
  for (int n : c.sizes)
    require(n >= 1, "n", "particle numbers must be >= 1");
  if (verb != Verb::Spectrum && verb != Verb::Chaos)
    require(c.sizes.size() == 1, "n", "takes a single value for verb " + to_string(verb));
  if (verb == Verb::Chaos)
    for (int n : c.sizes)
      require(n >= 2, "n", "chaos needs N >= 2");
  c.params.n_particles = c.sizes.front();

  const auto& keys = keys_for(verb);
  auto applies = [&](const char* key) { return std::find(keys.begin(), keys.end(), key) != keys.end(); };

  if (has("seed"))
    c.seed = parse_integer<std::uint64_t>("seed", get("seed"));
  if (has("replicas"))
    c.replicas = parse_integer<std::size_t>("replicas", get("replicas"));
  require(c.replicas >= 1, "replicas", "must be >= 1");
  if (has("intervals"))
    c.intervals = parse_integer<int>("intervals", get("intervals"));
  require(c.intervals >= 1, "intervals", "must be >= 1");
  if (has("output"))
    c.output = std::string(trim(get("output")));

  if (applies("horizon")) {
    if (has("horizon")) {
      c.horizon = parse_double("horizon", get("horizon"));
    } else {
      if (!(c.params.mu > 0.0))
        throw UsageError("key 'horizon' is required when mu = 0");
      c.horizon = default_horizon(verb, c.params.mu);
    }
    require(c.horizon > 0.0, "horizon", "must be positive");
  }

  if (applies("initial")) {
    auto& ic = c.initial;
    if (has("initial"))
      ic.family = std::string(trim(get("initial")));
    require(ic.family == "gaussian" || ic.family == "two-temperature", "initial",
            "must be 'gaussian' or 'two-temperature'");
    ic.temperature = 1.0 / c.params.beta;
    if (has("k0")) {
      if (has("temperature"))
        throw UsageError("keys 'k0' and 'temperature' are mutually exclusive");
      if (ic.family != "gaussian")
        throw UsageError("key 'k0' selects a Gaussian initial law");
      const double k0 = parse_double("k0", get("k0"));
      require(k0 > 0.0, "k0", "must be positive");
      ic.temperature = 2.0 * k0 / c.params.n_particles;
    }
    if (has("temperature"))
      ic.temperature = parse_double("temperature", get("temperature"));
    if (has("mean"))
      ic.mean = parse_double("mean", get("mean"));
    if (has("hot-fraction"))
      ic.hot_fraction = parse_double("hot-fraction", get("hot-fraction"));
    if (has("hot-temperature"))
      ic.hot_temperature = parse_double("hot-temperature", get("hot-temperature"));
    if (has("cold-temperature"))
      ic.cold_temperature = parse_double("cold-temperature", get("cold-temperature"));
    require(ic.temperature > 0.0, "temperature", "must be positive");
    require(ic.hot_fraction >= 0.0 && ic.hot_fraction <= 1.0, "hot-fraction", "must lie in [0, 1]");
    require(ic.hot_temperature > 0.0, "hot-temperature", "must be positive");
    require(ic.cold_temperature > 0.0, "cold-temperature", "must be positive");
  }

  if (has("histogram"))
    c.histogram_output = std::string(trim(get("histogram")));
  if (has("histogram-bins"))
    c.histogram_bins = parse_integer<int>("histogram-bins", get("histogram-bins"));
  require(c.histogram_bins >= 1, "histogram-bins", "must be >= 1");
  if (has("order"))
    c.order = parse_integer<int>("order", get("order"));
  require(c.order >= 2 && c.order <= 40, "order", "must lie in [2, 40]");
  if (has("bootstrap"))
    c.bootstrap = parse_integer<int>("bootstrap", get("bootstrap"));
  require(c.bootstrap >= 2, "bootstrap", "must be >= 2");
  return c;
}

void collect_pairs(std::string_view text, Pairs& pairs, std::optional<Verb>& verb)
{
  std::istringstream in{std::string(text)};
  std::string raw;
  bool header_mode = false;
  bool first = true;
  int lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = trim(raw);
    if (line.empty())
      continue;
    if (first) {
      first = false;
      // Comment block written in front of an output file.
      if (line.rfind("# kaclab ", 0) == 0) {
        header_mode = true;
        continue;
      }
    }
    if (header_mode) {
      if (line.front() != '#')
        break;
      line = trim(line.substr(1));
    } else if (line.front() == '#') {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos)
      throw MalformedValueError("config line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string value(trim(line.substr(eq + 1)));
    if (key == "verb") {
      const auto v = parse_verb(value);
      if (!v)
        throw UsageError("unknown verb '" + value + "'");
      if (verb && *verb != *v)
        throw UsageError("config file is for verb " + value + ", not " + to_string(*verb));
      verb = v;
      continue;
    }
    pairs[key] = value;
  }
}

}  // namespace

std::string to_string(Verb verb)
{
  switch (verb) {
    case Verb::Simulate:
      return "simulate";
    case Verb::Spectrum:
      return "spectrum";
    case Verb::Boltzmann:
      return "boltzmann";
    case Verb::Entropy:
      return "entropy";
    case Verb::Chaos:
      return "chaos";
  }
  return "unknown";
}

std::optional<Verb> parse_verb(std::string_view name)
{
  for (Verb v : {Verb::Simulate, Verb::Spectrum, Verb::Boltzmann, Verb::Entropy, Verb::Chaos})
    if (name == to_string(v))
      return v;
  return std::nullopt;
}

InitialCondition InitialSpec::build() const
{
  if (family == "two-temperature")
    return InitialCondition::two_temperature(hot_fraction, hot_temperature, cold_temperature);
  return InitialCondition::gaussian(temperature, mean);
}

const std::vector<std::string>& keys_for(Verb verb)
{
  static const std::vector<std::string> run{"n", "lambda", "mu", "beta", "seed", "replicas", "horizon", "intervals",
                                            "output"};
  static const std::vector<std::string> simulate = join({run, kInitialKeys, {"histogram", "histogram-bins"}});
  static const std::vector<std::string> spectrum{"n", "lambda", "mu", "beta", "output"};
  static const std::vector<std::string> boltzmann =
      join({{"lambda", "mu", "beta", "horizon", "intervals", "output"}, kInitialKeys, {"order"}});
  static const std::vector<std::string> entropy = join({run, kInitialKeys, {"bootstrap"}});
  static const std::vector<std::string> chaos = join({run, kInitialKeys});
  switch (verb) {
    case Verb::Simulate:
      return simulate;
    case Verb::Spectrum:
      return spectrum;
    case Verb::Boltzmann:
      return boltzmann;
    case Verb::Entropy:
      return entropy;
    case Verb::Chaos:
      return chaos;
  }
  return run;
}

std::vector<std::string> config_lines(const RunConfig& c)
{
  std::vector<std::string> out{"verb = " + to_string(c.verb)};
  for (const auto& key : keys_for(c.verb)) {
    std::string value;
    if (key == "n") {
      for (std::size_t i = 0; i < c.sizes.size(); ++i)
        value += (i ? "," : "") + std::to_string(c.sizes[i]);
    } else if (key == "lambda") {
      value = format_double(c.params.lambda);
    } else if (key == "mu") {
      value = format_double(c.params.mu);
    } else if (key == "beta") {
      value = format_double(c.params.beta);
    } else if (key == "seed") {
      value = std::to_string(c.seed);
    } else if (key == "replicas") {
      value = std::to_string(c.replicas);
    } else if (key == "horizon") {
      value = format_double(c.horizon);
    } else if (key == "intervals") {
      value = std::to_string(c.intervals);
    } else if (key == "output") {
      value = c.output;
    } else if (key == "initial") {
      value = c.initial.family;
    } else if (key == "temperature") {
      value = format_double(c.initial.temperature);
    } else if (key == "mean") {
      value = format_double(c.initial.mean);
    } else if (key == "hot-fraction") {
      value = format_double(c.initial.hot_fraction);
    } else if (key == "hot-temperature") {
      value = format_double(c.initial.hot_temperature);
    } else if (key == "cold-temperature") {
      value = format_double(c.initial.cold_temperature);
    } else if (key == "histogram") {
      value = c.histogram_output;
    } else if (key == "histogram-bins") {
      value = std::to_string(c.histogram_bins);
    } else if (key == "order") {
      value = std::to_string(c.order);
    } else if (key == "bootstrap") {
      value = std::to_string(c.bootstrap);
    }
    out.push_back(key + " = " + value);
  }
  return out;
}

RunConfig parse_config_text(std::string_view text, std::optional<Verb> verb)
{
  Pairs pairs;
  collect_pairs(text, pairs, verb);
  if (!verb)
    throw UsageError("no verb given");
  return build(*verb, pairs);
}

RunConfig parse_config(const std::vector<std::string>& args)
{
  if (args.empty())
    throw UsageError("no verb given");
  std::optional<Verb> verb = parse_verb(args[0]);
  if (!verb)
    throw UsageError("unknown verb '" + args[0] + "'");

  Pairs flags;
  std::optional<std::string> config_path;
  for (std::size_t i = 1; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a.rfind("--", 0) != 0 || a.size() == 2)
      throw UsageError("unexpected argument '" + a + "'");
    std::string key = a.substr(2);
    std::string value;
    if (const auto eq = key.find('='); eq != std::string::npos) {
      value = key.substr(eq + 1);
      key = key.substr(0, eq);
    } else {
      if (i + 1 >= args.size())
        throw UsageError("flag '--" + key + "' needs a value");
      value = args[++i];
    }
    if (key == "config")
      config_path = value;
    else
      flags[key] = value;
  }

  Pairs pairs;
  if (config_path) {
    std::ifstream file(*config_path);
    if (!file)
      throw IoError("cannot read config file '" + *config_path + "'");
    std::stringstream buf;
    buf << file.rdbuf();
    collect_pairs(buf.str(), pairs, verb);
  }
  for (const auto& [key, value] : flags)
    pairs[key] = value;
  return build(*verb, pairs);
}

std::string resolve_output_path(const std::string& path, const std::string& fallback_name)
{
  if (path == "-")
    return path;
  const std::filesystem::path p = path.empty() ? std::filesystem::path(fallback_name) : std::filesystem::path(path);
  if (p.is_absolute())
    return p.string();
  if (const char* dir = std::getenv("KACLAB_OUTPUT_DIR"); dir && *dir)
    return (std::filesystem::path(dir) / p).string();
  return p.string();
}

}  // namespace kaclab
