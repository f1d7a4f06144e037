#include "kaclab/commands.hpp"

#include <ostream>

#include "kaclab/boltzmann.hpp"
#include "kaclab/chaos.hpp"
#include "kaclab/entropy.hpp"
#include "kaclab/generator.hpp"
#include "kaclab/simulator.hpp"

namespace kaclab {

namespace {

const char* kUsage =
    "usage: kaclab <simulate|spectrum|boltzmann|entropy|chaos> [--key value]... [--config file]\n"
    "  common keys: n lambda mu beta seed replicas horizon intervals output\n"
    "  initial law: initial (gaussian|two-temperature) temperature mean hot-fraction\n"
    "               hot-temperature cold-temperature; simulate also takes k0\n"
    "  simulate: histogram histogram-bins   boltzmann: order   entropy: bootstrap\n"
    "  KACLAB_OUTPUT_DIR sets the directory for relative output paths.\n";

std::int64_t as_int(int n) { return static_cast<std::int64_t>(n); }

}  // namespace

CsvTable simulate_table(const ObservableSeries& series)
{
  CsvTable t;
  t.columns = {"time", "K", "T", "m1", "m2", "m3", "m4", "m5", "m6"};
  for (std::size_t i = 0; i < series.times.size(); ++i) {
    std::vector<CsvCell> row{series.times[i], series.kinetic_energy[i], series.temperature[i]};
    for (double m : series.moments[i])
      row.emplace_back(m);
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable histogram_table(const Histogram& h)
{
  CsvTable t;
  t.columns = {"bin_left", "bin_right", "mass"};
  for (int i = 0; i < h.bins(); ++i)
    t.add_row({h.bin_left(i), h.bin_right(i), h.mass(i)});
  return t;
}

CsvTable spectrum_table(const RunConfig& c)
{
  CsvTable t;
  t.columns = {"N", "lambda", "mu", "route", "value"};
  const double lambda = c.params.lambda;
  const double mu = c.params.mu;
  for (int n : c.sizes) {
    Params p = c.params;
    p.n_particles = n;
    auto add = [&](const char* route, double value) {
      t.add_row({as_int(n), lambda, mu, std::string(route), value});
    };
    if (n < 2) {
      add("first_gap", 0.5 * mu);
      continue;
    }
    add("first_gap", first_gap(p).value);
    add("kac_gap", kac_gap(n));
    const auto second = second_gap(p);
    add("second_gap_quadratic", second.quadratic);
    add("second_gap_matrix", second.matrix);
    add("second_gap_sector", second.sector);
    add("second_gap_limit", second_gap_limit(lambda, mu));
    add("nonsymmetric_l2", gap_branches(p).nonsymmetric_l2);
  }
  return t;
}

CsvTable boltzmann_table(const RunConfig& c)
{
  const auto m0 = MomentVector::from_initial(c.initial.build(), c.order);
  const auto result = integrate_moments(m0, c.params, c.horizon, c.horizon / c.intervals);
  CsvTable t;
  t.columns = {"time"};
  for (int k = 1; k <= c.order; ++k)
    t.columns.push_back("m" + std::to_string(k));
  for (const auto& s : result.samples) {
    std::vector<CsvCell> row{s.time};
    for (int k = 1; k <= c.order; ++k)
      row.emplace_back(s[k]);
    t.add_row(std::move(row));
  }
  return t;
}

CsvTable entropy_table(const RunConfig& c)
{
  EntropyExperimentOptions opts;
  opts.intervals = c.intervals;
  opts.seed = c.seed;
  opts.estimator.bootstrap = c.bootstrap;
  const auto decay = entropy_decay_experiment(c.params, c.initial.build(), c.horizon, c.replicas, opts);
  CsvTable t;
  t.columns = {"t", "S_estimate", "S_error", "bound"};
  for (const auto& p : decay.points)
    t.add_row({p.t, p.estimate, p.error, p.bound});
  return t;
}

CsvTable chaos_table(const RunConfig& c)
{
  const auto points = chaos_ladder(c.params, c.initial.build(), c.sizes, c.horizon, c.replicas, c.seed);
  CsvTable t;
  t.columns = {"N", "t", "metric", "stderr"};
  for (const auto& p : points)
    t.add_row({as_int(p.n_particles), p.t, p.metric, p.standard_error});
  return t;
}

std::vector<std::string> output_comments(const RunConfig& config)
{
  std::vector<std::string> out{"kaclab " + to_string(config.verb)};
  const auto lines = config_lines(config);
  out.insert(out.end(), lines.begin(), lines.end());
  return out;
}

void execute(const RunConfig& c)
{
  const auto comments = output_comments(c);
  const std::string path = resolve_output_path(c.output, to_string(c.verb) + ".csv");
  switch (c.verb) {
    case Verb::Simulate: {
      RunOptions opts;
      opts.histogram_bins = c.histogram_bins;
      const auto series =
          run(c.params, c.initial.build(), c.replicas, uniform_grid(c.horizon, c.intervals), c.seed, opts);
      emit_csv(simulate_table(series), path, comments);
      if (!c.histogram_output.empty())
        emit_csv(histogram_table(series.histograms.back()), resolve_output_path(c.histogram_output, ""), comments);
      break;
    }
    case Verb::Spectrum:
      emit_csv(spectrum_table(c), path, comments);
      break;
    case Verb::Boltzmann:
      emit_csv(boltzmann_table(c), path, comments);
      break;
    case Verb::Entropy:
      emit_csv(entropy_table(c), path, comments);
      break;
    case Verb::Chaos:
      emit_csv(chaos_table(c), path, comments);
      break;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  if (!args.empty() && (args[0] == "--help" || args[0] == "-h" || args[0] == "help")) {
    out << kUsage;
    return exit_code::ok;
  }
  try {
    execute(parse_config(args));
    return exit_code::ok;
  } catch (const UsageError& e) {
    err << "kaclab: " << e.what() << '\n' << kUsage;
    return exit_code::usage;
  } catch (const UnknownKeyError& e) {
    err << "kaclab: " << e.what() << '\n';
    return exit_code::unknown_key;
  } catch (const MalformedValueError& e) {
    err << "kaclab: " << e.what() << '\n';
    return exit_code::malformed_value;
  } catch (const IoError& e) {
    err << "kaclab: " << e.what() << '\n';
    return exit_code::io;
  } catch (const AssemblyError& e) {
    err << "kaclab: numerical check failed: " << e.what() << '\n';
    return exit_code::numerical;
  } catch (const IntegrationFailure& e) {
    err << "kaclab: numerical check failed: " << e.what() << '\n';
    return exit_code::numerical;
  } catch (const NormalizationError& e) {
    err << "kaclab: numerical check failed: " << e.what() << '\n';
    return exit_code::numerical;
  } catch (const EstimatorUnreliable& e) {
    err << "kaclab: numerical check failed: " << e.what() << '\n';
    return exit_code::numerical;
  } catch (const Error& e) {
    // Domain errors from the engines: the configuration asks for something
    // the model does not define (e.g. no events at all).
    err << "kaclab: " << e.what() << '\n';
    return exit_code::usage;
  }
}

}  // namespace kaclab
