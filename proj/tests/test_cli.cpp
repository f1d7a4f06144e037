#include <doctest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "kaclab/commands.hpp"
#include "kaclab/config.hpp"
#include "kaclab/csv.hpp"
#include "kaclab/simulator.hpp"

using namespace kaclab;
namespace fs = std::filesystem;

namespace {

struct TempDir
{
  fs::path path;
  TempDir()
  {
    static int counter = 0;
    path = fs::temp_directory_path() / ("kaclab_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

std::string slurp(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

int cli(std::vector<std::string> args)
{
  std::ostringstream out, err;
  return run_cli(args, out, err);
}

/// Data rows of a CSV file: comment lines and the header are skipped.
std::vector<std::vector<std::string>> data_rows(const std::string& text, std::string* header = nullptr)
{
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#')
      continue;
    if (!seen_header) {
      seen_header = true;
      if (header)
        *header = line;
      continue;
    }
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ','))
      cells.push_back(cell);
    rows.push_back(cells);
  }
  return rows;
}

}  // namespace

TEST_CASE("number formatting round-trips")
{
  for (double x : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23, 0.0, 50.0}) {
    CHECK(std::strtod(format_double(x).c_str(), nullptr) == x);
  }
  CHECK(format_double(0.75) == "0.75");
}

TEST_CASE("csv rendering")
{
  CsvTable t;
  t.columns = {"a", "b"};
  CHECK(render_csv(t) == "a,b\n");
  CHECK(render_csv(t, {"note"}) == "# note\na,b\n");
  t.add_row({std::int64_t{3}, std::string("x,y")});
  t.add_row({0.5, std::string("say \"hi\"")});
  CHECK(render_csv(t) == "a,b\n3,\"x,y\"\n0.5,\"say \"\"hi\"\"\"\n");
  CHECK_THROWS_AS(t.add_row({1.0}), DomainError);
  CHECK_THROWS_AS(emit_csv(t, "/nonexistent-dir/x.csv"), IoError);
}

TEST_CASE("parse_config: flags, defaults and errors")
{
  const auto c = parse_config({"simulate", "--n", "100", "--mu", "1", "--beta", "1", "--k0", "100"});
  CHECK(c.verb == Verb::Simulate);
  CHECK(c.params.n_particles == 100);
  CHECK(c.params.mu == 1.0);
  CHECK(c.params.lambda == 0.0);
  CHECK(c.initial.temperature == 2.0);
  CHECK(c.horizon == 10.0);

  const auto eq = parse_config({"entropy", "--n=5", "--mu=2", "--lambda=0.5"});
  CHECK(eq.horizon == 3.0);
  CHECK(eq.initial.temperature == 1.0);
  CHECK(parse_config({"chaos", "--mu", "2"}).sizes == std::vector<int>{10, 50, 250, 1250});
  CHECK(parse_config({"chaos", "--mu", "2"}).horizon == 0.5);
  CHECK(parse_config({"spectrum", "--n", "2,3,8", "--mu", "1"}).sizes == std::vector<int>{2, 3, 8});

  CHECK_THROWS_AS(parse_config({}), UsageError);
  CHECK_THROWS_AS(parse_config({"fly", "--mu", "1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"entropy", "--n", "5"}), UsageError);
  CHECK_THROWS_AS(parse_config({"simulate", "--mu"}), UsageError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "0"}), UsageError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "1", "--k0", "2", "--temperature", "1"}), UsageError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "1", "--colour", "red"}), UnknownKeyError);
  CHECK_THROWS_AS(parse_config({"spectrum", "--n", "4", "--mu", "1", "--seed", "3"}), UnknownKeyError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "abc"}), MalformedValueError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "-1"}), MalformedValueError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4,5", "--mu", "1"}), MalformedValueError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "1", "--replicas", "1.5"}), MalformedValueError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "inf"}), MalformedValueError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "1", "--initial", "lumpy"}), MalformedValueError);
  CHECK_THROWS_AS(parse_config({"simulate", "--n", "4", "--mu", "1", "--config", "/nonexistent.cfg"}), IoError);
}

TEST_CASE("config file values are overridden by flags")
{
  TempDir dir;
  const auto path = dir.file("run.cfg");
  std::ofstream(path) << "# cooling run\nverb = simulate\nn = 12\nmu = 0.5\n\nlambda = 3\nseed = 99\n";
  const auto c = parse_config({"simulate", "--config", path, "--lambda", "4"});
  CHECK(c.params.n_particles == 12);
  CHECK(c.params.mu == 0.5);
  CHECK(c.params.lambda == 4.0);
  CHECK(c.seed == 99);
  CHECK_THROWS_AS(parse_config({"entropy", "--config", path}), UsageError);
  std::ofstream(dir.file("bad.cfg")) << "n 12\n";
  CHECK_THROWS_AS(parse_config({"simulate", "--config", dir.file("bad.cfg")}), MalformedValueError);
}

TEST_CASE("effective config round-trips through the output comments")
{
  const std::vector<std::vector<std::string>> cases{
      {"simulate", "--n", "100", "--mu", "1", "--k0", "100", "--lambda", "0.3", "--histogram", "h.csv"},
      {"simulate", "--n", "7", "--mu", "0.1", "--initial", "two-temperature", "--hot-fraction", "0.1", "--seed",
       "18446744073709551615"},
      {"spectrum", "--n", "2,3,5,8", "--lambda", "0.2", "--mu", "2", "--beta", "3"},
      {"boltzmann", "--lambda", "1", "--mu", "0.7", "--order", "8", "--initial", "gaussian", "--mean", "0.4"},
      {"entropy", "--n", "5", "--mu", "1", "--bootstrap", "16", "--output", "e.csv"},
      {"chaos", "--mu", "1", "--lambda", "5", "--n", "10,50"},
  };
  for (const auto& args : cases) {
    const auto c = parse_config(args);
    std::string text;
    for (const auto& line : output_comments(c))
      text += "# " + line + "\n";
    text += "header,row\n1,2\n";
    CAPTURE(text);
    CHECK(parse_config_text(text) == c);
    // A plain config file built from the same lines parses identically.
    std::string plain;
    for (const auto& line : config_lines(c))
      plain += line + "\n";
    CHECK(parse_config_text(plain) == c);
  }
}

TEST_CASE("spectrum table holds the closed-form gaps")
{
  const auto c = parse_config({"spectrum", "--n", "3", "--lambda", "1", "--mu", "1"});
  const auto t = spectrum_table(c);
  CHECK(t.columns == std::vector<std::string>{"N", "lambda", "mu", "route", "value"});
  int second = 0;
  for (const auto& row : t.rows) {
    const auto& route = std::get<std::string>(row[3]);
    const double v = std::get<double>(row[4]);
    if (route.rfind("second_gap_", 0) == 0 && route != "second_gap_limit") {
      CHECK(v == doctest::Approx(0.75).epsilon(1e-10));
      ++second;
    }
    if (route == "first_gap")
      CHECK(v == doctest::Approx(0.5).epsilon(1e-12));
    if (route == "kac_gap")
      CHECK(v == doctest::Approx(1.25).epsilon(1e-12));
  }
  CHECK(second == 3);
}

TEST_CASE("simulate writes the cooling curve and histogram")
{
  TempDir dir;
  const auto out = dir.file("cool.csv");
  const auto hist = dir.file("hist.csv");
  REQUIRE(cli({"simulate", "--n", "100", "--mu", "1", "--beta", "1", "--k0", "100", "--replicas", "200", "--horizon",
               "16", "--intervals", "8", "--output", out, "--histogram", hist}) == 0);
  std::string header;
  const auto rows = data_rows(slurp(out), &header);
  CHECK(header == "time,K,T,m1,m2,m3,m4,m5,m6");
  REQUIRE(rows.size() == 9);
  CHECK(std::stod(rows[0][1]) == doctest::Approx(100.0).epsilon(0.03));
  // Asymptote N / (2 beta) = 50; the excess at t = 16 is 50 e^-8.
  CHECK(std::stod(rows.back()[1]) == doctest::Approx(50.0).epsilon(0.02));
  CHECK(std::stod(rows.back()[2]) == doctest::Approx(1.0).epsilon(0.02));

  std::string hheader;
  const auto hrows = data_rows(slurp(hist), &hheader);
  CHECK(hheader == "bin_left,bin_right,mass");
  CHECK(hrows.size() == 256);
  double mass = 0.0;
  for (const auto& r : hrows)
    mass += std::stod(r[2]);
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("other verbs write their schemas")
{
  TempDir dir;
  std::string header;
  REQUIRE(cli({"boltzmann", "--lambda", "1", "--mu", "1", "--order", "4", "--intervals", "5", "--output",
               dir.file("b.csv")}) == 0);
  auto rows = data_rows(slurp(dir.file("b.csv")), &header);
  CHECK(header == "time,m1,m2,m3,m4");
  CHECK(rows.size() == 6);

  REQUIRE(cli({"entropy", "--n", "4", "--mu", "1", "--replicas", "300", "--intervals", "3", "--initial",
               "two-temperature", "--bootstrap", "8", "--output", dir.file("e.csv")}) == 0);
  rows = data_rows(slurp(dir.file("e.csv")), &header);
  CHECK(header == "t,S_estimate,S_error,bound");
  CHECK(rows.size() == 4);

  REQUIRE(cli({"chaos", "--mu", "1", "--n", "4,8", "--replicas", "64", "--output", dir.file("c.csv")}) == 0);
  rows = data_rows(slurp(dir.file("c.csv")), &header);
  CHECK(header == "N,t,metric,stderr");
  REQUIRE(rows.size() == 2);
  CHECK(rows[0][0] == "4");
  CHECK(rows[1][0] == "8");
}

TEST_CASE("exit codes")
{
  TempDir dir;
  CHECK(cli({"--help"}) == exit_code::ok);
  CHECK(cli({}) == exit_code::usage);
  CHECK(cli({"entropy", "--n", "5", "--lambda", "1"}) == exit_code::usage);
  CHECK(cli({"simulate", "--n", "5", "--mu", "1", "--bogus", "1"}) == exit_code::unknown_key);
  CHECK(cli({"simulate", "--n", "5", "--mu", "one"}) == exit_code::malformed_value);
  CHECK(cli({"spectrum", "--n", "3", "--mu", "1", "--output", "/nonexistent-dir/s.csv"}) == exit_code::io);
  CHECK(cli({"simulate", "--n", "5", "--mu", "1", "--config", dir.file("missing.cfg")}) == exit_code::io);
  // Too few samples for the entropy estimator.
  CHECK(cli({"entropy", "--n", "2", "--mu", "1", "--replicas", "10", "--output", dir.file("e.csv")}) ==
        exit_code::numerical);
  // Both rates zero: the jump process has no events.
  CHECK(cli({"simulate", "--n", "2", "--mu", "0", "--horizon", "1", "--output", dir.file("s.csv")}) ==
        exit_code::usage);
}

TEST_CASE("same seed and config give byte-identical files")
{
  TempDir dir;
  const std::vector<std::string> base{"simulate", "--n", "20", "--mu", "1", "--lambda", "2", "--replicas", "50",
                                      "--initial", "two-temperature", "--seed", "7"};
  auto a = base, b = base;
  a.insert(a.end(), {"--output", dir.file("a.csv")});
  b.insert(b.end(), {"--output", dir.file("b.csv")});
  REQUIRE(cli(a) == 0);
  REQUIRE(cli(b) == 0);
  const auto ta = slurp(dir.file("a.csv"));
  const auto tb = slurp(dir.file("b.csv"));
  // Only the echoed output path differs.
  CHECK(ta.substr(ta.find("\ntime,")) == tb.substr(tb.find("\ntime,")));
  REQUIRE(cli(a) == 0);
  CHECK(slurp(dir.file("a.csv")) == ta);

  // The echoed config reproduces the run.
  const auto again = parse_config({"simulate", "--config", dir.file("a.csv")});
  CHECK(again == parse_config(a));
}

TEST_CASE("output directory from the environment")
{
  TempDir dir;
  ::setenv("KACLAB_OUTPUT_DIR", dir.path.c_str(), 1);
  CHECK(resolve_output_path("x.csv", "") == dir.file("x.csv"));
  CHECK(resolve_output_path("", "spectrum.csv") == dir.file("spectrum.csv"));
  CHECK(resolve_output_path("/abs/y.csv", "") == "/abs/y.csv");
  CHECK(resolve_output_path("-", "") == "-");
  REQUIRE(cli({"spectrum", "--n", "2", "--mu", "1"}) == 0);
  CHECK(fs::exists(dir.file("spectrum.csv")));
  ::unsetenv("KACLAB_OUTPUT_DIR");
  CHECK(resolve_output_path("x.csv", "") == "x.csv");
}
