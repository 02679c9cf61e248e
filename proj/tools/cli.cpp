// Copyright 2026 The hardalign Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hardalign/hardalign.hpp"
#include "hardalign/json_io.hpp"

namespace hardalign::cli {
namespace {

class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

std::string read_input(const std::string& path, std::istream& in) {
  if (path.empty() || path == "-") {
    return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open input file '" + path + "'");
  return std::string(std::istreambuf_iterator<char>(file), std::istreambuf_iterator<char>());
}

void write_output(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << text;
    if (!out) throw IoError("failed writing to standard output");
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open output file '" + path + "'");
  file << text;
  if (!file) throw IoError("failed writing output file '" + path + "'");
}

Json parse_json(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    throw ValidationError("malformed " + what + " JSON: " + e.what());
  }
}

// -inf (an infeasible lattice) has no JSON number; emit null instead.
Json log_value(double value) { return std::isfinite(value) ? Json(value) : Json(nullptr); }

struct SelfTestReport {
  int passed = 0;
  int failed = 0;
  void check(std::ostream& out, bool ok, const std::string& name) {
    out << (ok ? "PASS " : "FAIL ") << name << '\n';
    ok ? ++passed : ++failed;
  }
};

LatticeInstance random_instance(NoiseSource& rng, int num_inputs, int max_outputs, double lambda, bool with_emission) {
  std::vector<double> logits(static_cast<std::size_t>(num_inputs) * max_outputs);
  for (double& v : logits) v = -3.0 + 6.0 * rng.uniform();
  std::optional<EmissionScores> emission;
  if (with_emission) {
    std::vector<double> scores(logits.size());
    for (double& v : scores) v = -4.0 * rng.uniform();
    emission.emplace(num_inputs, max_outputs, std::move(scores));
  }
  return LatticeInstance(TransitionLogits(num_inputs, max_outputs, std::move(logits), lambda), std::move(emission));
}

int run_selftest(std::uint64_t seed, std::ostream& out) {
  SelfTestReport report;
  NoiseSource rng(seed);
  const double lambdas[] = {1.0, 0.2, 0.05};

  {
    const LatticeInstance fixture(TransitionLogits::constant(2, 3, 0.0, 1.0));
    report.check(out, std::abs(forward_marginal(fixture) - std::log(0.5)) <= 1e-12, "fixture marginal is log 0.5");
  }
  {
    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      const int num_inputs = 1 + static_cast<int>(rng.uniform() * 4);
      const int max_outputs = num_inputs + static_cast<int>(rng.uniform() * (9 - num_inputs));
      const LatticeInstance instance =
          random_instance(rng, num_inputs, max_outputs, lambdas[trial % 3], trial % 2 == 1);
      worst = std::max(worst, std::abs(forward_marginal(instance) - brute_force_marginal(instance)));
    }
    report.check(out, worst <= 1e-10, "forward marginal matches enumeration");
  }
  {
    bool all_match = true;
    for (int trial = 0; trial < 50; ++trial) {
      const int num_inputs = 1 + static_cast<int>(rng.uniform() * 4);
      const int max_outputs = num_inputs + static_cast<int>(rng.uniform() * (9 - num_inputs));
      const LatticeInstance instance = random_instance(rng, num_inputs, max_outputs, 1.0, false);
      double best = kNegInf;
      for (const AlignmentPath& path : enumerate_paths(num_inputs, max_outputs)) {
        best = std::max(best, path_log_prob(path, instance));
      }
      SearchConfig config;
      config.beam_width = static_cast<int>(complete_path_count(num_inputs, max_outputs));
      all_match = all_match && std::abs(decode(instance, config).score - best) <= 1e-9;
    }
    report.check(out, all_match, "wide deterministic beam finds the exact best path");
  }
  {
    bool bounded = true;
    for (int trial = 0; trial < 50; ++trial) {
      const LatticeInstance instance = random_instance(rng, 4, 10, lambdas[trial % 3], trial % 2 == 0);
      const double marginal = forward_marginal(instance);
      for (const int width : {1, 2, 4, 10}) {
        SearchConfig config;
        config.beam_width = width;
        const DecodeResult result = decode(instance, config);
        bounded = bounded && !validate_path(result.path, 4, true) &&
                  std::abs(result.score - path_log_prob(result.path, instance)) <= 1e-9 &&
                  result.score <= marginal + 1e-9;
      }
    }
    report.check(out, bounded, "beam paths are complete and scored below the marginal");
  }
  out << report.passed << " passed, " << report.failed << " failed\n";
  return report.failed == 0 ? kExitOk : kExitValidation;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Hard monotonic alignment: likelihood, search and experiment grid", "hardalign"};
  app.require_subcommand(1);

  std::string input = "-";
  std::string output;
  std::optional<std::uint64_t> seed;

  auto* gen = app.add_subcommand("gen", "GeneratorSpec JSON in, LatticeInstance JSON out");
  gen->add_option("input", input, "GeneratorSpec JSON file ('-' for stdin)");
  gen->add_option("--seed", seed, "Override the generator seed");
  gen->add_option("--out", output, "Output path (default stdout)");

  auto* likelihood = app.add_subcommand("likelihood", "Forward and brute-force log-marginals of an instance");
  likelihood->add_option("input", input, "LatticeInstance JSON file ('-' for stdin)");
  likelihood->add_option("--out", output, "Output path (default stdout)");

  int beam_width = 1;
  bool greedy = false;
  std::optional<double> lambda;
  std::string distribution = "logistic";
  bool deterministic_flag = false;
  bool stochastic_flag = false;
  std::string mode = "fixed";
  int max_outputs = 0;
  auto* decode_cmd = app.add_subcommand("decode", "Search an alignment path for an instance");
  decode_cmd->add_option("input", input, "LatticeInstance JSON file ('-' for stdin)");
  decode_cmd->add_option("--seed", seed, "Noise seed for stochastic search");
  auto* width_opt = decode_cmd->add_option("--beam-width", beam_width, "Beam width (1 = greedy)")
                        ->check(CLI::PositiveNumber);
  decode_cmd->add_flag("--greedy", greedy, "Greedy search (beam width 1)")->excludes(width_opt);
  decode_cmd->add_option("--lambda", lambda, "Override the instance temperature")->check(CLI::PositiveNumber);
  decode_cmd->add_option("--distribution", distribution, "Noise placement")
      ->check(CLI::IsMember({"logistic", "binconcrete"}, CLI::ignore_case));
  auto* det_opt = decode_cmd->add_flag("--deterministic", deterministic_flag, "No noise (default)");
  decode_cmd->add_flag("--stochastic", stochastic_flag, "Logistic noise on every decision")->excludes(det_opt);
  decode_cmd->add_option("--mode", mode, "fixed: exactly J steps; open: stop on Shift past I")
      ->check(CLI::IsMember({"fixed", "open"}));
  decode_cmd->add_option("--max-outputs", max_outputs, "Step cap for open mode (default J)")
      ->check(CLI::PositiveNumber);
  decode_cmd->add_option("--out", output, "Output path (default stdout)");

  std::string generator_path;
  auto* experiment = app.add_subcommand("experiment", "ConditionGrid JSON in, results CSV out");
  experiment->add_option("input", input, "ConditionGrid JSON file ('-' for stdin)");
  experiment->add_option("--generator", generator_path, "GeneratorSpec JSON file for the instances");
  experiment->add_option("--seed", seed, "Override the grid seed");
  experiment->add_option("--out", output, "Output CSV path (default stdout)");

  auto* selftest = app.add_subcommand("selftest", "Run oracle cross-checks");
  selftest->add_option("--seed", seed, "Seed for the random instances");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }

  try {
    if (gen->parsed()) {
      GeneratorSpec spec = generator_spec_from_json(parse_json(read_input(input, in), "GeneratorSpec"));
      if (seed) spec.seed = *seed;
      write_output(output, to_json(generate_instance(spec)).dump(2) + "\n", out);
    } else if (likelihood->parsed()) {
      const LatticeInstance instance = instance_from_json(parse_json(read_input(input, in), "LatticeInstance"));
      Json result;
      result["feasible"] = instance.num_inputs() <= instance.max_outputs();
      result["forward"] = log_value(forward_marginal(instance));
      try {
        result["brute_force"] = log_value(brute_force_marginal(instance));
      } catch (const EnumerationLimitError& e) {
        result["brute_force"] = nullptr;
        result["brute_force_error"] = e.what();
      }
      write_output(output, result.dump(2) + "\n", out);
    } else if (decode_cmd->parsed()) {
      const LatticeInstance instance = instance_from_json(parse_json(read_input(input, in), "LatticeInstance"));
      SearchConfig config;
      config.beam_width = greedy ? 1 : beam_width;
      config.stochastic = stochastic_flag;
      config.distribution = *parse_distribution(distribution);
      config.lambda = lambda;
      config.mode = mode == "open" ? DecodeMode::kOpenEnded : DecodeMode::kFixedLength;
      config.max_outputs = max_outputs;
      config.seed = seed.value_or(0);
      const DecodeResult decoded = decode(instance, config);
      Json result;
      result["path"] = decoded.path.positions;
      result["score"] = decoded.score;
      if (config.mode == DecodeMode::kOpenEnded) result["ended_by_shift"] = decoded.ended_by_shift;
      write_output(output, result.dump(2) + "\n", out);
    } else if (experiment->parsed()) {
      const Json grid_json = parse_json(read_input(input, in), "ConditionGrid");
      ConditionGrid grid = grid_from_json(grid_json);
      if (seed) grid.seed = *seed;
      GeneratorSpec spec;
      spec.seed = grid.seed;
      if (!generator_path.empty()) {
        spec = generator_spec_from_json(parse_json(read_input(generator_path, in), "GeneratorSpec"));
      } else if (grid_json.contains("generator")) {
        spec = generator_spec_from_json(grid_json.at("generator"));
      }
      std::ostringstream csv;
      write_csv(csv, run_grid(grid, spec));
      write_output(output, csv.str(), out);
    } else if (selftest->parsed()) {
      return run_selftest(seed.value_or(20260101), out);
    }
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const EnumerationLimitError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const Json::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return kExitOk;
}

}  // namespace hardalign::cli
