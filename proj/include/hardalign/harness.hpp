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

// Synthetic lattice instances and the search-condition experiment grid.
//
// The metrics are desk-scale proxies for alignment quality, not listening
// test scores: exact-path accuracy against a model-sampled truth path, mean
// absolute per-input duration error, decoded path NLL, and the spread of
// the NLL across repeated stochastic decodes.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "hardalign/decoding.hpp"
#include "hardalign/lattice.hpp"
#include "hardalign/math.hpp"
#include "hardalign/noise.hpp"

namespace hardalign {

struct GeneratorSpec {
  int num_inputs = 4;
  int max_outputs = 10;
  /// Logits are drawn Uniform(-logit_scale, logit_scale).
  double logit_scale = 4.0;
  double lambda = 1.0;
  /// Isotropic Gaussian emitter standard deviation; no emission table if unset.
  std::optional<double> emission_sigma;
  std::uint64_t seed = 0;

  void validate() const {
    require(num_inputs >= 1, "generator: I must be >= 1");
    require(max_outputs >= 1, "generator: J must be >= 1");
    require(num_inputs <= max_outputs, "generator: infeasible spec, I = " + std::to_string(num_inputs) +
                                           " exceeds J = " + std::to_string(max_outputs));
    require(std::isfinite(logit_scale) && logit_scale >= 0.0, "generator: logit_scale must be finite and >= 0");
    check_temperature(lambda);
    if (emission_sigma) {
      require(std::isfinite(*emission_sigma) && *emission_sigma > 0.0, "generator: emission_sigma must be > 0");
    }
  }
};

/// Dimension of the synthetic acoustic frames behind the emission table.
inline constexpr int kEmissionDim = 2;

/// Log-mass of finishing at (I, J) from each cell (i, j), transitions only.
/// Row-major (i-1)*J + (j-1).
inline std::vector<double> completion_log_mass(const TransitionLogits& model) {
  const int num_inputs = model.num_inputs();
  const int max_outputs = model.max_outputs();
  std::vector<double> mass(static_cast<std::size_t>(num_inputs) * max_outputs, kNegInf);
  auto at = [&](int i, int j) -> double& {
    return mass[static_cast<std::size_t>(i - 1) * max_outputs + static_cast<std::size_t>(j - 1)];
  };
  at(num_inputs, max_outputs) = 0.0;
  for (int j = max_outputs - 1; j >= 1; --j) {
    for (int i = 1; i <= num_inputs; ++i) {
      double stay = at(i, j + 1);
      if (stay != kNegInf) stay += model.emit_log_prob(i, j + 1);
      double advance = kNegInf;
      if (i < num_inputs && at(i + 1, j + 1) != kNegInf) advance = at(i + 1, j + 1) + model.shift_log_prob(i, j + 1);
      at(i, j) = log_add_exp(stay, advance);
    }
  }
  return mass;
}

/// Draws a complete path from the transition model conditioned on ending at
/// (I, J). Each step is a stochastic greedy decision whose log-odds are
/// reweighted by the completion mass of the two children, so infeasible
/// children get zero probability and the draw is exact.
template <UniformSource Source>
AlignmentPath sample_complete_path(const TransitionLogits& model, Source& noise) {
  const int num_inputs = model.num_inputs();
  const int max_outputs = model.max_outputs();
  require(num_inputs <= max_outputs, "cannot sample a complete path with I > J");
  const std::vector<double> mass = completion_log_mass(model);
  auto at = [&](int i, int j) {
    return mass[static_cast<std::size_t>(i - 1) * max_outputs + static_cast<std::size_t>(j - 1)];
  };
  AlignmentPath path;
  path.positions.reserve(static_cast<std::size_t>(max_outputs));
  path.positions.push_back(1);
  int i = 1;
  for (int j = 2; j <= max_outputs; ++j) {
    const double emit = at(i, j) == kNegInf ? kNegInf : model.emit_log_prob(i, j) + at(i, j);
    const double shift = i < num_inputs && at(i + 1, j) != kNegInf ? model.shift_log_prob(i, j) + at(i + 1, j)
                                                                   : kNegInf;
    const double logistic_noise = sample_logistic(noise);
    TransitionAction action;
    if (shift == kNegInf) {
      action = TransitionAction::kEmit;
    } else if (emit == kNegInf) {
      action = TransitionAction::kShift;
    } else {
      action = bernoulli_from_logistic(emit - shift, logistic_noise);
    }
    if (action == TransitionAction::kShift) ++i;
    path.positions.push_back(i);
  }
  return path;
}

/// Logits, a model-consistent complete truth path, and optionally Gaussian
/// emission log-densities peaked along that path. Deterministic in the seed.
inline LatticeInstance generate_instance(const GeneratorSpec& spec) {
  spec.validate();
  const int num_inputs = spec.num_inputs;
  const int max_outputs = spec.max_outputs;

  NoiseSource logit_noise(derive_seed(spec.seed, "logits"));
  std::vector<double> logits(static_cast<std::size_t>(num_inputs) * max_outputs);
  for (double& logit : logits) logit = spec.logit_scale * (2.0 * logit_noise.uniform() - 1.0);
  TransitionLogits model(num_inputs, max_outputs, std::move(logits), spec.lambda);

  NoiseSource truth_noise(derive_seed(spec.seed, "truth"));
  AlignmentPath truth = sample_complete_path(model, truth_noise);

  std::optional<EmissionScores> emission;
  if (spec.emission_sigma) {
    const double sigma = *spec.emission_sigma;
    std::mt19937_64 engine(derive_seed(spec.seed, "emission"));
    std::normal_distribution<double> standard_normal(0.0, 1.0);
    std::vector<std::vector<double>> means(static_cast<std::size_t>(num_inputs), std::vector<double>(kEmissionDim));
    for (auto& mean : means) {
      for (double& m : mean) m = standard_normal(engine);
    }
    const double log_norm = -0.5 * kEmissionDim * std::log(2.0 * std::numbers::pi * sigma * sigma);
    std::vector<double> scores(static_cast<std::size_t>(num_inputs) * max_outputs);
    for (int j = 1; j <= max_outputs; ++j) {
      std::vector<double> frame = means[static_cast<std::size_t>(truth.at_step(j) - 1)];
      for (double& y : frame) y += sigma * standard_normal(engine);
      for (int i = 1; i <= num_inputs; ++i) {
        double squared = 0.0;
        for (int d = 0; d < kEmissionDim; ++d) {
          const double diff = frame[d] - means[static_cast<std::size_t>(i - 1)][d];
          squared += diff * diff;
        }
        scores[static_cast<std::size_t>(i - 1) * max_outputs + static_cast<std::size_t>(j - 1)] =
            log_norm - squared / (2.0 * sigma * sigma);
      }
    }
    emission.emplace(num_inputs, max_outputs, std::move(scores));
  }
  return LatticeInstance(std::move(model), std::move(emission), std::move(truth));
}

enum class SearchKind { kGreedy, kBeam };
enum class Randomness { kDeterministic, kStochastic };

inline std::string_view to_string(SearchKind search) { return search == SearchKind::kGreedy ? "greedy" : "beam"; }
inline std::string_view to_string(Randomness randomness) {
  return randomness == Randomness::kDeterministic ? "deterministic" : "stochastic";
}

struct ConditionGrid {
  std::vector<Distribution> distributions{Distribution::kLogistic, Distribution::kBinConcrete};
  std::vector<double> lambdas{1.0, 0.2, 0.05};
  std::vector<SearchKind> searches{SearchKind::kGreedy, SearchKind::kBeam};
  int beam_width = 10;
  std::vector<Randomness> randomness{Randomness::kDeterministic, Randomness::kStochastic};
  int trials = 100;
  std::uint64_t seed = 0;

  void validate() const {
    require(!distributions.empty(), "grid: distributions must be nonempty");
    require(!lambdas.empty(), "grid: lambdas must be nonempty");
    require(!searches.empty(), "grid: searches must be nonempty");
    require(!randomness.empty(), "grid: randomness must be nonempty");
    require(beam_width >= 1, "grid: beam_width must be >= 1");
    require(trials >= 1, "grid: trials must be >= 1");
    for (const double lambda : lambdas) check_temperature(lambda);
  }
};

struct ResultRecord {
  Distribution distribution;
  double lambda;
  SearchKind search;
  Randomness randomness;
  double path_accuracy = 0.0;
  double duration_mae = 0.0;
  double decoded_nll = 0.0;
  double run_variance = 0.0;
  /// Exact-match rate per instance, in instance order; kept for paired comparisons.
  std::vector<double> instance_accuracy;
};

inline constexpr int kStochasticRepeats = 5;

/// Mean over inputs of |decoded segment length - truth segment length|.
inline double duration_abs_error(const AlignmentPath& decoded, const AlignmentPath& truth, int num_inputs) {
  const std::vector<int> decoded_lengths = segment_lengths(decoded, num_inputs);
  const std::vector<int> truth_lengths = segment_lengths(truth, num_inputs);
  double total = 0.0;
  for (int i = 0; i < num_inputs; ++i) total += std::abs(decoded_lengths[i] - truth_lengths[i]);
  return total / num_inputs;
}

inline std::string condition_label(Distribution distribution, double lambda, SearchKind search,
                                   Randomness randomness) {
  return std::string(to_string(distribution)) + "/" + std::to_string(lambda) + "/" + std::string(to_string(search)) +
         "/" + std::string(to_string(randomness));
}

/// Runs every condition of the grid on the same sequence of instances.
///
/// Instance k of every condition comes from derive_seed(spec.seed,
/// "instance", k) with the condition's lambda, so conditions are paired.
/// Stochastic decodes draw from derive_seed(derive_seed(grid.seed, label, k),
/// "repeat", r); deterministic conditions decode once per instance.
inline std::vector<ResultRecord> run_grid(const ConditionGrid& grid, const GeneratorSpec& spec) {
  grid.validate();
  spec.validate();
  std::vector<ResultRecord> records;
  for (const Distribution distribution : grid.distributions) {
    for (const double lambda : grid.lambdas) {
      for (const SearchKind search : grid.searches) {
        for (const Randomness randomness : grid.randomness) {
          const bool stochastic = randomness == Randomness::kStochastic;
          const std::string label = condition_label(distribution, lambda, search, randomness);
          const int repeats = stochastic ? kStochasticRepeats : 1;

          ResultRecord record;
          record.distribution = distribution;
          record.lambda = lambda;
          record.search = search;
          record.randomness = randomness;
          record.instance_accuracy.reserve(static_cast<std::size_t>(grid.trials));
          double accuracy_sum = 0.0;
          double mae_sum = 0.0;
          double nll_sum = 0.0;
          double variance_sum = 0.0;

          for (int k = 0; k < grid.trials; ++k) {
            GeneratorSpec instance_spec = spec;
            instance_spec.lambda = lambda;
            instance_spec.seed = derive_seed(spec.seed, "instance", static_cast<std::uint64_t>(k));
            const LatticeInstance instance = generate_instance(instance_spec);
            const AlignmentPath& truth = *instance.truth_path;
            const std::uint64_t trial_seed = derive_seed(grid.seed, label, static_cast<std::uint64_t>(k));

            SearchConfig config;
            config.beam_width = search == SearchKind::kGreedy ? 1 : grid.beam_width;
            config.stochastic = stochastic;
            config.distribution = distribution;

            double hits = 0.0;
            std::vector<double> nlls;
            nlls.reserve(static_cast<std::size_t>(repeats));
            for (int r = 0; r < repeats; ++r) {
              config.seed = derive_seed(trial_seed, "repeat", static_cast<std::uint64_t>(r));
              const DecodeResult result = decode(instance, config);
              if (auto violation = validate_path(result.path, instance.num_inputs(), true)) {
                throw ValidationError("internal: decoded path invalid at j = " + std::to_string(violation->step) +
                                      ": " + violation->reason);
              }
              if (result.path == truth) hits += 1.0;
              mae_sum += duration_abs_error(result.path, truth, instance.num_inputs());
              nlls.push_back(-result.score);
            }
            double mean_nll = 0.0;
            for (const double nll : nlls) mean_nll += nll;
            mean_nll /= repeats;
            double variance = 0.0;
            if (stochastic) {
              for (const double nll : nlls) variance += (nll - mean_nll) * (nll - mean_nll);
              variance /= repeats;
            }
            record.instance_accuracy.push_back(hits / repeats);
            accuracy_sum += hits;
            nll_sum += mean_nll * repeats;
            variance_sum += variance;
          }
          const double decodes = static_cast<double>(grid.trials) * repeats;
          record.path_accuracy = accuracy_sum / decodes;
          record.duration_mae = mae_sum / decodes;
          record.decoded_nll = nll_sum / decodes;
          record.run_variance = variance_sum / grid.trials;
          records.push_back(std::move(record));
        }
      }
    }
  }
  return records;
}

inline constexpr std::string_view kCsvHeader =
    "distribution,lambda,search,randomness,path_accuracy,duration_mae,decoded_nll,run_variance";

/// Fixed column order, reals as 6-decimal fixed point.
inline void write_csv(std::ostream& out, const std::vector<ResultRecord>& records) {
  out << kCsvHeader << '\n';
  char buffer[64];
  auto fixed6 = [&buffer](double value) {
    std::snprintf(buffer, sizeof(buffer), "%.6f", value);
    return std::string(buffer);
  };
  for (const ResultRecord& r : records) {
    out << to_string(r.distribution) << ',' << fixed6(r.lambda) << ',' << to_string(r.search) << ','
        << to_string(r.randomness) << ',' << fixed6(r.path_accuracy) << ',' << fixed6(r.duration_mae) << ','
        << fixed6(r.decoded_nll) << ',' << fixed6(r.run_variance) << '\n';
  }
}

}  // namespace hardalign
