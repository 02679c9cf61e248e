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

// Alignment search: {deterministic, stochastic} x {greedy, beam} for both
// the Logistic and the binary Concrete noise placement.
//
// Greedy search is beam search with width one. Each expansion of a live
// hypothesis scores both children with the true branch log-probabilities
// (plus emission) and, separately, with a ranking key in which the branch
// decision has been perturbed by one Logistic draw:
//
//   deterministic:  key_emit = log a1,            key_shift = log a2
//   Logistic:       key_emit = log a1 + L,        key_shift = log a2
//   BinConcrete:    key_emit = log s,             key_shift = log (1 - s)
//                   with s = sigmoid((log alpha + L) / lambda)
//
// so that at width one the argmax of the two keys is exactly the stochastic
// greedy decision. Keys accumulate along the hypothesis; reported scores
// never include noise.

#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hardalign/distributions.hpp"
#include "hardalign/lattice.hpp"
#include "hardalign/math.hpp"
#include "hardalign/noise.hpp"

namespace hardalign {

enum class Distribution { kLogistic, kBinConcrete };
enum class DecodeMode { kFixedLength, kOpenEnded };

inline std::string_view to_string(Distribution distribution) {
  return distribution == Distribution::kLogistic ? "logistic" : "binconcrete";
}

struct SearchConfig {
  int beam_width = 1;
  bool stochastic = false;
  Distribution distribution = Distribution::kLogistic;
  /// Overrides the instance temperature when set.
  std::optional<double> lambda;
  DecodeMode mode = DecodeMode::kFixedLength;
  /// OpenEnded step cap; 0 means the instance J.
  int max_outputs = 0;
  std::uint64_t seed = 0;

  void validate() const {
    require(beam_width >= 1, "beam_width must be >= 1");
    if (lambda) check_temperature(*lambda);
    require(max_outputs >= 0, "max_outputs must be >= 1 (or 0 for the instance J)");
  }
};

struct BeamHypothesis {
  AlignmentPath path_prefix;
  int position = 1;
  int step = 1;
  double score = 0.0;
  /// Noise-perturbed score used for ranking only.
  double rank_key = 0.0;
};

struct DecodeResult {
  AlignmentPath path;
  double score = 0.0;
  /// OpenEnded only: the search stopped on a Shift past the last input,
  /// whose log-probability is included in score.
  bool ended_by_shift = false;
};

struct BranchKeys {
  double emit;
  double shift;
};

/// Ranking keys for the two children of one expansion, given the Logistic
/// draw for that expansion (ignored when deterministic).
inline BranchKeys perturbed_branch_log_probs(double log_alpha, double lambda, bool stochastic,
                                             Distribution distribution, double logistic_noise) {
  if (!stochastic) return {emit_log_prob(log_alpha, lambda), shift_log_prob(log_alpha, lambda)};
  if (distribution == Distribution::kLogistic) {
    return {emit_log_prob(log_alpha, lambda) + logistic_noise, shift_log_prob(log_alpha, lambda)};
  }
  const double u = binconcrete_logit_from_logistic(BinConcreteParams(log_alpha, lambda), logistic_noise);
  return {log_sigmoid(u), log_sigmoid(-u)};
}

/// One greedy decision. Deterministic search reduces to the sign of
/// log_alpha for either distribution; stochastic Logistic thresholds the
/// noised log-odds log(a1 / a2) = log_alpha / lambda; stochastic BinConcrete
/// discretizes a relaxed sample. No noise is drawn when deterministic.
template <UniformSource Source>
TransitionAction greedy_step(double log_alpha, double lambda, bool stochastic, Distribution distribution,
                             Source& noise) {
  check_temperature(lambda);
  if (!stochastic) return log_alpha >= 0.0 ? TransitionAction::kEmit : TransitionAction::kShift;
  const double logistic_noise = sample_logistic(noise);
  if (distribution == Distribution::kLogistic) return bernoulli_from_logistic(log_alpha / lambda, logistic_noise);
  return discretize(binconcrete_from_logistic(BinConcreteParams(log_alpha, lambda), logistic_noise));
}

namespace detail {

struct Candidate {
  BeamHypothesis hypothesis;
  TransitionAction action;
  bool finished;
  bool ended_by_shift = false;
};

// Key descending, then Emit before Shift, then lower position.
inline bool ranks_before(const Candidate& a, const Candidate& b) {
  if (a.hypothesis.rank_key != b.hypothesis.rank_key) return a.hypothesis.rank_key > b.hypothesis.rank_key;
  if (a.action != b.action) return a.action == TransitionAction::kEmit;
  return a.hypothesis.position < b.hypothesis.position;
}

}  // namespace detail

/// Beam search over the alignment lattice.
///
/// FixedLength decodes exactly J steps and returns a complete path. Children
/// that can no longer reach input I in the remaining steps are never
/// created, and Shift is never created at i = I, so the beam cannot empty.
/// OpenEnded decodes up to max_outputs steps and stops a hypothesis when it
/// Shifts past I, charging that final Shift.
inline DecodeResult decode(const LatticeInstance& instance, const SearchConfig& config) {
  config.validate();
  const TransitionLogits model = config.lambda ? instance.model.with_lambda(*config.lambda) : instance.model;
  const double lambda = model.lambda();
  const int num_inputs = model.num_inputs();
  const int max_outputs = model.max_outputs();
  const bool fixed = config.mode == DecodeMode::kFixedLength;
  if (fixed) {
    require(num_inputs <= max_outputs, "infeasible: I = " + std::to_string(num_inputs) + " exceeds J = " +
                                           std::to_string(max_outputs) + " in fixed-length mode");
  }
  const int step_cap = fixed || config.max_outputs == 0 ? max_outputs : config.max_outputs;
  require(step_cap <= max_outputs, "max_outputs " + std::to_string(step_cap) + " exceeds logit table J = " +
                                       std::to_string(max_outputs));

  NoiseSource noise(config.seed);
  const std::size_t width = static_cast<std::size_t>(config.beam_width);

  BeamHypothesis start;
  start.path_prefix.positions.reserve(static_cast<std::size_t>(step_cap));
  start.path_prefix.positions.push_back(1);
  start.score = instance.emission_score(1, 1);
  start.rank_key = start.score;

  std::vector<BeamHypothesis> live{std::move(start)};
  std::vector<detail::Candidate> finished;
  std::vector<detail::Candidate> candidates;

  while (!live.empty()) {
    if (live.front().step == step_cap) {
      for (BeamHypothesis& h : live) finished.push_back({std::move(h), TransitionAction::kEmit, true, false});
      break;
    }
    candidates.clear();
    for (const BeamHypothesis& h : live) {
      const int i = h.position;
      const int next_step = h.step + 1;
      const double log_alpha = model.logit(i, next_step);
      const double logistic_noise = config.stochastic ? sample_logistic(noise) : 0.0;
      const BranchKeys keys =
          perturbed_branch_log_probs(log_alpha, lambda, config.stochastic, config.distribution, logistic_noise);

      const bool emit_feasible = !fixed || num_inputs - i <= max_outputs - next_step;
      if (emit_feasible) {
        BeamHypothesis child = h;
        const double emission = instance.emission_score(i, next_step);
        child.path_prefix.positions.push_back(i);
        child.step = next_step;
        child.score += model.emit_log_prob(i, next_step) + emission;
        child.rank_key += keys.emit + emission;
        candidates.push_back({std::move(child), TransitionAction::kEmit, false});
      }
      if (i < num_inputs) {
        BeamHypothesis child = h;
        const double emission = instance.emission_score(i + 1, next_step);
        child.path_prefix.positions.push_back(i + 1);
        child.position = i + 1;
        child.step = next_step;
        child.score += model.shift_log_prob(i, next_step) + emission;
        child.rank_key += keys.shift + emission;
        candidates.push_back({std::move(child), TransitionAction::kShift, false});
      } else if (!fixed) {
        BeamHypothesis child = h;
        child.score += model.shift_log_prob(i, next_step);
        child.rank_key += keys.shift;
        candidates.push_back({std::move(child), TransitionAction::kShift, true, true});
      }
    }
    // The start is feasible and every feasible hypothesis has a feasible child.
    require(!candidates.empty(), "internal: beam emptied by feasibility pruning");

    std::stable_sort(candidates.begin(), candidates.end(), detail::ranks_before);
    if (candidates.size() > width) candidates.resize(width);
    live.clear();
    for (detail::Candidate& c : candidates) {
      if (c.finished) {
        finished.push_back(std::move(c));
      } else {
        live.push_back(std::move(c.hypothesis));
      }
    }
  }

  const auto best = std::min_element(finished.begin(), finished.end(), [](const auto& a, const auto& b) {
    return a.hypothesis.rank_key > b.hypothesis.rank_key;
  });
  DecodeResult result;
  result.path = std::move(best->hypothesis.path_prefix);
  result.score = best->hypothesis.score;
  result.ended_by_shift = best->ended_by_shift;
  return result;
}

/// Mean number of consecutive Emits before the first Shift under
/// stochastic greedy with a constant logit; Geometric with mean a1 / (1 - a1).
template <UniformSource Source>
double expected_emit_run_check(double log_alpha, int trials, Source& noise) {
  require(trials >= 1, "trials must be >= 1");
  require(emit_prob(log_alpha, 1.0) <= 1.0 - 1e-6, "Emit probability too close to 1 for a finite run check");
  std::uint64_t total = 0;
  for (int t = 0; t < trials; ++t) {
    while (sample_bernoulli(log_alpha, noise) == TransitionAction::kEmit) ++total;
  }
  return static_cast<double>(total) / trials;
}

}  // namespace hardalign
