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

// The monotone alignment lattice.
//
// Positions and steps are 1-based throughout: input positions i in 1..I,
// output steps j in 1..J. An alignment path starts at z_1 = 1 with
// probability one and then moves by Emit (stay) or Shift (advance by one).
// A complete path ends at z_J = I; no end-of-sequence transition is charged.

#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hardalign/distributions.hpp"
#include "hardalign/math.hpp"

namespace hardalign {

namespace detail {

inline void check_dims(int num_inputs, int max_outputs, std::size_t table_size, const char* what) {
  require(num_inputs >= 1, std::string(what) + ": I must be >= 1");
  require(max_outputs >= 1, std::string(what) + ": J must be >= 1");
  require(table_size == static_cast<std::size_t>(num_inputs) * static_cast<std::size_t>(max_outputs),
          std::string(what) + ": expected " + std::to_string(num_inputs) + "x" + std::to_string(max_outputs) +
              " values, got " + std::to_string(table_size));
}

}  // namespace detail

/// Dense I x J table of Emit-vs-Shift log-odds plus the temperature that
/// maps them to probabilities. Stored row-major: index (i-1)*J + (j-1).
class TransitionLogits {
 public:
  TransitionLogits(int num_inputs, int max_outputs, std::vector<double> logits, double lambda)
      : num_inputs_(num_inputs), max_outputs_(max_outputs), logits_(std::move(logits)), lambda_(lambda) {
    detail::check_dims(num_inputs_, max_outputs_, logits_.size(), "logits");
    check_temperature(lambda_);
    for (std::size_t k = 0; k < logits_.size(); ++k) {
      require(std::isfinite(logits_[k]), "logits[" + std::to_string(k) + "] is not finite");
    }
  }

  /// All-equal logits, handy for hand-checked fixtures.
  static TransitionLogits constant(int num_inputs, int max_outputs, double logit, double lambda) {
    return TransitionLogits(num_inputs, max_outputs,
                            std::vector<double>(static_cast<std::size_t>(num_inputs) * max_outputs, logit), lambda);
  }

  int num_inputs() const noexcept { return num_inputs_; }
  int max_outputs() const noexcept { return max_outputs_; }
  double lambda() const noexcept { return lambda_; }
  const std::vector<double>& values() const noexcept { return logits_; }

  double logit(int i, int j) const { return logits_[index(i, j)]; }
  void set_logit(int i, int j, double value) {
    require(std::isfinite(value), "logit must be finite");
    logits_[index(i, j)] = value;
  }

  double emit_log_prob(int i, int j) const { return hardalign::emit_log_prob(logit(i, j), lambda_); }
  double shift_log_prob(int i, int j) const { return hardalign::shift_log_prob(logit(i, j), lambda_); }

  TransitionLogits with_lambda(double lambda) const { return TransitionLogits(num_inputs_, max_outputs_, logits_, lambda); }

 private:
  std::size_t index(int i, int j) const {
    if (i < 1 || i > num_inputs_ || j < 1 || j > max_outputs_) {
      throw std::out_of_range("lattice cell (" + std::to_string(i) + ", " + std::to_string(j) + ") outside " +
                              std::to_string(num_inputs_) + "x" + std::to_string(max_outputs_));
    }
    return static_cast<std::size_t>(i - 1) * max_outputs_ + static_cast<std::size_t>(j - 1);
  }

  int num_inputs_;
  int max_outputs_;
  std::vector<double> logits_;
  double lambda_;
};

/// Per-cell output log-likelihoods log p(y_j | z_j = i), same layout as the logits.
class EmissionScores {
 public:
  EmissionScores(int num_inputs, int max_outputs, std::vector<double> scores)
      : num_inputs_(num_inputs), max_outputs_(max_outputs), scores_(std::move(scores)) {
    detail::check_dims(num_inputs_, max_outputs_, scores_.size(), "emission");
    for (std::size_t k = 0; k < scores_.size(); ++k) {
      require(std::isfinite(scores_[k]), "emission[" + std::to_string(k) + "] is not finite");
    }
  }

  int num_inputs() const noexcept { return num_inputs_; }
  int max_outputs() const noexcept { return max_outputs_; }
  const std::vector<double>& values() const noexcept { return scores_; }

  double score(int i, int j) const {
    if (i < 1 || i > num_inputs_ || j < 1 || j > max_outputs_) {
      throw std::out_of_range("emission cell (" + std::to_string(i) + ", " + std::to_string(j) + ") out of range");
    }
    return scores_[static_cast<std::size_t>(i - 1) * max_outputs_ + static_cast<std::size_t>(j - 1)];
  }

 private:
  int num_inputs_;
  int max_outputs_;
  std::vector<double> scores_;
};

/// z_1..z_n as 1-based input positions.
struct AlignmentPath {
  std::vector<int> positions;

  std::size_t size() const noexcept { return positions.size(); }
  int operator[](std::size_t step_index) const { return positions[step_index]; }
  /// Position at 1-based output step j.
  int at_step(int j) const { return positions.at(static_cast<std::size_t>(j - 1)); }

  /// Emit/Shift action taken on arrival at 1-based step j >= 2.
  TransitionAction action_at(int j) const {
    return at_step(j) == at_step(j - 1) ? TransitionAction::kEmit : TransitionAction::kShift;
  }

  friend bool operator==(const AlignmentPath&, const AlignmentPath&) = default;
};

struct LatticeInstance {
  TransitionLogits model;
  std::optional<EmissionScores> emission;
  std::optional<AlignmentPath> truth_path;

  explicit LatticeInstance(TransitionLogits m, std::optional<EmissionScores> e = std::nullopt,
                           std::optional<AlignmentPath> truth = std::nullopt)
      : model(std::move(m)), emission(std::move(e)), truth_path(std::move(truth)) {
    if (emission) {
      require(emission->num_inputs() == model.num_inputs() && emission->max_outputs() == model.max_outputs(),
              "emission table shape must match logits");
    }
    if (truth_path) {
      require(static_cast<int>(truth_path->size()) == model.max_outputs(), "truth_path must have J entries");
    }
  }

  int num_inputs() const noexcept { return model.num_inputs(); }
  int max_outputs() const noexcept { return model.max_outputs(); }

  double emission_score(int i, int j) const { return emission ? emission->score(i, j) : 0.0; }
};

/// Log-probability of moving from z_prev at step j-1 to z at step j.
/// Emit reads the cell (z, j); Shift reads the cell (z - 1, j) it leaves.
inline double transition_log_prob(int z_prev, int z, int j, const TransitionLogits& model) {
  const int num_inputs = model.num_inputs();
  if (z_prev < 1 || z_prev > num_inputs || z < 1 || z > num_inputs) {
    throw std::out_of_range("transition positions (" + std::to_string(z_prev) + " -> " + std::to_string(z) +
                            ") outside 1.." + std::to_string(num_inputs));
  }
  if (j < 2 || j > model.max_outputs()) {
    throw std::out_of_range("transition step j = " + std::to_string(j) + " outside 2.." +
                            std::to_string(model.max_outputs()));
  }
  if (z == z_prev) return model.emit_log_prob(z, j);
  if (z == z_prev + 1) return model.shift_log_prob(z_prev, j);
  return kNegInf;
}

struct PathViolation {
  int step;  // 1-based output step at which the first violation occurs
  std::string reason;
};

/// Reports the first broken invariant, or nullopt if the path is valid.
inline std::optional<PathViolation> validate_path(const AlignmentPath& path, int num_inputs, bool require_complete) {
  if (num_inputs < 1) return PathViolation{1, "I must be >= 1"};
  if (path.size() == 0) return PathViolation{1, "empty path"};
  if (path[0] != 1) return PathViolation{1, "z_1 = " + std::to_string(path[0]) + ", expected 1"};
  for (std::size_t k = 1; k < path.size(); ++k) {
    const int step = static_cast<int>(k) + 1;
    const int increment = path[k] - path[k - 1];
    if (increment != 0 && increment != 1) {
      return PathViolation{step, "increment " + std::to_string(increment) + " not in {0, 1}"};
    }
    if (path[k] > num_inputs) {
      return PathViolation{step, "position " + std::to_string(path[k]) + " exceeds I = " + std::to_string(num_inputs)};
    }
  }
  if (require_complete && path.positions.back() != num_inputs) {
    return PathViolation{static_cast<int>(path.size()),
                         "incomplete: ends at " + std::to_string(path.positions.back()) + ", expected I = " +
                             std::to_string(num_inputs)};
  }
  return std::nullopt;
}

/// Transition plus emission log-probability of a (possibly partial) path.
/// Step 1 contributes emission only since z_1 = 1 is forced.
inline double path_log_prob(const AlignmentPath& path, const TransitionLogits& model,
                            const EmissionScores* emission = nullptr) {
  if (auto violation = validate_path(path, model.num_inputs(), false)) {
    throw ValidationError("invalid path at j = " + std::to_string(violation->step) + ": " + violation->reason);
  }
  const int steps = static_cast<int>(path.size());
  require(steps <= model.max_outputs(), "path longer than J = " + std::to_string(model.max_outputs()));
  double total = emission ? emission->score(path.at_step(1), 1) : 0.0;
  for (int j = 2; j <= steps; ++j) {
    total += transition_log_prob(path.at_step(j - 1), path.at_step(j), j, model);
    if (emission) total += emission->score(path.at_step(j), j);
  }
  return total;
}

inline double path_log_prob(const AlignmentPath& path, const LatticeInstance& instance) {
  return path_log_prob(path, instance.model, instance.emission ? &*instance.emission : nullptr);
}

/// Thrown when exhaustive enumeration would exceed its size guard.
class EnumerationLimitError : public std::length_error {
 public:
  explicit EnumerationLimitError(const std::string& what) : std::length_error(what) {}
};

/// C(J-1, I-1), saturating at uint64 max. Zero when infeasible.
inline std::uint64_t complete_path_count(int num_inputs, int max_outputs) {
  if (num_inputs < 1 || max_outputs < 1 || num_inputs > max_outputs) return 0;
  const std::uint64_t n = static_cast<std::uint64_t>(max_outputs - 1);
  std::uint64_t k = static_cast<std::uint64_t>(num_inputs - 1);
  if (k > n - k) k = n - k;
  std::uint64_t result = 1;
  for (std::uint64_t t = 1; t <= k; ++t) {
    const std::uint64_t numerator = n - k + t;
    // result * numerator / t is always integral; guard the multiply.
    if (result > std::numeric_limits<std::uint64_t>::max() / numerator) {
      return std::numeric_limits<std::uint64_t>::max();
    }
    result = result * numerator / t;
  }
  return result;
}

inline constexpr std::uint64_t kDefaultEnumerationLimit = 1'000'000;

/// Every complete monotone path for (I, J), in lexicographic order.
inline std::vector<AlignmentPath> enumerate_paths(int num_inputs, int max_outputs,
                                                  std::uint64_t limit = kDefaultEnumerationLimit) {
  std::vector<AlignmentPath> paths;
  if (num_inputs < 1 || max_outputs < 1 || num_inputs > max_outputs) return paths;
  const std::uint64_t count = complete_path_count(num_inputs, max_outputs);
  if (count > limit) {
    throw EnumerationLimitError("enumeration of " + std::to_string(num_inputs) + "x" + std::to_string(max_outputs) +
                                " lattice needs " + std::to_string(count) + " paths, limit is " +
                                std::to_string(limit));
  }
  paths.reserve(static_cast<std::size_t>(count));
  std::vector<int> current{1};
  current.reserve(static_cast<std::size_t>(max_outputs));

  auto extend = [&](auto& self) -> void {
    const int step = static_cast<int>(current.size());
    const int position = current.back();
    if (step == max_outputs) {
      if (position == num_inputs) paths.push_back(AlignmentPath{current});
      return;
    }
    // Emit first, then Shift, keeps the output lexicographic.
    for (const int next : {position, position + 1}) {
      if (next > num_inputs) continue;
      if (num_inputs - next > max_outputs - (step + 1)) continue;
      current.push_back(next);
      self(self);
      current.pop_back();
    }
  };
  extend(extend);
  return paths;
}

/// Number of output steps aligned to each input position (index 0 is input 1).
inline std::vector<int> segment_lengths(const AlignmentPath& path, int num_inputs) {
  std::vector<int> lengths(static_cast<std::size_t>(num_inputs), 0);
  for (const int z : path.positions) {
    if (z >= 1 && z <= num_inputs) ++lengths[static_cast<std::size_t>(z - 1)];
  }
  return lengths;
}

}  // namespace hardalign
