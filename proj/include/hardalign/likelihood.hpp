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

// Marginal likelihood over all complete alignments, by a log-space forward
// recursion and by brute-force enumeration.

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hardalign/lattice.hpp"
#include "hardalign/math.hpp"

namespace hardalign {

/// Log forward mass alpha(i, j): total probability of all prefixes that sit
/// at input i after j output steps (emissions included).
class ForwardTable {
 public:
  ForwardTable(int num_inputs, int max_outputs)
      : num_inputs_(num_inputs),
        max_outputs_(max_outputs),
        values_(static_cast<std::size_t>(num_inputs) * max_outputs, kNegInf) {}

  int num_inputs() const noexcept { return num_inputs_; }
  int max_outputs() const noexcept { return max_outputs_; }

  double operator()(int i, int j) const { return values_[index(i, j)]; }
  double& operator()(int i, int j) { return values_[index(i, j)]; }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i - 1) * max_outputs_ + static_cast<std::size_t>(j - 1);
  }

  int num_inputs_;
  int max_outputs_;
  std::vector<double> values_;
};

/// fwd(i, j) = emis(i, j) + logaddexp(fwd(i, j-1) + log a1(i, j),
///                                    fwd(i-1, j-1) + log a2(i-1, j))
/// with fwd(1, 1) = emis(1, 1) and fwd(i > 1, 1) = -inf. Output-major loop.
inline ForwardTable forward_table(const LatticeInstance& instance) {
  const TransitionLogits& model = instance.model;
  const int num_inputs = model.num_inputs();
  const int max_outputs = model.max_outputs();
  ForwardTable table(num_inputs, max_outputs);
  table(1, 1) = instance.emission_score(1, 1);
  for (int j = 2; j <= max_outputs; ++j) {
    for (int i = 1; i <= num_inputs; ++i) {
      double stay = table(i, j - 1);
      if (stay != kNegInf) stay += model.emit_log_prob(i, j);
      double advance = kNegInf;
      if (i > 1 && table(i - 1, j - 1) != kNegInf) advance = table(i - 1, j - 1) + model.shift_log_prob(i - 1, j);
      const double mass = log_add_exp(stay, advance);
      table(i, j) = mass == kNegInf ? kNegInf : mass + instance.emission_score(i, j);
    }
  }
  return table;
}

/// log p(y | x) summed over complete paths; -inf when I > J (empty event).
inline double forward_marginal(const LatticeInstance& instance) {
  if (instance.num_inputs() > instance.max_outputs()) return kNegInf;
  return forward_table(instance)(instance.num_inputs(), instance.max_outputs());
}

/// Same quantity by explicit enumeration of every complete path.
inline double brute_force_marginal(const LatticeInstance& instance,
                                   std::uint64_t limit = kDefaultEnumerationLimit) {
  double total = kNegInf;
  for (const AlignmentPath& path : enumerate_paths(instance.num_inputs(), instance.max_outputs(), limit)) {
    total = log_add_exp(total, path_log_prob(path, instance));
  }
  return total;
}

inline double negative_log_likelihood(const LatticeInstance& instance) { return -forward_marginal(instance); }

}  // namespace hardalign
