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

// Sampling primitives for the binary Emit/Shift transition variable.
//
// Two noise placements are supported. In the Logistic condition the noise
// is added to the log-odds of an already-computed Emit probability and the
// result is thresholded (a Bernoulli draw via the Gumbel-Max trick). In the
// binary Concrete condition the noise is added to log(alpha) before the
// tempered sigmoid, which yields a continuous relaxed sample in (0, 1).
//
// Only the Logistic difference L = G1 - G2 of two Gumbel variables is ever
// drawn; the individual Gumbel noises are never materialized.

#pragma once

#include <cmath>
#include <string>
#include <string_view>

#include "hardalign/math.hpp"
#include "hardalign/noise.hpp"

namespace hardalign {

enum class TransitionAction { kEmit, kShift };

inline std::string_view to_string(TransitionAction action) {
  return action == TransitionAction::kEmit ? "Emit" : "Shift";
}

inline void check_temperature(double lambda) {
  require(std::isfinite(lambda) && lambda > 0.0,
          "temperature lambda must be positive and finite, got " + std::to_string(lambda));
}

/// Location log(alpha) and temperature lambda of a binary Concrete variable.
class BinConcreteParams {
 public:
  BinConcreteParams(double log_alpha, double lambda) : log_alpha_(log_alpha), lambda_(lambda) {
    require(std::isfinite(log_alpha), "log_alpha must be finite");
    check_temperature(lambda);
  }

  double log_alpha() const noexcept { return log_alpha_; }
  double lambda() const noexcept { return lambda_; }

 private:
  double log_alpha_;
  double lambda_;
};

/// Inverse CDF of the standard Logistic: log(u) - log(1 - u).
inline double logistic_from_uniform(double u) { return std::log(u) - std::log1p(-u); }

template <UniformSource Source>
double sample_logistic(Source& noise) {
  return logistic_from_uniform(noise.uniform());
}

/// 1 / (1 + exp(-x / lambda)).
inline double sigmoid_temp(double x, double lambda) {
  check_temperature(lambda);
  const double t = x / lambda;
  if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
  const double e = std::exp(t);
  return e / (1.0 + e);
}

/// Emit probability alpha1 for a transition logit; alpha2 = 1 - alpha1.
inline double emit_prob(double log_alpha, double lambda) { return sigmoid_temp(log_alpha, lambda); }

inline double emit_log_prob(double log_alpha, double lambda) {
  check_temperature(lambda);
  return log_sigmoid(log_alpha / lambda);
}

inline double shift_log_prob(double log_alpha, double lambda) {
  check_temperature(lambda);
  return log_sigmoid(-log_alpha / lambda);
}

/// Gumbel-Max decision for given log-odds and Logistic noise. Ties go to Emit.
inline TransitionAction bernoulli_from_logistic(double log_odds, double logistic_noise) {
  return logistic_noise + log_odds >= 0.0 ? TransitionAction::kEmit : TransitionAction::kShift;
}

/// Bernoulli draw with P(Emit) = sigmoid(log_alpha), untempered.
template <UniformSource Source>
TransitionAction sample_bernoulli(double log_alpha, Source& noise) {
  return bernoulli_from_logistic(log_alpha, sample_logistic(noise));
}

/// Pre-sigmoid value (log_alpha + L) / lambda of a relaxed sample.
inline double binconcrete_logit_from_logistic(const BinConcreteParams& params, double logistic_noise) {
  return (params.log_alpha() + logistic_noise) / params.lambda();
}

inline double binconcrete_from_logistic(const BinConcreteParams& params, double logistic_noise) {
  return sigmoid_temp(params.log_alpha() + logistic_noise, params.lambda());
}

/// Log-odds of a binary Concrete sample. Unlike the sample itself this never
/// rounds to 0 or 1, which matters at low temperature.
template <UniformSource Source>
double binconcrete_sample_logit(const BinConcreteParams& params, Source& noise) {
  return binconcrete_logit_from_logistic(params, sample_logistic(noise));
}

template <UniformSource Source>
double binconcrete_sample(const BinConcreteParams& params, Source& noise) {
  return binconcrete_from_logistic(params, sample_logistic(noise));
}

namespace detail {

// Binary Concrete log-density given log(x) and log(1 - x).
inline double binconcrete_log_density(double log_x, double log_1mx, const BinConcreteParams& params) {
  const double lambda = params.lambda();
  const double log_alpha = params.log_alpha();
  const double denom = log_add_exp(log_alpha - lambda * log_x, -lambda * log_1mx);
  return std::log(lambda) + log_alpha + (-lambda - 1.0) * (log_x + log_1mx) - 2.0 * denom;
}

}  // namespace detail

/// log BinConcrete(x | alpha, lambda), evaluated entirely in log space.
inline double binconcrete_log_density(double x, const BinConcreteParams& params) {
  require(x > 0.0 && x < 1.0, "binary Concrete support is the open interval (0, 1)");
  return detail::binconcrete_log_density(std::log(x), std::log1p(-x), params);
}

/// Log-density of the log-odds u = log(x / (1 - x)) of a binary Concrete
/// variable: the x-density times the Jacobian x (1 - x).
inline double binconcrete_log_density_logit(double u, const BinConcreteParams& params) {
  const double log_x = log_sigmoid(u);
  const double log_1mx = log_sigmoid(-u);
  return detail::binconcrete_log_density(log_x, log_1mx, params) + log_x + log_1mx;
}

/// Argmax over the relaxed pair (x, 1 - x). x = 0.5 resolves to Emit.
inline TransitionAction discretize(double x) {
  return x >= 0.5 ? TransitionAction::kEmit : TransitionAction::kShift;
}

/// d sample / d log_alpha at fixed noise: s (1 - s) / lambda.
inline double binconcrete_sample_grad(const BinConcreteParams& params, double logistic_noise) {
  const double u = binconcrete_logit_from_logistic(params, logistic_noise);
  const double s = sigmoid_temp(u, 1.0);
  const double one_minus_s = sigmoid_temp(-u, 1.0);
  return s * one_minus_s / params.lambda();
}

}  // namespace hardalign
