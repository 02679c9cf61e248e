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

// JSON forms of LatticeInstance, GeneratorSpec and ConditionGrid.
//
// LatticeInstance: {"I", "J", "lambda", "logits": [I*J row-major],
//                   "emission"?: [I*J], "truth_path"?: [J ints]}
// GeneratorSpec:   {"I", "J", "logit_scale", "lambda", "emission_sigma"?, "seed"}
// ConditionGrid:   {"distributions", "lambdas", "searches", "beam_width",
//                   "randomness", "trials", "seed"}
// Every decoding error names the offending field.

#pragma once

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hardalign/decoding.hpp"
#include "hardalign/harness.hpp"
#include "hardalign/lattice.hpp"
#include "hardalign/math.hpp"
#include "json.hpp"

namespace hardalign {

using Json = nlohmann::json;

namespace detail {

inline const Json& required_field(const Json& object, const char* name) {
  require(object.is_object(), std::string("expected a JSON object containing field '") + name + "'");
  const auto it = object.find(name);
  require(it != object.end(), std::string("missing field '") + name + "'");
  return *it;
}

inline bool has_field(const Json& object, const char* name) {
  const auto it = object.find(name);
  return it != object.end() && !it->is_null();
}

inline double number_field(const Json& value, const char* name) {
  require(value.is_number(), std::string("field '") + name + "': expected a number");
  return value.get<double>();
}

inline long long integer_field(const Json& value, const char* name) {
  require(value.is_number_integer(), std::string("field '") + name + "': expected an integer");
  return value.get<long long>();
}

inline std::uint64_t seed_field(const Json& value, const char* name) {
  require(value.is_number_unsigned() || (value.is_number_integer() && value.get<long long>() >= 0),
          std::string("field '") + name + "': expected a non-negative integer");
  return value.get<std::uint64_t>();
}

inline std::vector<double> number_array(const Json& value, const char* name) {
  require(value.is_array(), std::string("field '") + name + "': expected an array of numbers");
  std::vector<double> out;
  out.reserve(value.size());
  for (std::size_t k = 0; k < value.size(); ++k) {
    require(value[k].is_number(), std::string("field '") + name + "[" + std::to_string(k) + "]': expected a number");
    out.push_back(value[k].get<double>());
  }
  return out;
}

inline std::vector<std::string> string_array(const Json& value, const char* name) {
  require(value.is_array(), std::string("field '") + name + "': expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t k = 0; k < value.size(); ++k) {
    require(value[k].is_string(), std::string("field '") + name + "[" + std::to_string(k) + "]': expected a string");
    std::string s = value[k].get<std::string>();
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    out.push_back(std::move(s));
  }
  return out;
}

inline int int_in_range(long long value, const char* name) {
  require(value >= 1 && value <= 1'000'000, std::string("field '") + name + "': must be in 1..1000000");
  return static_cast<int>(value);
}

}  // namespace detail

inline std::optional<Distribution> parse_distribution(std::string name) {
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::tolower(c); });
  if (name == "logistic") return Distribution::kLogistic;
  if (name == "binconcrete") return Distribution::kBinConcrete;
  return std::nullopt;
}

inline LatticeInstance instance_from_json(const Json& json) {
  using namespace detail;
  const int num_inputs = int_in_range(integer_field(required_field(json, "I"), "I"), "I");
  const int max_outputs = int_in_range(integer_field(required_field(json, "J"), "J"), "J");
  const double lambda = number_field(required_field(json, "lambda"), "lambda");
  require(lambda > 0.0, "field 'lambda': must be > 0");
  std::vector<double> logits = number_array(required_field(json, "logits"), "logits");
  const std::size_t cells = static_cast<std::size_t>(num_inputs) * max_outputs;
  require(logits.size() == cells, "field 'logits': expected I*J = " + std::to_string(cells) + " values, got " +
                                      std::to_string(logits.size()));
  TransitionLogits model(num_inputs, max_outputs, std::move(logits), lambda);

  std::optional<EmissionScores> emission;
  if (has_field(json, "emission")) {
    std::vector<double> scores = number_array(json.at("emission"), "emission");
    require(scores.size() == cells, "field 'emission': expected I*J = " + std::to_string(cells) + " values, got " +
                                        std::to_string(scores.size()));
    emission.emplace(num_inputs, max_outputs, std::move(scores));
  }
  std::optional<AlignmentPath> truth;
  if (has_field(json, "truth_path")) {
    const Json& raw = json.at("truth_path");
    require(raw.is_array(), "field 'truth_path': expected an array of integers");
    AlignmentPath path;
    for (std::size_t k = 0; k < raw.size(); ++k) {
      require(raw[k].is_number_integer(),
              "field 'truth_path[" + std::to_string(k) + "]': expected an integer");
      path.positions.push_back(raw[k].get<int>());
    }
    require(static_cast<int>(path.size()) == max_outputs,
            "field 'truth_path': expected J = " + std::to_string(max_outputs) + " entries");
    if (auto violation = validate_path(path, num_inputs, true)) {
      throw ValidationError("field 'truth_path': invalid at j = " + std::to_string(violation->step) + ": " +
                            violation->reason);
    }
    truth = std::move(path);
  }
  return LatticeInstance(std::move(model), std::move(emission), std::move(truth));
}

inline Json to_json(const LatticeInstance& instance) {
  Json json;
  json["I"] = instance.num_inputs();
  json["J"] = instance.max_outputs();
  json["lambda"] = instance.model.lambda();
  json["logits"] = instance.model.values();
  if (instance.emission) json["emission"] = instance.emission->values();
  if (instance.truth_path) json["truth_path"] = instance.truth_path->positions;
  return json;
}

inline GeneratorSpec generator_spec_from_json(const Json& json) {
  using namespace detail;
  GeneratorSpec spec;
  spec.num_inputs = int_in_range(integer_field(required_field(json, "I"), "I"), "I");
  spec.max_outputs = int_in_range(integer_field(required_field(json, "J"), "J"), "J");
  spec.logit_scale = number_field(required_field(json, "logit_scale"), "logit_scale");
  spec.lambda = number_field(required_field(json, "lambda"), "lambda");
  if (has_field(json, "emission_sigma")) spec.emission_sigma = number_field(json.at("emission_sigma"), "emission_sigma");
  spec.seed = has_field(json, "seed") ? seed_field(json.at("seed"), "seed") : 0;
  spec.validate();
  return spec;
}

inline Json to_json(const GeneratorSpec& spec) {
  Json json;
  json["I"] = spec.num_inputs;
  json["J"] = spec.max_outputs;
  json["logit_scale"] = spec.logit_scale;
  json["lambda"] = spec.lambda;
  json["emission_sigma"] = spec.emission_sigma ? Json(*spec.emission_sigma) : Json(nullptr);
  json["seed"] = spec.seed;
  return json;
}

/// Missing axes fall back to the default grid.
inline ConditionGrid grid_from_json(const Json& json) {
  using namespace detail;
  require(json.is_object(), "condition grid must be a JSON object");
  ConditionGrid grid;
  if (has_field(json, "distributions")) {
    grid.distributions.clear();
    for (const std::string& name : string_array(json.at("distributions"), "distributions")) {
      const auto parsed = parse_distribution(name);
      require(parsed.has_value(), "field 'distributions': unknown distribution '" + name + "'");
      grid.distributions.push_back(*parsed);
    }
  }
  if (has_field(json, "lambdas")) grid.lambdas = number_array(json.at("lambdas"), "lambdas");
  if (has_field(json, "searches")) {
    grid.searches.clear();
    for (const std::string& name : string_array(json.at("searches"), "searches")) {
      if (name == "greedy") {
        grid.searches.push_back(SearchKind::kGreedy);
      } else if (name == "beam") {
        grid.searches.push_back(SearchKind::kBeam);
      } else {
        throw ValidationError("field 'searches': unknown search '" + name + "'");
      }
    }
  }
  if (has_field(json, "beam_width")) {
    grid.beam_width = int_in_range(integer_field(json.at("beam_width"), "beam_width"), "beam_width");
  }
  if (has_field(json, "randomness")) {
    grid.randomness.clear();
    for (const std::string& name : string_array(json.at("randomness"), "randomness")) {
      if (name == "deterministic") {
        grid.randomness.push_back(Randomness::kDeterministic);
      } else if (name == "stochastic") {
        grid.randomness.push_back(Randomness::kStochastic);
      } else {
        throw ValidationError("field 'randomness': unknown randomness '" + name + "'");
      }
    }
  }
  if (has_field(json, "trials")) grid.trials = int_in_range(integer_field(json.at("trials"), "trials"), "trials");
  if (has_field(json, "seed")) grid.seed = seed_field(json.at("seed"), "seed");
  grid.validate();
  return grid;
}

inline Json to_json(const ConditionGrid& grid) {
  Json json;
  json["distributions"] = Json::array();
  for (const Distribution d : grid.distributions) {
    json["distributions"].push_back(d == Distribution::kLogistic ? "Logistic" : "BinConcrete");
  }
  json["lambdas"] = grid.lambdas;
  json["searches"] = Json::array();
  for (const SearchKind s : grid.searches) json["searches"].push_back(std::string(to_string(s)));
  json["beam_width"] = grid.beam_width;
  json["randomness"] = Json::array();
  for (const Randomness r : grid.randomness) json["randomness"].push_back(std::string(to_string(r)));
  json["trials"] = grid.trials;
  json["seed"] = grid.seed;
  return json;
}

}  // namespace hardalign
