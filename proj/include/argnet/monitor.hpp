// Copyright 2026 the argnet authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <set>
#include <string>

#include "argnet/inference.hpp"
#include "argnet/network.hpp"

namespace argnet {

constexpr double kDefaultConflictThreshold = 0.1;
constexpr std::size_t kMaxObservedNodes = 20;

// Surprise index of observed data against the model's own prior predictive.
struct ConflictReport {
    double evidence_probability = 0.0;
    double expected_evidence_probability = 0.0;
    double lr_star = 0.0;
    bool triggered = false;
    double threshold = kDefaultConflictThreshold;
    std::size_t observed = 0;
};

// E[P(data)] = sum over all realizations d of the observed nodes of P(d)^2,
// optionally conditioned on `given` (then each P(d) is P(d | given)).
double expected_evidence_probability(const BayesNet& net, const std::set<std::string>& observed,
                                     const Evidence& given = {}, const Engine& engine = Engine{});

// LR* = P(evidence) / E[P(data)] over the evidence's node set.
ConflictReport surprise_index(const BayesNet& net, const Evidence& evidence,
                              double threshold = kDefaultConflictThreshold, const Engine& engine = Engine{});

// Surprise of `increment` alone, with `prior` evidence already absorbed:
// P(increment | prior) / E[P(increment' | prior)].
ConflictReport incremental_surprise_index(const BayesNet& net, const Evidence& prior, const Evidence& increment,
                                          double threshold = kDefaultConflictThreshold,
                                          const Engine& engine = Engine{});

// P(evidence | net1) / P(evidence | net2). Returns +inf when only the
// denominator vanishes; throws ImpossibleEvidenceError when both do.
double model_likelihood_ratio(const BayesNet& net1, const BayesNet& net2, const Evidence& evidence,
                              const Engine& engine = Engine{});

// key: value lines, fixed order.
std::string format_report(const ConflictReport& report);

}  // namespace argnet
