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

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "argnet/argument.hpp"
#include "argnet/inference.hpp"
#include "argnet/monitor.hpp"
#include "argnet/network.hpp"
#include "argnet/schema_kb.hpp"

namespace argnet {

// {.01, .05, .10, .15, ..., .95, .99}
std::vector<double> default_sensitivity_grid();

struct RevisionConfig {
    double threshold = kDefaultConflictThreshold;
    double acceptance_ratio = 10.0;
    std::size_t max_candidates = 5;
    // A rebuttal whose posterior exceeds this counts as "probable".
    double rebuttal_cutoff = 0.5;
    std::vector<double> grid = default_sensitivity_grid();
    // Backing levels followed when looking for background exceptions.
    int expansion_depth = 1;
};

struct Perturbation {
    std::size_t parameter = 0;  // index into Qualifier::parameters()
    double value = 0.0;
};

// Frames produced by one schema with the same shared side (grounds for causal
// frames, claim for diagnostic ones), the same qualifier and the same
// rebuttals are replicas of a single argument: the schema asserted one
// strength for several exchangeable claims. Replicas are scored and adjusted
// together.
struct ArgumentGroup {
    std::string id;
    std::vector<std::string> members;  // frame ids, sorted
};

std::vector<ArgumentGroup> group_arguments(std::span<const ArgumentFrame> frames);

struct SuspicionScore {
    std::string argument_id;
    std::vector<std::string> members;
    double sensitivity = 0.0;        // best LR* under perturbation minus current LR*, floored at 0
    double current_lr_star = 0.0;
    double best_lr_star = 0.0;
    std::optional<Perturbation> best_perturbation;
    double rebuttal_posterior = 0.0;  // max over the argument's rebuttals
    std::optional<std::string> top_rebuttal;
    bool rebuttal_probable = false;
    bool warrant_invalid = false;
};

// Scores every argument and ranks by (warrant_invalid, rebuttal_posterior,
// sensitivity) descending, then by argument id.
std::vector<SuspicionScore> suspect_arguments(const BayesNet& net, std::span<const ArgumentFrame> frames,
                                              const KnowledgeBase& kb, const Evidence& evidence,
                                              const RevisionConfig& config = {});

enum class CandidateKind {
    promote_rebuttal,
    promote_implicit_exception,
    promote_background_exception,
    adjust_qualifier,
};

std::string_view to_string(CandidateKind kind);

struct RevisionCandidate {
    CandidateKind kind = CandidateKind::adjust_qualifier;
    std::string target;  // argument id
    std::vector<ArgumentFrame> frames;
    std::string description;
    BayesNet net;  // compiled from `frames`
};

// Candidates for the ranked suspects, at most max_candidates in total.
// Candidates that fail to compile are dropped; the reason goes to `dropped`.
std::vector<RevisionCandidate> propose_revisions(const KnowledgeBase& kb, std::span<const SuspicionScore> suspects,
                                                 std::span<const ArgumentFrame> frames, std::size_t max_candidates,
                                                 std::vector<std::string>* dropped = nullptr,
                                                 int expansion_depth = 1);

struct RevisionDecision {
    bool adopt = false;
    double ratio = 1.0;             // P(e | candidate) / P(e | current) on the common observations
    std::size_t compared = 0;       // size of the common observed subset
};

RevisionDecision evaluate_revision(const BayesNet& current, const RevisionCandidate& candidate,
                                   const Evidence& evidence, double acceptance_ratio);

struct RevisionPass {
    ConflictReport before;
    bool ran = false;  // false when nothing triggered and the pass was not forced
    std::vector<SuspicionScore> suspects;
    std::vector<RevisionCandidate> candidates;
    std::vector<RevisionDecision> decisions;
    std::vector<std::string> dropped;
    std::optional<std::size_t> adopted;
    std::optional<ConflictReport> after;
    std::string transcript;
};

// One monitor -> suspect -> propose -> evaluate pass. Every candidate is
// evaluated; the first acceptable one in proposal order is adopted, so an
// explicit exception wins over a qualifier tweak for the same suspect.
RevisionPass run_revision_pass(const KnowledgeBase& kb, std::span<const ArgumentFrame> frames, const BayesNet& net,
                               const Evidence& evidence, const RevisionConfig& config = {}, bool force = false);

}  // namespace argnet
