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
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "argnet/schema_kb.hpp"

namespace argnet {

using Warnings = std::vector<std::string>;

// Table of P(claim = true | parent configuration). Parents are read as bits of
// the row index with the first parent as the most significant bit, and a set
// bit meaning "true". A family with m parents therefore has 2^m rows and row
// 0 is the all-false configuration.
struct FullTable {
    std::vector<double> rows;
    bool operator==(const FullTable&) const = default;
};

// P(claim | parents) = 1 - (1 - leak) * prod_{i: parent i true} (1 - link[i]).
struct NoisyOr {
    std::vector<double> link;
    double leak = 0.0;
    bool operator==(const NoisyOr&) const = default;
};

class Qualifier {
public:
    Qualifier() : body_(FullTable{{0.5}}) {}
    Qualifier(FullTable t);
    Qualifier(NoisyOr n);

    static Qualifier prior(double p) { return Qualifier(FullTable{{p}}); }

    bool is_full_table() const { return std::holds_alternative<FullTable>(body_); }
    bool is_noisy_or() const { return std::holds_alternative<NoisyOr>(body_); }
    const FullTable& full_table() const { return std::get<FullTable>(body_); }
    const NoisyOr& noisy_or() const { return std::get<NoisyOr>(body_); }

    // Number of parents the qualifier conditions on.
    std::size_t arity() const;

    // P(claim = true) for the parent configuration encoded in `row`.
    double prob_true(std::uint64_t row) const;

    // The full 2^arity table, whatever the representation.
    std::vector<double> expand() const;

    // Flat view of the free numbers (table rows, or link probabilities followed
    // by the leak) and the matching setter; used for sensitivity analysis.
    std::vector<double> parameters() const;
    Qualifier with_parameter(std::size_t index, double value) const;

    bool operator==(const Qualifier&) const = default;

private:
    std::variant<FullTable, NoisyOr> body_;
};

// Closed-form noisy-or row, evaluated independently of Qualifier.
double noisy_or_row(std::span<const double> link, double leak, std::uint64_t row);

struct LikelihoodRatio {
    double ratio = 1.0;
    double baseline = 0.0;  // P(effect | not cause)
    bool operator==(const LikelihoodRatio&) const = default;
};

// A six-slot argument. Causal frames argue from causes (grounds) to an effect
// (claim); diagnostic frames argue from one observed effect (the single ground)
// to a cause (claim). In both cases the qualifier holds the causal conditional
// P(effect | causes) with the causes as its parents, so the network family can
// be read off without re-deriving anything.
struct ArgumentFrame {
    std::string id;
    std::vector<std::string> grounds;  // sorted
    std::string claim;
    Qualifier qualifier;
    std::string warrant;
    std::optional<std::string> backing;
    std::vector<std::string> rebuttals;  // sorted
    Direction direction = Direction::causal;
    // Diagnostic frames keep the rule strength they were activated with.
    std::optional<LikelihoodRatio> likelihood_ratio;

    bool operator==(const ArgumentFrame&) const = default;

    // The effect node and its causes in network orientation.
    const std::string& effect() const;
    std::vector<std::string> causes() const;
};

std::string make_argument_id(const std::string& warrant, const std::vector<std::string>& grounds,
                             const std::string& claim, Direction direction);

// Checks slot invariants against the KB: tier direction, one ground for
// diagnostic frames, rebuttals disjoint from grounds/claim, qualifier arity.
// Mixed-direction frames are rejected.
void validate_frame(const ArgumentFrame& frame, const KnowledgeBase& kb);

// One link gives a 2-row full table; several links sharing an effect give a
// noisy-or whose leak is the largest strength_given_not_cause. Links must be
// ordered by cause id.
Qualifier qualifier_from_causal_strength(std::span<const CausalLink> links, Warnings* warnings = nullptr);

// Returns (P(effect | cause), P(effect | not cause)) = (lr * baseline, baseline).
std::pair<double, double> qualifier_from_likelihood_ratio(double lr, double baseline);

// Builds one frame per claim covered by the activation. Forward activations
// give one causal frame per effect; backward activations give one diagnostic
// frame per matched link.
std::vector<ArgumentFrame> construct_arguments(const SchemaActivation& activation, const KnowledgeBase& kb,
                                               Warnings* warnings = nullptr);

// As above, but the activation must yield exactly one frame.
ArgumentFrame construct_argument(const SchemaActivation& activation, const KnowledgeBase& kb,
                                 Warnings* warnings = nullptr);

// Frame file format: see docs/formats.md.
std::string format_frames(std::span<const ArgumentFrame> frames);
std::vector<ArgumentFrame> parse_frames(std::string_view source);

}  // namespace argnet
