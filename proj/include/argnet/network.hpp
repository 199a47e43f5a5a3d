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
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "argnet/argument.hpp"
#include "argnet/schema_kb.hpp"

namespace argnet {

struct NetNode {
    std::string id;
    int tier = 0;
    std::vector<std::string> parents;  // order defines the CPT bit order
    Qualifier cpt;

    bool operator==(const NetNode&) const = default;
};

using Provenance = std::map<std::string, std::vector<std::string>>;

// Immutable DAG of binary nodes. Nodes are kept sorted by id.
class BayesNet {
public:
    BayesNet() = default;

    // Validates parent references, CPT arity and acyclicity.
    static BayesNet from_nodes(std::vector<NetNode> nodes, Provenance provenance = {});

    // Skips the acyclicity check. Only meant for tests that need a broken net.
    static BayesNet from_nodes_unchecked(std::vector<NetNode> nodes, Provenance provenance = {});

    std::size_t size() const { return nodes_.size(); }
    const std::vector<NetNode>& nodes() const { return nodes_; }
    const NetNode& node(std::size_t i) const { return nodes_[i]; }
    const NetNode& node(std::string_view id) const;
    std::optional<std::size_t> index_of(std::string_view id) const;
    bool contains(std::string_view id) const { return index_of(id).has_value(); }

    // parents_index()[i] lists the node indices of node i's parents in CPT order.
    const std::vector<std::vector<std::size_t>>& parents_index() const { return parent_index_; }

    std::size_t arc_count() const;
    const Provenance& provenance() const { return provenance_; }

    bool operator==(const BayesNet& other) const {
        return nodes_ == other.nodes_ && provenance_ == other.provenance_;
    }

private:
    void build_index(bool check_refs);

    std::vector<NetNode> nodes_;
    std::vector<std::vector<std::size_t>> parent_index_;
    Provenance provenance_;
};

// Returns one directed cycle as [a, b, ..., a], or nothing if the net is a DAG.
std::optional<std::vector<std::string>> find_cycle(const BayesNet& net);

// Throws CycleError carrying a concrete cycle.
void check_causal_order(const BayesNet& net);

// True iff every arc runs from a strictly lower tier to a higher one.
bool arcs_follow_tiers(const BayesNet& net);

struct MergedFamily {
    std::vector<std::string> parents;
    Qualifier cpt;
    Warnings warnings;
};

// Combines frames that share an effect. Single-cause full tables and noisy-ors
// are unioned by cause (identical duplicates collapse) into one noisy-or whose
// leak is the largest baseline. A lone frame keeps its qualifier unchanged.
MergedFamily merge_arguments_noisy_or(std::span<const ArgumentFrame> frames);

struct CompileResult {
    BayesNet net;
    Warnings warnings;
};

CompileResult compile(std::span<const ArgumentFrame> frames, const KnowledgeBase& kb);

// Shachter arc reversal. The pair inherits each other's parents and both CPTs
// become full tables computed by Bayes' rule, so the joint is unchanged.
BayesNet reverse_arc(const BayesNet& net, const std::string& from, const std::string& to);

// Total CPT rows a full-table representation of the net needs.
std::size_t cpt_entry_count(const BayesNet& net);

// Text formats (docs/formats.md).
std::string export_dot(const BayesNet& net);
std::string format_network(const BayesNet& net);
BayesNet parse_network(std::string_view source);

}  // namespace argnet
