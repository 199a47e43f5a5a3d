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

#include "argnet/kernels.hpp"
#include "argnet/network.hpp"

namespace argnet {

using Evidence = std::map<std::string, bool>;

// A non-negative table over binary variables. `scope` holds node indices in
// ascending order; the first variable is the most significant bit of a row.
struct Factor {
    std::vector<std::size_t> scope;
    std::vector<double> values;
};

// Exact inference by variable elimination. Elimination order is min-degree
// with ties broken by node id, so results do not depend on insertion order.
class Engine {
public:
    explicit Engine(const kernels::KernelSet& k = kernels::active()) : k_(&k) {}

    const kernels::KernelSet& kernels() const { return *k_; }

    double evidence_probability(const BayesNet& net, const Evidence& evidence) const;

    // P(query = true | evidence). Throws ImpossibleEvidenceError when P(evidence) = 0.
    double posterior(const BayesNet& net, const std::string& query, const Evidence& evidence) const;

    // Joint table P(keep, evidence) over the named nodes (none of them observed).
    // The returned factor's scope is sorted by node index.
    Factor joint_table(const BayesNet& net, std::span<const std::string> keep, const Evidence& evidence) const;

    // Posterior of every node; observed nodes report their observed value.
    std::map<std::string, double> all_posteriors(const BayesNet& net, const Evidence& evidence) const;

    // Building blocks, exposed for testing.
    Factor multiply(const Factor& a, const Factor& b) const;
    Factor sum_out(const Factor& f, std::size_t var) const;

private:
    Factor eliminate(const BayesNet& net, const std::vector<std::size_t>& keep, const Evidence& evidence) const;

    const kernels::KernelSet* k_;
};

double joint_probability(const BayesNet& net, const std::map<std::string, bool>& assignment);
double evidence_probability(const BayesNet& net, const Evidence& evidence);
double posterior(const BayesNet& net, const std::string& query, const Evidence& evidence);

// Reference answer by summing the joint over every assignment. With a query it
// returns P(query | evidence); without, P(evidence). Refuses nets above 20 nodes.
constexpr std::size_t kOracleMaxNodes = 20;
double enumerate_oracle(const BayesNet& net, const std::optional<std::string>& query, const Evidence& evidence);

// Throws UnknownIdError for any evidence node absent from the net.
void check_evidence(const BayesNet& net, const Evidence& evidence);

// Evidence file: one `<node-id> = true|false` per line, `#` comments.
Evidence parse_evidence(std::string_view source);
std::string format_evidence(const Evidence& evidence);

}  // namespace argnet
