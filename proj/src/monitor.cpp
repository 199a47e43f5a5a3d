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

#include "argnet/monitor.hpp"

#include <limits>
#include <sstream>
#include <vector>

#include "argnet/errors.hpp"
#include "text_util.hpp"

namespace argnet {

double expected_evidence_probability(const BayesNet& net, const std::set<std::string>& observed, const Evidence& given,
                                     const Engine& engine) {
    if (observed.empty()) throw InferenceError("no observed nodes");
    if (observed.size() > kMaxObservedNodes) throw SizeError(observed.size(), kMaxObservedNodes);

    // One elimination gives P(d, given) for every realization d at once.
    std::vector<std::string> keep(observed.begin(), observed.end());
    Factor table = engine.joint_table(net, keep, given);
    const auto& k = engine.kernels();
    const double squares = k.sum_squares(table.values.data(), table.values.size());
    if (given.empty()) return squares;
    const double norm = k.sum(table.values.data(), table.values.size());
    if (!(norm > 0.0)) throw ImpossibleEvidenceError();
    return squares / (norm * norm);
}

namespace {

ConflictReport make_report(double p, double expected, double threshold, std::size_t observed) {
    if (!(expected > 0.0)) throw DegenerateModelError();
    ConflictReport r;
    r.evidence_probability = p;
    r.expected_evidence_probability = expected;
    r.lr_star = p / expected;
    r.threshold = threshold;
    r.triggered = r.lr_star < threshold;
    r.observed = observed;
    return r;
}

std::set<std::string> keys(const Evidence& ev) {
    std::set<std::string> out;
    for (const auto& [id, v] : ev) out.insert(id);
    return out;
}

}  // namespace

ConflictReport surprise_index(const BayesNet& net, const Evidence& evidence, double threshold, const Engine& engine) {
    if (evidence.empty()) throw InferenceError("surprise index needs at least one observation");
    check_evidence(net, evidence);
    const double p = engine.evidence_probability(net, evidence);
    const double expected = expected_evidence_probability(net, keys(evidence), {}, engine);
    return make_report(p, expected, threshold, evidence.size());
}

ConflictReport incremental_surprise_index(const BayesNet& net, const Evidence& prior, const Evidence& increment,
                                          double threshold, const Engine& engine) {
    if (increment.empty()) throw InferenceError("surprise index needs at least one observation");
    check_evidence(net, prior);
    check_evidence(net, increment);
    Evidence all = prior;
    for (const auto& [id, v] : increment) {
        if (prior.count(id)) throw InferenceError("node '" + id + "' is observed twice");
        all[id] = v;
    }
    const double p_prior = prior.empty() ? 1.0 : engine.evidence_probability(net, prior);
    if (!(p_prior > 0.0)) throw ImpossibleEvidenceError();
    const double p = engine.evidence_probability(net, all) / p_prior;
    const double expected = expected_evidence_probability(net, keys(increment), prior, engine);
    return make_report(p, expected, threshold, increment.size());
}

double model_likelihood_ratio(const BayesNet& net1, const BayesNet& net2, const Evidence& evidence,
                              const Engine& engine) {
    check_evidence(net1, evidence);
    check_evidence(net2, evidence);
    const double num = engine.evidence_probability(net1, evidence);
    const double den = engine.evidence_probability(net2, evidence);
    if (den > 0.0) return num / den;
    if (num > 0.0) return std::numeric_limits<double>::infinity();
    throw ImpossibleEvidenceError();
}

std::string format_report(const ConflictReport& r) {
    std::ostringstream out;
    out << "observed: " << r.observed << '\n';
    out << "evidence_probability: " << text::format_short(r.evidence_probability) << '\n';
    out << "expected_evidence_probability: " << text::format_short(r.expected_evidence_probability) << '\n';
    out << "lr_star: " << text::format_short(r.lr_star) << '\n';
    out << "threshold: " << text::format_short(r.threshold) << '\n';
    out << "triggered: " << (r.triggered ? "yes" : "no") << '\n';
    return out.str();
}

}  // namespace argnet
