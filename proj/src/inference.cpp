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

#include "argnet/inference.hpp"

#include <algorithm>
#include <cstdint>
#include <set>
#include <sstream>

#include "argnet/errors.hpp"
#include "text_util.hpp"

namespace argnet {

namespace {

std::size_t position_in(const std::vector<std::size_t>& scope, std::size_t var) {
    return static_cast<std::size_t>(std::lower_bound(scope.begin(), scope.end(), var) - scope.begin());
}

bool contains(const std::vector<std::size_t>& scope, std::size_t var) {
    return std::binary_search(scope.begin(), scope.end(), var);
}

// CPT of node i as a factor over its unobserved family members.
Factor family_factor(const BayesNet& net, std::size_t i, const std::vector<int>& observed) {
    const auto& parents = net.parents_index()[i];
    const NetNode& node = net.node(i);

    std::vector<std::size_t> family(parents.begin(), parents.end());
    family.push_back(i);
    Factor f;
    for (auto v : family)
        if (observed[v] < 0) f.scope.push_back(v);
    std::sort(f.scope.begin(), f.scope.end());

    const std::size_t n = f.scope.size();
    f.values.resize(std::size_t{1} << n);
    for (std::uint64_t r = 0; r < f.values.size(); ++r) {
        auto value_of = [&](std::size_t var) -> bool {
            if (observed[var] >= 0) return observed[var] == 1;
            std::size_t k = position_in(f.scope, var);
            return (r >> (n - 1 - k)) & 1u;
        };
        std::uint64_t row = 0;
        for (auto p : parents) row = (row << 1) | (value_of(p) ? 1u : 0u);
        const double pt = node.cpt.prob_true(row);
        f.values[r] = value_of(i) ? pt : 1.0 - pt;
    }
    return f;
}

std::vector<int> observed_vector(const BayesNet& net, const Evidence& evidence) {
    std::vector<int> observed(net.size(), -1);
    for (const auto& [id, v] : evidence) observed[*net.index_of(id)] = v ? 1 : 0;
    return observed;
}

}  // namespace

void check_evidence(const BayesNet& net, const Evidence& evidence) {
    for (const auto& [id, v] : evidence)
        if (!net.contains(id)) throw UnknownIdError(ErrorKind::inference, id, "evidence node");
}

Factor Engine::multiply(const Factor& a, const Factor& b) const {
    Factor out;
    std::set_union(a.scope.begin(), a.scope.end(), b.scope.begin(), b.scope.end(), std::back_inserter(out.scope));
    const std::size_t n = out.scope.size();
    const std::size_t rows = std::size_t{1} << n;
    if (n > 30) throw SizeError(n, 30);

    // Each result bit contributes a fixed stride to the row index in a and b.
    std::vector<std::uint32_t> stride_a(n, 0), stride_b(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t var = out.scope[k];
        if (contains(a.scope, var)) stride_a[k] = 1u << (a.scope.size() - 1 - position_in(a.scope, var));
        if (contains(b.scope, var)) stride_b[k] = 1u << (b.scope.size() - 1 - position_in(b.scope, var));
    }
    std::vector<std::uint32_t> ia(rows, 0), ib(rows, 0);
    for (std::size_t r = 1; r < rows; ++r) {
        // Peel off the lowest set bit and reuse the smaller row.
        const std::size_t low = static_cast<std::size_t>(__builtin_ctzll(r));
        const std::size_t k = n - 1 - low;
        const std::size_t prev = r & (r - 1);
        ia[r] = ia[prev] + stride_a[k];
        ib[r] = ib[prev] + stride_b[k];
    }
    out.values.resize(rows);
    k_->gather_multiply(a.values.data(), ia.data(), b.values.data(), ib.data(), out.values.data(), rows);
    return out;
}

Factor Engine::sum_out(const Factor& f, std::size_t var) const {
    const std::size_t n = f.scope.size();
    const std::size_t k = position_in(f.scope, var);
    if (k >= n || f.scope[k] != var) throw InferenceError("variable not in factor scope");
    Factor out;
    out.scope = f.scope;
    out.scope.erase(out.scope.begin() + static_cast<std::ptrdiff_t>(k));
    const std::size_t stride = std::size_t{1} << (n - 1 - k);
    const std::size_t blocks = std::size_t{1} << k;
    out.values.resize(f.values.size() / 2);
    k_->fold_pairs(f.values.data(), out.values.data(), blocks, stride);
    return out;
}

Factor Engine::eliminate(const BayesNet& net, const std::vector<std::size_t>& keep, const Evidence& evidence) const {
    check_evidence(net, evidence);
    const auto observed = observed_vector(net, evidence);

    std::vector<Factor> factors;
    factors.reserve(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) factors.push_back(family_factor(net, i, observed));

    std::set<std::size_t> pending;
    for (std::size_t i = 0; i < net.size(); ++i)
        if (observed[i] < 0 && !std::binary_search(keep.begin(), keep.end(), i)) pending.insert(i);

    while (!pending.empty()) {
        // Min-degree: fewest distinct neighbours; set order breaks ties by id.
        std::size_t best = *pending.begin();
        std::size_t best_degree = SIZE_MAX;
        for (auto v : pending) {
            std::set<std::size_t> neighbours;
            for (const auto& f : factors)
                if (contains(f.scope, v)) neighbours.insert(f.scope.begin(), f.scope.end());
            std::size_t degree = neighbours.empty() ? 0 : neighbours.size() - 1;
            if (degree < best_degree) {
                best = v;
                best_degree = degree;
            }
        }
        pending.erase(best);

        std::vector<Factor> rest;
        std::optional<Factor> product;
        for (auto& f : factors) {
            if (!contains(f.scope, best)) {
                rest.push_back(std::move(f));
                continue;
            }
            product = product ? multiply(*product, f) : std::move(f);
        }
        if (product) rest.push_back(sum_out(*product, best));
        factors = std::move(rest);
    }

    Factor result{{}, {1.0}};
    for (const auto& f : factors) result = multiply(result, f);
    return result;
}

double Engine::evidence_probability(const BayesNet& net, const Evidence& evidence) const {
    Factor f = eliminate(net, {}, evidence);
    return f.values.front();
}

double Engine::posterior(const BayesNet& net, const std::string& query, const Evidence& evidence) const {
    auto q = net.index_of(query);
    if (!q) throw UnknownIdError(ErrorKind::inference, query, "query node");
    if (evidence.count(query)) throw InferenceError("query '" + query + "' is part of the evidence");
    Factor f = eliminate(net, {*q}, evidence);
    const double total = f.values[0] + f.values[1];
    if (!(total > 0.0)) throw ImpossibleEvidenceError();
    return f.values[1] / total;
}

Factor Engine::joint_table(const BayesNet& net, std::span<const std::string> keep, const Evidence& evidence) const {
    std::vector<std::size_t> idx;
    for (const auto& id : keep) {
        auto i = net.index_of(id);
        if (!i) throw UnknownIdError(ErrorKind::inference, id, "node");
        if (evidence.count(id)) throw InferenceError("node '" + id + "' is both kept and observed");
        idx.push_back(*i);
    }
    std::sort(idx.begin(), idx.end());
    idx.erase(std::unique(idx.begin(), idx.end()), idx.end());
    return eliminate(net, idx, evidence);
}

std::map<std::string, double> Engine::all_posteriors(const BayesNet& net, const Evidence& evidence) const {
    check_evidence(net, evidence);
    std::map<std::string, double> out;
    for (const auto& n : net.nodes()) {
        if (auto it = evidence.find(n.id); it != evidence.end())
            out[n.id] = it->second ? 1.0 : 0.0;
        else
            out[n.id] = posterior(net, n.id, evidence);
    }
    return out;
}

double evidence_probability(const BayesNet& net, const Evidence& evidence) {
    return Engine{}.evidence_probability(net, evidence);
}

double posterior(const BayesNet& net, const std::string& query, const Evidence& evidence) {
    return Engine{}.posterior(net, query, evidence);
}

double joint_probability(const BayesNet& net, const std::map<std::string, bool>& assignment) {
    for (const auto& [id, v] : assignment)
        if (!net.contains(id)) throw UnknownIdError(ErrorKind::inference, id, "node");
    double p = 1.0;
    for (std::size_t i = 0; i < net.size(); ++i) {
        const NetNode& n = net.node(i);
        auto it = assignment.find(n.id);
        if (it == assignment.end()) throw InferenceError("assignment is missing node '" + n.id + "'");
        std::uint64_t row = 0;
        for (const auto& parent : n.parents) row = (row << 1) | (assignment.at(parent) ? 1u : 0u);
        const double pt = n.cpt.prob_true(row);
        p *= it->second ? pt : 1.0 - pt;
    }
    return p;
}

double enumerate_oracle(const BayesNet& net, const std::optional<std::string>& query, const Evidence& evidence) {
    const std::size_t n = net.size();
    if (n > kOracleMaxNodes) throw SizeError(n, kOracleMaxNodes);
    check_evidence(net, evidence);
    std::optional<std::size_t> q;
    if (query) {
        q = net.index_of(*query);
        if (!q) throw UnknownIdError(ErrorKind::inference, *query, "query node");
    }
    const auto observed = observed_vector(net, evidence);

    double p_evidence = 0.0;
    double p_query = 0.0;
    std::vector<bool> value(n);
    for (std::uint64_t a = 0; a < (std::uint64_t{1} << n); ++a) {
        bool consistent = true;
        for (std::size_t i = 0; i < n; ++i) {
            value[i] = (a >> i) & 1u;
            if (observed[i] >= 0 && value[i] != (observed[i] == 1)) consistent = false;
        }
        if (!consistent) continue;
        double p = 1.0;
        for (std::size_t i = 0; i < n && p != 0.0; ++i) {
            std::uint64_t row = 0;
            for (auto parent : net.parents_index()[i]) row = (row << 1) | (value[parent] ? 1u : 0u);
            const double pt = net.node(i).cpt.prob_true(row);
            p *= value[i] ? pt : 1.0 - pt;
        }
        p_evidence += p;
        if (q && value[*q]) p_query += p;
    }
    if (!q) return p_evidence;
    if (!(p_evidence > 0.0)) throw ImpossibleEvidenceError();
    return p_query / p_evidence;
}

Evidence parse_evidence(std::string_view source) {
    Evidence ev;
    auto lines = text::split_lines(source);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        auto toks = text::tokenize(text::strip_comment(lines[n]));
        if (toks.empty()) continue;
        const std::size_t line = n + 1;
        if (toks.size() != 3 || toks[1].text != "=")
            throw ParseError("expected '<node-id> = true|false'", line, toks[0].column);
        if (!text::valid_id(toks[0].text)) throw ParseError("invalid node id", line, toks[0].column);
        bool v;
        if (toks[2].text == "true")
            v = true;
        else if (toks[2].text == "false")
            v = false;
        else
            throw ParseError("expected true or false", line, toks[2].column);
        std::string id(toks[0].text);
        if (ev.count(id)) throw ParseError("duplicate evidence for '" + id + "'", line, toks[0].column);
        ev.emplace(std::move(id), v);
    }
    return ev;
}

std::string format_evidence(const Evidence& evidence) {
    std::ostringstream out;
    for (const auto& [id, v] : evidence) out << id << " = " << (v ? "true" : "false") << '\n';
    return out.str();
}

}  // namespace argnet
