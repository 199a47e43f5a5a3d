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

#include "argnet/network.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <set>
#include <sstream>

#include "argnet/errors.hpp"
#include "text_util.hpp"

namespace argnet {

namespace {

constexpr double kSameValue = 1e-12;

bool same_qualifier(const Qualifier& a, const Qualifier& b) {
    auto x = a.expand();
    auto y = b.expand();
    if (x.size() != y.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i)
        if (std::abs(x[i] - y[i]) > kSameValue) return false;
    return true;
}

// Row index of a parent configuration; first parent is the most significant bit.
template <class ValueOf>
std::uint64_t row_of(const std::vector<std::string>& parents, ValueOf value_of) {
    std::uint64_t row = 0;
    for (const auto& p : parents) row = (row << 1) | (value_of(p) ? 1u : 0u);
    return row;
}

}  // namespace

CycleError::CycleError(std::vector<std::string> cycle)
    : Error(ErrorKind::compile,
            [&] {
                std::string s = "directed cycle:";
                for (std::size_t i = 0; i < cycle.size(); ++i) s += (i ? " -> " : " ") + cycle[i];
                return s;
            }()),
      cycle_(std::move(cycle)) {}

// ---------------------------------------------------------------------------
// BayesNet

void BayesNet::build_index(bool check_refs) {
    std::sort(nodes_.begin(), nodes_.end(), [](const NetNode& a, const NetNode& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < nodes_.size(); ++i)
        if (nodes_[i].id == nodes_[i - 1].id) throw Error(ErrorKind::compile, "duplicate node '" + nodes_[i].id + "'");

    parent_index_.assign(nodes_.size(), {});
    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const auto& n = nodes_[i];
        std::set<std::string> seen;
        for (const auto& p : n.parents) {
            if (!seen.insert(p).second)
                throw Error(ErrorKind::compile, "node '" + n.id + "' lists parent '" + p + "' twice");
            auto j = index_of(p);
            if (!j) {
                if (check_refs) throw UnknownIdError(ErrorKind::compile, p, "parent of '" + n.id + "'");
                continue;
            }
            parent_index_[i].push_back(*j);
        }
        if (n.cpt.arity() != n.parents.size())
            throw Error(ErrorKind::compile, "node '" + n.id + "': CPT arity " + std::to_string(n.cpt.arity()) +
                                                " does not match " + std::to_string(n.parents.size()) + " parents");
    }
}

BayesNet BayesNet::from_nodes(std::vector<NetNode> nodes, Provenance provenance) {
    BayesNet net = from_nodes_unchecked(std::move(nodes), std::move(provenance));
    check_causal_order(net);
    return net;
}

BayesNet BayesNet::from_nodes_unchecked(std::vector<NetNode> nodes, Provenance provenance) {
    BayesNet net;
    net.nodes_ = std::move(nodes);
    net.provenance_ = std::move(provenance);
    net.build_index(true);
    return net;
}

const NetNode& BayesNet::node(std::string_view id) const {
    auto i = index_of(id);
    if (!i) throw UnknownIdError(ErrorKind::inference, std::string(id), "node");
    return nodes_[*i];
}

std::optional<std::size_t> BayesNet::index_of(std::string_view id) const {
    auto it = std::lower_bound(nodes_.begin(), nodes_.end(), id,
                               [](const NetNode& n, std::string_view key) { return n.id < key; });
    if (it == nodes_.end() || it->id != id) return std::nullopt;
    return static_cast<std::size_t>(it - nodes_.begin());
}

std::size_t BayesNet::arc_count() const {
    std::size_t n = 0;
    for (const auto& node : nodes_) n += node.parents.size();
    return n;
}

// ---------------------------------------------------------------------------
// Ordering checks

std::optional<std::vector<std::string>> find_cycle(const BayesNet& net) {
    const std::size_t n = net.size();
    std::vector<std::vector<std::size_t>> children(n);
    for (std::size_t i = 0; i < n; ++i)
        for (auto p : net.parents_index()[i]) children[p].push_back(i);

    enum : char { white, gray, black };
    std::vector<char> color(n, white);
    std::vector<std::size_t> stack;

    // Iterative DFS keeps deep chains off the call stack.
    for (std::size_t root = 0; root < n; ++root) {
        if (color[root] != white) continue;
        std::vector<std::pair<std::size_t, std::size_t>> work{{root, 0}};
        color[root] = gray;
        stack.push_back(root);
        while (!work.empty()) {
            auto& [u, next] = work.back();
            if (next < children[u].size()) {
                std::size_t v = children[u][next++];
                if (color[v] == gray) {
                    auto from = std::find(stack.begin(), stack.end(), v);
                    std::vector<std::string> cycle;
                    for (auto it = from; it != stack.end(); ++it) cycle.push_back(net.node(*it).id);
                    cycle.push_back(net.node(v).id);
                    return cycle;
                }
                if (color[v] == white) {
                    color[v] = gray;
                    stack.push_back(v);
                    work.push_back({v, 0});
                }
            } else {
                color[u] = black;
                stack.pop_back();
                work.pop_back();
            }
        }
    }
    return std::nullopt;
}

void check_causal_order(const BayesNet& net) {
    if (auto cycle = find_cycle(net)) throw CycleError(std::move(*cycle));
}

bool arcs_follow_tiers(const BayesNet& net) {
    for (std::size_t i = 0; i < net.size(); ++i)
        for (auto p : net.parents_index()[i])
            if (net.node(p).tier >= net.node(i).tier) return false;
    return true;
}

// ---------------------------------------------------------------------------
// Merging and compilation

namespace {

struct LinkContribution {
    double strength;
    double baseline;
    std::string argument;
};

}  // namespace

MergedFamily merge_arguments_noisy_or(std::span<const ArgumentFrame> frames) {
    if (frames.empty()) throw ArgumentError("nothing to merge");
    const std::string& effect = frames.front().effect();
    for (const auto& f : frames)
        if (f.effect() != effect)
            throw ArgumentError("cannot merge arguments for '" + effect + "' and '" + f.effect() + "'");

    if (frames.size() == 1) return {frames.front().causes(), frames.front().qualifier, {}};

    std::map<std::string, std::vector<LinkContribution>> by_cause;
    for (const auto& f : frames) {
        const auto causes = f.causes();
        if (f.qualifier.is_full_table()) {
            if (causes.size() != 1) throw NotMergeableError(f.id);
            const auto& rows = f.qualifier.full_table().rows;
            by_cause[causes[0]].push_back({rows[1], rows[0], f.id});
        } else {
            const auto& no = f.qualifier.noisy_or();
            for (std::size_t i = 0; i < causes.size(); ++i)
                by_cause[causes[i]].push_back({no.link[i], no.leak, f.id});
        }
    }

    MergedFamily out;
    std::vector<double> strengths;
    double lo = 1.0, hi = 0.0;
    for (const auto& [cause, contributions] : by_cause) {
        const auto& first = contributions.front();
        for (const auto& c : contributions) {
            if (std::abs(c.strength - first.strength) > kSameValue)
                throw ConflictingArgumentsError(effect, first.argument, c.argument);
            lo = std::min(lo, c.baseline);
            hi = std::max(hi, c.baseline);
        }
        out.parents.push_back(cause);
        strengths.push_back(first.strength);
    }
    if (hi - lo > 1e-6) {
        out.warnings.push_back("leak for '" + effect + "' reconciled to " + text::format_short(hi) +
                               " from baselines spanning [" + text::format_short(lo) + ", " + text::format_short(hi) +
                               "]");
    }
    if (out.parents.size() == 1)
        out.cpt = Qualifier(FullTable{{hi, strengths[0]}});
    else
        out.cpt = Qualifier(NoisyOr{strengths, hi});
    return out;
}

CompileResult compile(std::span<const ArgumentFrame> input, const KnowledgeBase& kb) {
    if (input.empty()) throw ArgumentError("no arguments to compile");

    std::vector<ArgumentFrame> frames(input.begin(), input.end());
    std::sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    {
        std::vector<ArgumentFrame> unique;
        for (auto& f : frames) {
            if (!unique.empty() && unique.back().id == f.id) {
                if (!(unique.back() == f)) throw ConflictingArgumentsError(f.claim, f.id, f.id);
                continue;
            }
            unique.push_back(std::move(f));
        }
        frames = std::move(unique);
    }
    for (const auto& f : frames) validate_frame(f, kb);

    CompileResult result;
    std::map<std::string, std::vector<ArgumentFrame>> families;
    Provenance provenance;
    std::set<std::string> mentioned;
    for (const auto& f : frames) {
        families[f.effect()].push_back(f);
        for (const auto& g : f.grounds) {
            mentioned.insert(g);
            provenance[g].push_back(f.id);
        }
        mentioned.insert(f.claim);
        provenance[f.claim].push_back(f.id);
    }

    std::vector<NetNode> nodes;
    for (const auto& id : mentioned) {
        NetNode node;
        node.id = id;
        node.tier = kb.tier(id);
        auto fam = families.find(id);
        if (fam == families.end()) {
            auto p = kb.prior(id);
            if (!p) throw MissingPriorError(id);
            node.cpt = Qualifier::prior(*p);
        } else {
            const auto& group = fam->second;
            bool joint = std::any_of(group.begin(), group.end(), [](const ArgumentFrame& f) {
                return f.qualifier.is_full_table() && f.causes().size() > 1;
            });
            if (joint) {
                // A joint table cannot be combined; every contributor must agree with it.
                const ArgumentFrame* anchor = nullptr;
                for (const auto& f : group)
                    if (f.qualifier.is_full_table() && f.causes().size() > 1) anchor = anchor ? anchor : &f;
                for (const auto& f : group) {
                    if (&f == anchor) continue;
                    if (f.causes() != anchor->causes() || !same_qualifier(f.qualifier, anchor->qualifier))
                        throw ConflictingArgumentsError(id, anchor->id, f.id);
                }
                node.parents = anchor->causes();
                node.cpt = anchor->qualifier;
            } else {
                auto merged = merge_arguments_noisy_or(group);
                node.parents = std::move(merged.parents);
                node.cpt = std::move(merged.cpt);
                for (auto& w : merged.warnings) result.warnings.push_back(std::move(w));
            }
        }
        nodes.push_back(std::move(node));
    }
    result.net = BayesNet::from_nodes(std::move(nodes), std::move(provenance));
    return result;
}

// ---------------------------------------------------------------------------
// Arc reversal

BayesNet reverse_arc(const BayesNet& net, const std::string& from, const std::string& to) {
    const NetNode& a = net.node(from);
    const NetNode& b = net.node(to);
    if (std::find(b.parents.begin(), b.parents.end(), from) == b.parents.end())
        throw ArgumentError("no arc '" + from + "' -> '" + to + "'");

    std::set<std::string> shared(a.parents.begin(), a.parents.end());
    for (const auto& p : b.parents)
        if (p != from) shared.insert(p);
    std::vector<std::string> b_parents(shared.begin(), shared.end());
    std::set<std::string> a_set = shared;
    a_set.insert(to);
    std::vector<std::string> a_parents(a_set.begin(), a_set.end());

    std::vector<double> b_rows(std::size_t{1} << b_parents.size());
    std::vector<double> a_rows(std::size_t{1} << a_parents.size());
    std::map<std::string, bool> value;
    auto lookup = [&](const std::string& id) { return value.at(id); };

    for (std::uint64_t u = 0; u < b_rows.size(); ++u) {
        for (std::size_t k = 0; k < b_parents.size(); ++k)
            value[b_parents[k]] = (u >> (b_parents.size() - 1 - k)) & 1u;
        const double pa = a.cpt.prob_true(row_of(a.parents, lookup));
        value[from] = true;
        const double pb1 = b.cpt.prob_true(row_of(b.parents, lookup));
        value[from] = false;
        const double pb0 = b.cpt.prob_true(row_of(b.parents, lookup));
        value.erase(from);

        const double pb = pa * pb1 + (1.0 - pa) * pb0;
        b_rows[u] = std::clamp(pb, 0.0, 1.0);
        const double a_given_b = pb > 0.0 ? pa * pb1 / pb : pa;
        const double a_given_not_b = pb < 1.0 ? pa * (1.0 - pb1) / (1.0 - pb) : pa;

        for (bool bv : {false, true}) {
            value[to] = bv;
            a_rows[row_of(a_parents, lookup)] = std::clamp(bv ? a_given_b : a_given_not_b, 0.0, 1.0);
        }
        value.erase(to);
    }

    std::vector<NetNode> nodes = net.nodes();
    for (auto& n : nodes) {
        if (n.id == from) {
            n.parents = a_parents;
            n.cpt = Qualifier(FullTable{a_rows});
        } else if (n.id == to) {
            n.parents = b_parents;
            n.cpt = Qualifier(FullTable{b_rows});
        }
    }
    return BayesNet::from_nodes(std::move(nodes), net.provenance());
}

std::size_t cpt_entry_count(const BayesNet& net) {
    std::size_t total = 0;
    for (const auto& n : net.nodes()) total += std::size_t{1} << n.parents.size();
    return total;
}

// ---------------------------------------------------------------------------
// Text formats

std::string export_dot(const BayesNet& net) {
    std::ostringstream out;
    out << "digraph argnet {\n";
    out << "  rankdir=TB;\n";
    std::map<int, std::vector<std::string>> tiers;
    for (const auto& n : net.nodes()) tiers[n.tier].push_back(n.id);
    for (const auto& [tier, ids] : tiers) {
        out << "  { rank=same;";
        for (const auto& id : ids) out << " \"" << id << "\";";
        out << " }\n";
    }
    for (const auto& n : net.nodes())
        for (const auto& p : n.parents) out << "  \"" << p << "\" -> \"" << n.id << "\";\n";
    out << "}\n";
    return out.str();
}

std::string format_network(const BayesNet& net) {
    std::ostringstream out;
    out << "argnet-network 1\n";
    for (const auto& n : net.nodes()) {
        out << "node " << n.id << ' ' << n.tier << '\n';
        out << "parents";
        for (const auto& p : n.parents) out << ' ' << p;
        out << '\n';
        if (n.cpt.is_full_table()) {
            out << "full_table";
            for (double v : n.cpt.full_table().rows) out << ' ' << text::format_exact(v);
        } else {
            out << "noisy_or " << text::format_exact(n.cpt.noisy_or().leak);
            for (double v : n.cpt.noisy_or().link) out << ' ' << text::format_exact(v);
        }
        out << '\n';
        out << "provenance";
        if (auto it = net.provenance().find(n.id); it != net.provenance().end())
            for (const auto& a : it->second) out << ' ' << a;
        out << '\n';
        out << "end\n";
    }
    return out.str();
}

BayesNet parse_network(std::string_view source) {
    std::vector<NetNode> nodes;
    Provenance provenance;
    auto lines = text::split_lines(source);
    bool header = false;
    std::optional<NetNode> cur;
    bool have_cpt = false;
    for (std::size_t n = 0; n < lines.size(); ++n) {
        auto toks = text::tokenize(text::strip_comment(lines[n]));
        const std::size_t line = n + 1;
        if (toks.empty()) continue;
        auto key = toks[0].text;
        auto fail = [&](const std::string& what, std::size_t tok = 0) {
            throw ParseError(what, line, toks[std::min(tok, toks.size() - 1)].column);
        };
        auto number = [&](std::size_t i) {
            auto v = text::parse_double(toks[i].text);
            if (!v) fail("malformed number '" + std::string(toks[i].text) + "'", i);
            return *v;
        };
        if (!header) {
            if (key != "argnet-network" || toks.size() != 2 || toks[1].text != "1")
                fail("expected 'argnet-network 1'");
            header = true;
            continue;
        }
        if (key == "node") {
            if (cur) fail("node inside node");
            if (toks.size() != 3) fail("expected 'node <id> <tier>'");
            auto tier = text::parse_int(toks[2].text);
            if (!tier || *tier < 0) fail("bad tier", 2);
            cur.emplace();
            cur->id = std::string(toks[1].text);
            if (!text::valid_id(cur->id)) fail("invalid node id", 1);
            cur->tier = static_cast<int>(*tier);
            have_cpt = false;
            continue;
        }
        if (!cur) fail("directive outside a node");
        try {
            if (key == "parents") {
                for (std::size_t i = 1; i < toks.size(); ++i) cur->parents.emplace_back(toks[i].text);
            } else if (key == "full_table") {
                FullTable t;
                for (std::size_t i = 1; i < toks.size(); ++i) t.rows.push_back(number(i));
                cur->cpt = Qualifier(std::move(t));
                have_cpt = true;
            } else if (key == "noisy_or") {
                if (toks.size() < 2) fail("noisy_or needs a leak");
                NoisyOr no;
                no.leak = number(1);
                for (std::size_t i = 2; i < toks.size(); ++i) no.link.push_back(number(i));
                cur->cpt = Qualifier(std::move(no));
                have_cpt = true;
            } else if (key == "provenance") {
                auto& list = provenance[cur->id];
                for (std::size_t i = 1; i < toks.size(); ++i) list.emplace_back(toks[i].text);
                if (list.empty()) provenance.erase(cur->id);
            } else if (key == "end") {
                if (!have_cpt) fail("node '" + cur->id + "' has no CPT");
                nodes.push_back(std::move(*cur));
                cur.reset();
            } else {
                fail("unknown directive '" + std::string(key) + "'");
            }
        } catch (const ArgumentError& e) {
            fail(e.what());
        }
    }
    if (!header) throw ParseError("empty network document", 1, 1);
    if (cur) throw ParseError("unterminated node '" + cur->id + "'", lines.size(), 1);
    try {
        return BayesNet::from_nodes(std::move(nodes), std::move(provenance));
    } catch (const CycleError&) {
        throw;
    } catch (const Error& e) {
        throw ParseError(e.what());
    }
}

}  // namespace argnet
