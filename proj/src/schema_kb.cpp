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

#include "argnet/schema_kb.hpp"

#include <algorithm>
#include <sstream>

#include "argnet/errors.hpp"
#include "text_util.hpp"

namespace argnet {

std::set<std::string> Schema::link_propositions() const {
    std::set<std::string> out;
    for (const auto& l : links) {
        out.insert(l.cause);
        out.insert(l.effect);
    }
    return out;
}

std::string_view to_string(Direction d) { return d == Direction::causal ? "causal" : "diagnostic"; }

namespace {

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

std::string describe(const CausalLink& l) {
    return l.cause + " -> " + l.effect + " : " + text::format_exact(l.strength_given_cause) + " " +
           text::format_exact(l.strength_given_not_cause);
}

void index_schema(SchemaIndex& index, const Schema& s) {
    for (const auto& l : s.links) {
        index.forward[l.cause].insert(s.id);
        index.backward[l.effect].insert(s.id);
    }
}

}  // namespace

void KnowledgeBase::add_proposition(Proposition p) {
    if (!text::valid_id(p.id)) throw ValidationError("invalid proposition id '" + p.id + "'");
    if (p.tier < 0) throw ValidationError("negative tier for '" + p.id + "'");
    if (propositions_.count(p.id)) throw ValidationError("duplicate proposition '" + p.id + "'");
    auto id = p.id;
    propositions_.emplace(std::move(id), std::move(p));
}

void KnowledgeBase::check_link(const CausalLink& link, const std::string& schema) const {
    for (const auto* end : {&link.cause, &link.effect}) {
        if (!has_proposition(*end))
            throw ValidationError("schema '" + schema + "': link " + describe(link) + " references unknown proposition '" +
                                  *end + "'");
    }
    if (!in_unit(link.strength_given_cause) || !in_unit(link.strength_given_not_cause))
        throw ValidationError("schema '" + schema + "': link " + describe(link) + " has a strength outside [0,1]");
    if (tier(link.cause) >= tier(link.effect))
        throw ValidationError("schema '" + schema + "': tier violation in link " + describe(link) + " (cause tier " +
                              std::to_string(tier(link.cause)) + " >= effect tier " +
                              std::to_string(tier(link.effect)) + ")");
}

void KnowledgeBase::add_schema(Schema s) {
    if (!text::valid_id(s.id)) throw ValidationError("invalid schema id '" + s.id + "'");
    if (schemata_.count(s.id)) throw ValidationError("duplicate schema '" + s.id + "'");
    for (const auto& l : s.links) check_link(l, s.id);

    const auto linked = s.link_propositions();
    for (const auto& ex : s.implicit_exceptions) {
        if (!has_proposition(ex.proposition))
            throw ValidationError("schema '" + s.id + "': unknown implicit exception '" + ex.proposition + "'");
        if (linked.count(ex.proposition))
            throw ValidationError("schema '" + s.id + "': implicit exception '" + ex.proposition +
                                  "' is already a link proposition");
        for (const auto& f : ex.fragments) {
            check_link(f, s.id);
            if (f.cause != ex.proposition && f.effect != ex.proposition)
                throw ValidationError("schema '" + s.id + "': fragment " + describe(f) + " does not involve '" +
                                      ex.proposition + "'");
        }
    }
    for (const auto& [id, p] : s.prior_assignments) {
        if (!has_proposition(id)) throw ValidationError("schema '" + s.id + "': prior for unknown proposition '" + id + "'");
        if (!in_unit(p)) throw ValidationError("schema '" + s.id + "': prior for '" + id + "' outside [0,1]");
        auto it = priors_.find(id);
        if (it != priors_.end() && it->second != p)
            throw ValidationError("schema '" + s.id + "': prior for '" + id + "' contradicts an earlier schema");
    }
    for (const auto& pre : s.preconditions) {
        if (!has_proposition(pre))
            throw ValidationError("schema '" + s.id + "': unknown precondition '" + pre + "'");
    }

    for (const auto& [id, p] : s.prior_assignments) priors_[id] = p;
    index_schema(index_, s);
    auto id = s.id;
    schemata_.emplace(std::move(id), std::move(s));
}

void KnowledgeBase::add_schema_set(const std::string& id, std::vector<std::string> members) {
    if (!text::valid_id(id)) throw ValidationError("invalid schema set id '" + id + "'");
    if (schema_sets_.count(id)) throw ValidationError("duplicate schema set '" + id + "'");
    for (const auto& m : members)
        if (!has_schema(m)) throw ValidationError("schema set '" + id + "': unknown member '" + m + "'");
    schema_sets_.emplace(id, std::move(members));
}

bool KnowledgeBase::has_proposition(std::string_view id) const { return propositions_.find(id) != propositions_.end(); }

const Proposition& KnowledgeBase::proposition(std::string_view id) const {
    auto it = propositions_.find(id);
    if (it == propositions_.end()) throw UnknownIdError(ErrorKind::compile, std::string(id), "proposition");
    return it->second;
}

bool KnowledgeBase::has_schema(std::string_view id) const { return schemata_.find(id) != schemata_.end(); }

const Schema& KnowledgeBase::schema(std::string_view id) const {
    auto it = schemata_.find(id);
    if (it == schemata_.end()) throw UnknownIdError(ErrorKind::compile, std::string(id), "schema");
    return it->second;
}

bool KnowledgeBase::has_schema_set(std::string_view id) const { return schema_sets_.find(id) != schema_sets_.end(); }

const std::vector<std::string>& KnowledgeBase::schema_set(std::string_view id) const {
    auto it = schema_sets_.find(id);
    if (it == schema_sets_.end()) throw UnknownIdError(ErrorKind::compile, std::string(id), "schema set");
    return it->second;
}

SchemaIndex KnowledgeBase::rebuild_index() const {
    SchemaIndex index;
    for (const auto& [id, s] : schemata_) index_schema(index, s);
    return index;
}

std::optional<double> KnowledgeBase::prior(std::string_view id) const {
    auto it = priors_.find(id);
    if (it == priors_.end()) return std::nullopt;
    return it->second;
}

// ---------------------------------------------------------------------------
// Parsing

namespace {

struct PendingSchema {
    Schema schema;
    std::size_t line = 0;
    std::vector<std::size_t> link_lines;
    std::vector<std::pair<CausalLink, std::size_t>> fragment_lines;
    std::optional<std::size_t> backing_line;
};

struct PendingSet {
    std::string id;
    std::vector<std::string> members;
    std::vector<std::size_t> member_lines;
    std::size_t line = 0;
};

struct Cursor {
    std::vector<text::Token> tokens;
    std::size_t line = 0;

    [[noreturn]] void fail(const std::string& what, std::size_t tok) const {
        std::size_t col = tok < tokens.size() ? tokens[tok].column : (tokens.empty() ? 1 : tokens.back().column);
        throw ParseError(what, line, col);
    }

    std::string id_at(std::size_t i, const char* what) const {
        if (i >= tokens.size()) fail(std::string("expected ") + what, i);
        auto t = tokens[i].text;
        if (!text::valid_id(t)) fail(std::string("invalid ") + what + " '" + std::string(t) + "'", i);
        return std::string(t);
    }

    void expect(std::size_t i, std::string_view literal) const {
        if (i >= tokens.size() || tokens[i].text != literal)
            fail("expected '" + std::string(literal) + "'", i);
    }

    double prob_at(std::size_t i) const {
        if (i >= tokens.size()) fail("expected probability", i);
        auto v = text::parse_double(tokens[i].text);
        if (!v) fail("malformed number '" + std::string(tokens[i].text) + "'", i);
        return *v;
    }

    // link <cause> -> <effect> : <p> <q>, starting at token i (the 'link' keyword).
    CausalLink link_at(std::size_t i) const {
        expect(i, "link");
        CausalLink l;
        l.cause = id_at(i + 1, "cause id");
        expect(i + 2, "->");
        l.effect = id_at(i + 3, "effect id");
        expect(i + 4, ":");
        l.strength_given_cause = prob_at(i + 5);
        l.strength_given_not_cause = prob_at(i + 6);
        return l;
    }
};

enum class Section { none, propositions, schema, schema_set };

}  // namespace

KnowledgeBase load_kb(std::string_view source) {
    std::vector<std::pair<Proposition, std::size_t>> props;
    std::vector<PendingSchema> schemas;
    std::vector<PendingSet> sets;
    Section section = Section::none;

    auto lines = text::split_lines(source);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        Cursor c{text::tokenize(text::strip_comment(lines[n])), n + 1};
        if (c.tokens.empty()) continue;
        auto head = c.tokens[0].text;

        if (head.front() == '[') {
            // Section headers: [propositions], [schema <id>], [schema_set <id>]
            std::string joined;
            for (const auto& t : c.tokens) joined += std::string(t.text) + " ";
            joined.pop_back();
            if (joined.back() != ']') c.fail("unterminated section header", c.tokens.size() - 1);
            auto body = joined.substr(1, joined.size() - 2);
            auto inner = text::tokenize(body);
            if (inner.size() == 1 && inner[0].text == "propositions") {
                section = Section::propositions;
            } else if (inner.size() == 2 && inner[0].text == "schema") {
                if (!text::valid_id(inner[1].text)) c.fail("invalid schema id", 0);
                section = Section::schema;
                PendingSchema ps;
                ps.schema.id = std::string(inner[1].text);
                ps.line = c.line;
                schemas.push_back(std::move(ps));
            } else if (inner.size() == 2 && inner[0].text == "schema_set") {
                if (!text::valid_id(inner[1].text)) c.fail("invalid schema set id", 0);
                section = Section::schema_set;
                sets.push_back({std::string(inner[1].text), {}, {}, c.line});
            } else {
                c.fail("unknown section '" + body + "'", 0);
            }
            continue;
        }

        switch (section) {
            case Section::none:
                c.fail("content outside any section", 0);
            case Section::propositions: {
                Proposition p;
                p.id = c.id_at(0, "proposition id");
                if (c.tokens.size() < 2) c.fail("expected tier", 1);
                auto tier = text::parse_int(c.tokens[1].text);
                if (!tier || *tier < 0) c.fail("tier must be a non-negative integer", 1);
                p.tier = static_cast<int>(*tier);
                for (std::size_t i = 2; i < c.tokens.size(); ++i) {
                    if (i > 2) p.label += ' ';
                    p.label += c.tokens[i].text;
                }
                props.emplace_back(std::move(p), c.line);
                break;
            }
            case Section::schema: {
                auto& s = schemas.back().schema;
                if (head == "link") {
                    if (c.tokens.size() != 7) c.fail("link takes '<cause> -> <effect> : <p> <q>'", 0);
                    s.links.push_back(c.link_at(0));
                    schemas.back().link_lines.push_back(c.line);
                } else if (head == "prior") {
                    if (c.tokens.size() != 4) c.fail("prior takes '<id> : <p>'", 0);
                    auto id = c.id_at(1, "proposition id");
                    c.expect(2, ":");
                    auto p = c.prob_at(3);
                    if (s.prior_assignments.count(id)) c.fail("duplicate prior for '" + id + "'", 1);
                    s.prior_assignments[id] = p;
                } else if (head == "implicit_exception") {
                    auto id = c.id_at(1, "exception id");
                    c.expect(2, ":");
                    if (c.tokens.size() != 10 && c.tokens.size() != 11)
                        c.fail("implicit_exception takes '<id> : link ... [exportable]'", 0);
                    auto frag = c.link_at(3);
                    schemas.back().fragment_lines.emplace_back(frag, c.line);
                    bool exportable = false;
                    if (c.tokens.size() == 11) {
                        if (c.tokens[10].text != "exportable") c.fail("expected 'exportable'", 10);
                        exportable = true;
                    }
                    auto it = std::find_if(s.implicit_exceptions.begin(), s.implicit_exceptions.end(),
                                           [&](const ImplicitException& e) { return e.proposition == id; });
                    if (it == s.implicit_exceptions.end()) {
                        s.implicit_exceptions.push_back({id, {frag}, exportable});
                    } else {
                        it->fragments.push_back(frag);
                        it->exportable = it->exportable || exportable;
                    }
                } else if (head == "backing") {
                    if (c.tokens.size() != 2) c.fail("backing takes one schema set id", 0);
                    if (s.backing) c.fail("duplicate backing", 0);
                    s.backing = c.id_at(1, "schema set id");
                    schemas.back().backing_line = c.line;
                } else if (head == "precondition") {
                    if (c.tokens.size() != 2) c.fail("precondition takes one proposition id", 0);
                    s.preconditions.push_back(c.id_at(1, "proposition id"));
                } else {
                    c.fail("unknown schema directive '" + std::string(head) + "'", 0);
                }
                break;
            }
            case Section::schema_set: {
                if (head != "member" || c.tokens.size() != 2) c.fail("expected 'member <schema-id>'", 0);
                sets.back().members.push_back(c.id_at(1, "schema id"));
                sets.back().member_lines.push_back(c.line);
                break;
            }
        }
    }

    KnowledgeBase kb;
    for (auto& [p, line] : props) {
        try {
            kb.add_proposition(std::move(p));
        } catch (const ValidationError& e) {
            throw ValidationError(e.what(), line, 1);
        }
    }
    for (auto& ps : schemas) {
        // Per-directive checks first so errors point at the offending line.
        const auto& s = ps.schema;
        auto relocate = [](std::size_t line, auto&& check) {
            try {
                check();
            } catch (const ValidationError& e) {
                throw ValidationError(e.what(), line, 1);
            }
        };
        for (std::size_t i = 0; i < s.links.size(); ++i)
            relocate(ps.link_lines[i], [&] { kb.check_link(s.links[i], s.id); });
        for (const auto& [frag, line] : ps.fragment_lines)
            relocate(line, [&] { kb.check_link(frag, s.id); });
        relocate(ps.line, [&] { kb.add_schema(s); });
    }
    for (auto& set : sets) {
        try {
            kb.add_schema_set(set.id, set.members);
        } catch (const ValidationError& e) {
            throw ValidationError(e.what(), set.line, 1);
        }
    }
    for (const auto& ps : schemas) {
        if (ps.schema.backing && !kb.has_schema_set(*ps.schema.backing))
            throw ValidationError("schema '" + ps.schema.id + "': unknown backing '" + *ps.schema.backing + "'",
                                  *ps.backing_line, 1);
    }
    return kb;
}

KnowledgeBase load_kb_file(const std::string& path) { return load_kb(text::read_file(path)); }

std::string format_kb(const KnowledgeBase& kb) {
    std::ostringstream out;
    auto link = [](const CausalLink& l) {
        return "link " + l.cause + " -> " + l.effect + " : " + text::format_exact(l.strength_given_cause) + " " +
               text::format_exact(l.strength_given_not_cause);
    };
    if (!kb.propositions().empty()) {
        out << "[propositions]\n";
        for (const auto& [id, p] : kb.propositions()) {
            out << id << ' ' << p.tier;
            if (!p.label.empty()) out << ' ' << p.label;
            out << '\n';
        }
    }
    for (const auto& [id, s] : kb.schemata()) {
        out << "\n[schema " << id << "]\n";
        for (const auto& l : s.links) out << link(l) << '\n';
        for (const auto& [pid, p] : s.prior_assignments) out << "prior " << pid << " : " << text::format_exact(p) << '\n';
        for (const auto& ex : s.implicit_exceptions) {
            for (const auto& f : ex.fragments) {
                out << "implicit_exception " << ex.proposition << " : " << link(f);
                if (ex.exportable) out << " exportable";
                out << '\n';
            }
        }
        for (const auto& pre : s.preconditions) out << "precondition " << pre << '\n';
        if (s.backing) out << "backing " << *s.backing << '\n';
    }
    for (const auto& [id, members] : kb.schema_sets()) {
        out << "\n[schema_set " << id << "]\n";
        for (const auto& m : members) out << "member " << m << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------------------
// Activation

namespace {

std::vector<SchemaActivation> finish(std::map<std::string, SchemaActivation>& acts) {
    std::vector<SchemaActivation> out;
    out.reserve(acts.size());
    for (auto& [id, a] : acts) {
        std::sort(a.matched.begin(), a.matched.end());
        a.matched.erase(std::unique(a.matched.begin(), a.matched.end()), a.matched.end());
        out.push_back(std::move(a));
    }
    return out;
}

}  // namespace

std::vector<SchemaActivation> activate_forward(const KnowledgeBase& kb, const std::set<std::string>& grounds,
                                               const ActivationOptions& options) {
    for (const auto& g : grounds)
        if (!kb.has_proposition(g)) throw UnknownIdError(ErrorKind::compile, g, "proposition");

    std::map<std::string, SchemaActivation> acts;
    std::set<std::string> reached = grounds;
    std::set<std::string> frontier = grounds;
    for (int level = 0; level < options.depth && !frontier.empty(); ++level) {
        std::set<std::string> next;
        for (const auto& g : frontier) {
            auto hit = kb.index().forward.find(g);
            if (hit == kb.index().forward.end()) continue;
            for (const auto& sid : hit->second) {
                auto& act = acts[sid];
                act.schema_id = sid;
                act.direction = Direction::causal;
                for (const auto& l : kb.schema(sid).links) {
                    if (l.cause != g) continue;
                    act.matched.push_back(l);
                    act.triggers.insert(g);
                    if (!reached.count(l.effect)) next.insert(l.effect);
                }
            }
        }
        reached.insert(next.begin(), next.end());
        frontier = std::move(next);
    }
    return finish(acts);
}

std::vector<SchemaActivation> activate_backward(const KnowledgeBase& kb, const std::string& claim,
                                                const ActivationOptions& options) {
    if (!kb.has_proposition(claim)) throw UnknownIdError(ErrorKind::compile, claim, "proposition");

    std::map<std::string, SchemaActivation> acts;
    std::set<std::string> reached{claim};
    std::set<std::string> frontier{claim};
    for (int level = 0; level < options.depth && !frontier.empty(); ++level) {
        std::set<std::string> next;
        for (const auto& c : frontier) {
            auto hit = kb.index().backward.find(c);
            if (hit == kb.index().backward.end()) continue;
            for (const auto& sid : hit->second) {
                auto& act = acts[sid];
                act.schema_id = sid;
                act.direction = Direction::diagnostic;
                for (const auto& l : kb.schema(sid).links) {
                    if (l.effect != c) continue;
                    act.matched.push_back(l);
                    act.triggers.insert(c);
                    if (!reached.count(l.cause)) next.insert(l.cause);
                }
            }
        }
        reached.insert(next.begin(), next.end());
        frontier = std::move(next);
    }
    return finish(acts);
}

std::vector<ExceptionDescriptor> expand_exceptions(const KnowledgeBase& kb, const std::string& schema_id,
                                                   ExceptionTier tier, const ExpansionOptions& options) {
    const Schema& schema = kb.schema(schema_id);
    std::vector<ExceptionDescriptor> out;

    if (tier == ExceptionTier::implicit) {
        for (const auto& ex : schema.implicit_exceptions)
            out.push_back({ex.proposition, ex.fragments, ex.exportable, ExceptionTier::implicit, schema_id});
        return out;
    }

    if (!schema.backing) throw NoBackingError(schema_id);
    const std::set<std::string> existing = options.existing ? *options.existing : schema.link_propositions();

    // Breadth-first over backing sets, one level per unit of depth.
    std::vector<std::string> members;
    std::set<std::string> seen_sets;
    std::vector<std::string> frontier{*schema.backing};
    for (int level = 0; level < options.depth && !frontier.empty(); ++level) {
        std::vector<std::string> next;
        for (const auto& set_id : frontier) {
            if (!seen_sets.insert(set_id).second) continue;
            for (const auto& m : kb.schema_set(set_id)) {
                if (std::find(members.begin(), members.end(), m) != members.end()) continue;
                members.push_back(m);
                if (const auto& b = kb.schema(m).backing) next.push_back(*b);
            }
        }
        frontier = std::move(next);
    }

    std::map<std::string, ExceptionDescriptor> found;
    for (const auto& m : members) {
        for (const auto& l : kb.schema(m).links) {
            for (const auto& [self, other] : {std::pair{l.cause, l.effect}, std::pair{l.effect, l.cause}}) {
                if (existing.count(self) || !existing.count(other)) continue;
                auto& d = found[self];
                if (d.proposition.empty()) {
                    d.proposition = self;
                    d.tier = ExceptionTier::background;
                    d.source_schema = m;
                }
                if (std::find(d.fragments.begin(), d.fragments.end(), l) == d.fragments.end()) d.fragments.push_back(l);
            }
        }
    }
    for (auto& [id, d] : found) out.push_back(std::move(d));
    return out;
}

}  // namespace argnet
