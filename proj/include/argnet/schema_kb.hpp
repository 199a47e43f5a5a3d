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

#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace argnet {

// A binary proposition. Causes sit on strictly lower tiers than their effects.
struct Proposition {
    std::string id;
    int tier = 0;
    std::string label;

    bool operator==(const Proposition&) const = default;
};

// strength_given_cause = P(effect | cause), strength_given_not_cause = P(effect | not cause).
struct CausalLink {
    std::string cause;
    std::string effect;
    double strength_given_cause = 0.0;
    double strength_given_not_cause = 0.0;

    bool operator==(const CausalLink&) const = default;
    auto operator<=>(const CausalLink&) const = default;
};

// An exception the schema knows about but does not model. `fragments` are the
// links that would wire it into the model if it were promoted.
struct ImplicitException {
    std::string proposition;
    std::vector<CausalLink> fragments;
    bool exportable = false;

    bool operator==(const ImplicitException&) const = default;
};

struct Schema {
    std::string id;
    std::vector<CausalLink> links;
    std::vector<ImplicitException> implicit_exceptions;
    std::optional<std::string> backing;
    std::map<std::string, double> prior_assignments;
    // Propositions that must hold for the schema to apply.
    std::vector<std::string> preconditions;

    bool operator==(const Schema&) const = default;

    // Ids appearing as cause or effect of `links`.
    std::set<std::string> link_propositions() const;
};

struct SchemaIndex {
    std::map<std::string, std::set<std::string>> forward;   // cause  -> schema ids
    std::map<std::string, std::set<std::string>> backward;  // effect -> schema ids

    bool operator==(const SchemaIndex&) const = default;
};

// Immutable after construction; every accessor is const and thread-safe.
class KnowledgeBase {
public:
    KnowledgeBase() = default;

    // Mutators used while loading. Each validates against what is already present,
    // so propositions must be added before the schemata that reference them.
    void add_proposition(Proposition p);
    void add_schema(Schema s);
    void add_schema_set(const std::string& id, std::vector<std::string> members);

    bool has_proposition(std::string_view id) const;
    const Proposition& proposition(std::string_view id) const;
    const std::map<std::string, Proposition, std::less<>>& propositions() const { return propositions_; }

    bool has_schema(std::string_view id) const;
    const Schema& schema(std::string_view id) const;
    const std::map<std::string, Schema, std::less<>>& schemata() const { return schemata_; }

    bool has_schema_set(std::string_view id) const;
    const std::vector<std::string>& schema_set(std::string_view id) const;
    const std::map<std::string, std::vector<std::string>, std::less<>>& schema_sets() const { return schema_sets_; }

    const SchemaIndex& index() const { return index_; }
    SchemaIndex rebuild_index() const;

    // Prior for a root proposition, taken from any schema that assigns one.
    std::optional<double> prior(std::string_view id) const;

    int tier(std::string_view id) const { return proposition(id).tier; }

    // Throws ValidationError if the link dangles, has a strength outside [0,1],
    // or does not run from a lower tier to a higher one.
    void check_link(const CausalLink& link, const std::string& schema) const;

    bool operator==(const KnowledgeBase&) const = default;

private:
    std::map<std::string, Proposition, std::less<>> propositions_;
    std::map<std::string, Schema, std::less<>> schemata_;
    std::map<std::string, std::vector<std::string>, std::less<>> schema_sets_;
    std::map<std::string, double, std::less<>> priors_;
    SchemaIndex index_;
};

// Parses the line-oriented KB format (documented in docs/kb-format.md).
KnowledgeBase load_kb(std::string_view source);
KnowledgeBase load_kb_file(const std::string& path);

// Canonical text form; load_kb(format_kb(kb)) == kb.
std::string format_kb(const KnowledgeBase& kb);

enum class Direction { causal, diagnostic };

std::string_view to_string(Direction d);

struct SchemaActivation {
    std::string schema_id;
    Direction direction = Direction::causal;
    std::vector<CausalLink> matched;    // sorted, unique
    std::set<std::string> triggers;     // grounds (forward) or claims (backward)

    bool operator==(const SchemaActivation&) const = default;
};

struct ActivationOptions {
    // Levels of chaining. 1 activates only schemata touching the inputs; each
    // further level feeds the newly reached propositions back in.
    int depth = 1;
};

std::vector<SchemaActivation> activate_forward(const KnowledgeBase& kb, const std::set<std::string>& grounds,
                                               const ActivationOptions& options = {});

std::vector<SchemaActivation> activate_backward(const KnowledgeBase& kb, const std::string& claim,
                                                const ActivationOptions& options = {});

enum class ExceptionTier { implicit, background };

struct ExceptionDescriptor {
    std::string proposition;
    std::vector<CausalLink> fragments;
    bool exportable = false;
    ExceptionTier tier = ExceptionTier::implicit;
    std::string source_schema;

    bool operator==(const ExceptionDescriptor&) const = default;
};

struct ExpansionOptions {
    // Propositions already modelled by the caller. Background expansion skips
    // them. When absent, the schema's own link propositions are used.
    std::optional<std::set<std::string>> existing;
    // How many backing levels to follow for background expansion.
    int depth = 1;
};

std::vector<ExceptionDescriptor> expand_exceptions(const KnowledgeBase& kb, const std::string& schema_id,
                                                   ExceptionTier tier, const ExpansionOptions& options = {});

}  // namespace argnet
