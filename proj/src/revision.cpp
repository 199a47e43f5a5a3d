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

#include "argnet/revision.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "argnet/errors.hpp"
#include "text_util.hpp"

namespace argnet {

std::vector<double> default_sensitivity_grid() {
    std::vector<double> g{0.01};
    for (int i = 1; i <= 19; ++i) g.push_back(i * 5 / 100.0);
    g.push_back(0.99);
    return g;
}

std::string_view to_string(CandidateKind kind) {
    switch (kind) {
        case CandidateKind::promote_rebuttal: return "promote_rebuttal";
        case CandidateKind::promote_implicit_exception: return "promote_implicit_exception";
        case CandidateKind::promote_background_exception: return "promote_background_exception";
        case CandidateKind::adjust_qualifier: return "adjust_qualifier";
    }
    return "?";
}

namespace {

bool replicas(const ArgumentFrame& a, const ArgumentFrame& b) {
    if (a.warrant != b.warrant || a.direction != b.direction || a.backing != b.backing) return false;
    if (a.qualifier != b.qualifier || a.rebuttals != b.rebuttals) return false;
    return a.direction == Direction::causal ? a.grounds == b.grounds : a.claim == b.claim;
}

std::vector<ArgumentFrame> sorted_frames(std::span<const ArgumentFrame> frames) {
    std::vector<ArgumentFrame> out(frames.begin(), frames.end());
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    return out;
}

std::vector<std::size_t> member_positions(const std::vector<ArgumentFrame>& frames,
                                          const std::vector<std::string>& members) {
    std::vector<std::size_t> pos;
    for (std::size_t i = 0; i < frames.size(); ++i)
        if (std::binary_search(members.begin(), members.end(), frames[i].id)) pos.push_back(i);
    return pos;
}

void set_qualifier(ArgumentFrame& f, const Qualifier& q) {
    f.qualifier = q;
    // Keep a diagnostic frame's rule strength in step with its table.
    if (f.likelihood_ratio && q.is_full_table() && q.full_table().rows.size() == 2) {
        const auto& rows = q.full_table().rows;
        if (rows[0] > 0.0)
            f.likelihood_ratio = LikelihoodRatio{rows[1] / rows[0], rows[0]};
        else
            f.likelihood_ratio.reset();
    }
}

Evidence restrict(const Evidence& ev, const BayesNet& net) {
    Evidence out;
    for (const auto& [id, v] : ev)
        if (net.contains(id)) out.emplace(id, v);
    return out;
}

// Causal frames wiring `fragments` into a model, one per effect.
std::vector<ArgumentFrame> promotion_frames(const KnowledgeBase& kb, const std::string& schema_id,
                                            std::vector<CausalLink> fragments) {
    std::sort(fragments.begin(), fragments.end());
    fragments.erase(std::unique(fragments.begin(), fragments.end()), fragments.end());
    std::map<std::string, std::vector<CausalLink>> by_effect;
    for (const auto& l : fragments) by_effect[l.effect].push_back(l);

    std::vector<ArgumentFrame> out;
    for (auto& [effect, links] : by_effect) {
        std::sort(links.begin(), links.end(), [](const auto& a, const auto& b) { return a.cause < b.cause; });
        ArgumentFrame f;
        for (const auto& l : links) f.grounds.push_back(l.cause);
        f.claim = effect;
        f.qualifier = qualifier_from_causal_strength(links);
        f.warrant = schema_id;
        f.backing = kb.schema(schema_id).backing;
        f.direction = Direction::causal;
        f.id = make_argument_id(f.warrant, f.grounds, f.claim, f.direction);
        out.push_back(std::move(f));
    }
    return out;
}

const ImplicitException* find_exception(const KnowledgeBase& kb, const std::string& schema_id,
                                        const std::string& proposition) {
    if (!kb.has_schema(schema_id)) return nullptr;
    for (const auto& ex : kb.schema(schema_id).implicit_exceptions)
        if (ex.proposition == proposition) return &ex;
    return nullptr;
}

bool falsified(const Schema& s, const Evidence& ev) {
    for (const auto& p : s.preconditions)
        if (auto it = ev.find(p); it != ev.end() && !it->second) return true;
    return false;
}

bool warrant_invalid(const KnowledgeBase& kb, const ArgumentFrame& f, const Evidence& ev) {
    if (!kb.has_schema(f.warrant)) return false;
    const Schema& s = kb.schema(f.warrant);
    if (falsified(s, ev)) return true;
    if (s.backing && kb.has_schema_set(*s.backing))
        for (const auto& m : kb.schema_set(*s.backing))
            if (falsified(kb.schema(m), ev)) return true;
    return false;
}

std::string fmt(double v) { return text::format_short(v); }

}  // namespace

std::vector<ArgumentGroup> group_arguments(std::span<const ArgumentFrame> frames) {
    const auto sorted = sorted_frames(frames);
    std::vector<ArgumentGroup> groups;
    std::vector<const ArgumentFrame*> heads;
    for (const auto& f : sorted) {
        std::size_t g = 0;
        while (g < heads.size() && !replicas(*heads[g], f)) ++g;
        if (g == heads.size()) {
            heads.push_back(&f);
            groups.push_back({f.id, {}});
        }
        groups[g].members.push_back(f.id);
    }

    std::set<std::string> used;
    for (std::size_t g = 0; g < groups.size(); ++g) {
        if (groups[g].members.size() == 1) {
            used.insert(groups[g].id);
            continue;
        }
        const ArgumentFrame& h = *heads[g];
        std::string id = h.direction == Direction::causal
                             ? make_argument_id(h.warrant, h.grounds, "*", Direction::causal)
                             : make_argument_id(h.warrant, {"*"}, h.claim, Direction::diagnostic);
        std::string unique = id;
        for (int k = 2; used.count(unique); ++k) unique = id + "#" + std::to_string(k);
        used.insert(unique);
        groups[g].id = unique;
    }
    return groups;
}

std::vector<SuspicionScore> suspect_arguments(const BayesNet& net, std::span<const ArgumentFrame> frames,
                                              const KnowledgeBase& kb, const Evidence& evidence,
                                              const RevisionConfig& config) {
    const Engine engine;
    const auto sorted = sorted_frames(frames);
    const double current = surprise_index(net, evidence, config.threshold, engine).lr_star;

    std::vector<SuspicionScore> scores;
    for (const auto& group : group_arguments(sorted)) {
        SuspicionScore s;
        s.argument_id = group.id;
        s.members = group.members;
        s.current_lr_star = current;
        s.best_lr_star = current;

        const auto pos = member_positions(sorted, group.members);
        const ArgumentFrame& head = sorted[pos.front()];

        const auto params = head.qualifier.parameters();
        for (std::size_t j = 0; j < params.size(); ++j) {
            for (double v : config.grid) {
                if (v == params[j]) continue;
                auto perturbed = sorted;
                const Qualifier q = head.qualifier.with_parameter(j, v);
                for (auto p : pos) set_qualifier(perturbed[p], q);
                double lr;
                try {
                    const BayesNet alt = compile(perturbed, kb).net;
                    lr = surprise_index(alt, evidence, config.threshold, engine).lr_star;
                } catch (const Error&) {
                    continue;
                }
                if (lr > s.best_lr_star) {
                    s.best_lr_star = lr;
                    s.best_perturbation = Perturbation{j, v};
                }
            }
        }
        s.sensitivity = std::max(0.0, s.best_lr_star - current);

        for (const auto& r : head.rebuttals) {
            double p = 0.0;
            if (auto it = evidence.find(r); it != evidence.end()) {
                p = it->second ? 1.0 : 0.0;
            } else if (net.contains(r)) {
                p = engine.posterior(net, r, evidence);
            } else if (const auto* ex = find_exception(kb, head.warrant, r)) {
                // One-step extension: the current frames plus the rebuttal's fragments.
                auto extended = sorted;
                for (auto& f : promotion_frames(kb, head.warrant, ex->fragments)) extended.push_back(std::move(f));
                try {
                    const BayesNet ext = compile(extended, kb).net;
                    p = engine.posterior(ext, r, restrict(evidence, ext));
                } catch (const ImpossibleEvidenceError&) {
                    throw;
                } catch (const Error&) {
                    p = 0.0;
                }
            }
            if (!s.top_rebuttal || p > s.rebuttal_posterior) {
                s.rebuttal_posterior = p;
                s.top_rebuttal = r;
            }
        }
        s.rebuttal_probable = s.rebuttal_posterior > config.rebuttal_cutoff;

        for (auto p : pos) s.warrant_invalid = s.warrant_invalid || warrant_invalid(kb, sorted[p], evidence);
        scores.push_back(std::move(s));
    }

    std::stable_sort(scores.begin(), scores.end(), [](const SuspicionScore& a, const SuspicionScore& b) {
        if (a.warrant_invalid != b.warrant_invalid) return a.warrant_invalid;
        if (a.rebuttal_posterior != b.rebuttal_posterior) return a.rebuttal_posterior > b.rebuttal_posterior;
        if (a.sensitivity != b.sensitivity) return a.sensitivity > b.sensitivity;
        return a.argument_id < b.argument_id;
    });
    return scores;
}

std::vector<RevisionCandidate> propose_revisions(const KnowledgeBase& kb, std::span<const SuspicionScore> suspects,
                                                 std::span<const ArgumentFrame> frames, std::size_t max_candidates,
                                                 std::vector<std::string>* dropped, int expansion_depth) {
    std::vector<RevisionCandidate> out;
    if (max_candidates == 0) return out;
    const auto sorted = sorted_frames(frames);

    std::set<std::string> modelled;
    for (const auto& f : sorted) {
        modelled.insert(f.claim);
        modelled.insert(f.grounds.begin(), f.grounds.end());
    }

    auto drop = [&](CandidateKind kind, const std::string& target, const std::string& why) {
        if (dropped) dropped->push_back(std::string(to_string(kind)) + " for " + target + ": " + why);
    };

    auto offer = [&](CandidateKind kind, const std::string& target, std::vector<ArgumentFrame> next,
                     std::string description) {
        if (out.size() >= max_candidates) return;
        std::sort(next.begin(), next.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        for (const auto& c : out)
            if (c.frames == next) {
                drop(kind, target, "duplicate of an earlier candidate");
                return;
            }
        RevisionCandidate c;
        c.kind = kind;
        c.target = target;
        c.description = std::move(description);
        try {
            c.net = compile(next, kb).net;
        } catch (const Error& e) {
            drop(kind, target, e.what());
            return;
        }
        c.frames = std::move(next);
        out.push_back(std::move(c));
    };

    // Add the fragments of `proposition` and, if it was a rebuttal of the
    // target, drop it from the rebuttal slot now that it is modelled.
    auto promote = [&](const std::vector<std::size_t>& pos, const std::string& schema_id,
                       const std::string& proposition, const std::vector<CausalLink>& fragments) {
        auto next = sorted;
        for (auto p : pos) std::erase(next[p].rebuttals, proposition);
        for (auto& f : promotion_frames(kb, schema_id, fragments)) next.push_back(std::move(f));
        return next;
    };

    for (const auto& s : suspects) {
        if (out.size() >= max_candidates) break;
        const auto pos = member_positions(sorted, s.members);
        if (pos.empty()) continue;
        const ArgumentFrame& head = sorted[pos.front()];
        const bool known = kb.has_schema(head.warrant);

        for (const auto& r : head.rebuttals) {
            const auto* ex = find_exception(kb, head.warrant, r);
            if (!ex) {
                drop(CandidateKind::promote_rebuttal, s.argument_id, "no fragments for rebuttal '" + r + "'");
                continue;
            }
            offer(CandidateKind::promote_rebuttal, s.argument_id, promote(pos, head.warrant, r, ex->fragments),
                  "promote rebuttal " + r);
        }

        if (known) {
            for (const auto& ex : expand_exceptions(kb, head.warrant, ExceptionTier::implicit)) {
                if (std::binary_search(head.rebuttals.begin(), head.rebuttals.end(), ex.proposition)) continue;
                offer(CandidateKind::promote_implicit_exception, s.argument_id,
                      promote(pos, head.warrant, ex.proposition, ex.fragments),
                      "promote implicit exception " + ex.proposition);
            }
            if (kb.schema(head.warrant).backing) {
                ExpansionOptions opts;
                opts.existing = modelled;
                opts.depth = expansion_depth;
                for (const auto& ex : expand_exceptions(kb, head.warrant, ExceptionTier::background, opts))
                    offer(CandidateKind::promote_background_exception, s.argument_id,
                          promote(pos, ex.source_schema, ex.proposition, ex.fragments),
                          "promote background exception " + ex.proposition + " from " + ex.source_schema);
            }
        }

        if (s.best_perturbation && s.sensitivity > 0.0) {
            const auto& bp = *s.best_perturbation;
            const double old = head.qualifier.parameters().at(bp.parameter);
            auto next = sorted;
            const Qualifier q = head.qualifier.with_parameter(bp.parameter, bp.value);
            for (auto p : pos) set_qualifier(next[p], q);
            offer(CandidateKind::adjust_qualifier, s.argument_id, std::move(next),
                  "set qualifier parameter " + std::to_string(bp.parameter) + " from " + fmt(old) + " to " +
                      fmt(bp.value));
        }
    }
    return out;
}

RevisionDecision evaluate_revision(const BayesNet& current, const RevisionCandidate& candidate,
                                   const Evidence& evidence, double acceptance_ratio) {
    Evidence common;
    for (const auto& [id, v] : evidence)
        if (current.contains(id) && candidate.net.contains(id)) common.emplace(id, v);
    if (common.empty()) throw IncomparableModelsError();
    RevisionDecision d;
    d.compared = common.size();
    d.ratio = model_likelihood_ratio(candidate.net, current, common);
    d.adopt = d.ratio > acceptance_ratio;
    return d;
}

RevisionPass run_revision_pass(const KnowledgeBase& kb, std::span<const ArgumentFrame> frames, const BayesNet& net,
                               const Evidence& evidence, const RevisionConfig& config, bool force) {
    RevisionPass pass;
    std::ostringstream log;

    pass.before = surprise_index(net, evidence, config.threshold);
    log << "trigger lr_star=" << fmt(pass.before.lr_star) << " threshold=" << fmt(config.threshold)
        << " observed=" << pass.before.observed << " triggered=" << (pass.before.triggered ? "yes" : "no") << '\n';
    if (!pass.before.triggered && !force) {
        log << "decision none: no revision needed\n";
        pass.transcript = log.str();
        return pass;
    }
    pass.ran = true;

    pass.suspects = suspect_arguments(net, frames, kb, evidence, config);
    for (std::size_t i = 0; i < pass.suspects.size(); ++i) {
        const auto& s = pass.suspects[i];
        log << "suspect " << i + 1 << ' ' << s.argument_id << " members=" << s.members.size()
            << " warrant_invalid=" << (s.warrant_invalid ? "yes" : "no")
            << " rebuttal_posterior=" << fmt(s.rebuttal_posterior);
        if (s.top_rebuttal) log << " (" << *s.top_rebuttal << ')';
        log << " sensitivity=" << fmt(s.sensitivity) << " best_lr_star=" << fmt(s.best_lr_star) << '\n';
    }

    pass.candidates = propose_revisions(kb, pass.suspects, frames, config.max_candidates, &pass.dropped,
                                        config.expansion_depth);
    for (const auto& d : pass.dropped) log << "dropped " << d << '\n';

    for (std::size_t i = 0; i < pass.candidates.size(); ++i) {
        const auto& c = pass.candidates[i];
        const auto d = evaluate_revision(net, c, evidence, config.acceptance_ratio);
        pass.decisions.push_back(d);
        log << "candidate " << i + 1 << ' ' << to_string(c.kind) << ' ' << c.target << ": " << c.description
            << " nodes=" << c.net.size() << " arcs=" << c.net.arc_count() << " ratio=" << fmt(d.ratio)
            << " compared=" << d.compared << ' ' << (d.adopt ? "acceptable" : "rejected") << '\n';
        if (d.adopt && !pass.adopted) pass.adopted = i;
    }

    if (pass.adopted) {
        const auto& c = pass.candidates[*pass.adopted];
        log << "decision adopt candidate " << *pass.adopted + 1 << ' ' << to_string(c.kind) << ' ' << c.target
            << '\n';
        pass.after = surprise_index(c.net, restrict(evidence, c.net), config.threshold);
        log << "after lr_star=" << fmt(pass.after->lr_star)
            << " triggered=" << (pass.after->triggered ? "yes" : "no") << '\n';
    } else {
        log << "decision retain current model\n";
    }
    pass.transcript = log.str();
    return pass;
}

}  // namespace argnet
