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

#include "argnet/argument.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <sstream>

#include "argnet/errors.hpp"
#include "text_util.hpp"

namespace argnet {

namespace {

constexpr double kLeakTolerance = 1e-6;

bool in_unit(double p) { return p >= 0.0 && p <= 1.0; }

void check_unit(double p, const char* what) {
    if (!in_unit(p)) throw ArgumentError(std::string(what) + " " + text::format_exact(p) + " outside [0,1]");
}

}  // namespace

InfeasibleRatioError::InfeasibleRatioError(double ratio, double baseline)
    : ArgumentError("likelihood ratio " + text::format_exact(ratio) + " with baseline " +
                    text::format_exact(baseline) + " implies P(effect|cause) = " +
                    text::format_exact(ratio * baseline) + " > 1"),
      ratio_(ratio),
      baseline_(baseline) {}

Qualifier::Qualifier(FullTable t) : body_(std::move(t)) {
    const auto& rows = std::get<FullTable>(body_).rows;
    if (rows.empty() || (rows.size() & (rows.size() - 1)) != 0)
        throw ArgumentError("full table size " + std::to_string(rows.size()) + " is not a power of two");
    for (double r : rows) check_unit(r, "table entry");
}

Qualifier::Qualifier(NoisyOr n) : body_(std::move(n)) {
    const auto& no = std::get<NoisyOr>(body_);
    for (double p : no.link) check_unit(p, "noisy-or link");
    check_unit(no.leak, "noisy-or leak");
    if (no.link.size() > 62) throw ArgumentError("too many noisy-or parents");
}

std::size_t Qualifier::arity() const {
    if (is_noisy_or()) return noisy_or().link.size();
    std::size_t n = full_table().rows.size();
    std::size_t m = 0;
    while ((std::size_t{1} << m) < n) ++m;
    return m;
}

double noisy_or_row(std::span<const double> link, double leak, std::uint64_t row) {
    const std::size_t m = link.size();
    double fail = 1.0 - leak;
    for (std::size_t i = 0; i < m; ++i) {
        if ((row >> (m - 1 - i)) & 1u) fail *= 1.0 - link[i];
    }
    return 1.0 - fail;
}

double Qualifier::prob_true(std::uint64_t row) const {
    if (is_full_table()) return full_table().rows.at(row);
    const auto& no = noisy_or();
    return noisy_or_row(no.link, no.leak, row);
}

std::vector<double> Qualifier::expand() const {
    if (is_full_table()) return full_table().rows;
    std::vector<double> out(std::size_t{1} << arity());
    for (std::size_t r = 0; r < out.size(); ++r) out[r] = prob_true(r);
    return out;
}

std::vector<double> Qualifier::parameters() const {
    if (is_full_table()) return full_table().rows;
    auto p = noisy_or().link;
    p.push_back(noisy_or().leak);
    return p;
}

Qualifier Qualifier::with_parameter(std::size_t index, double value) const {
    if (is_full_table()) {
        auto t = full_table();
        t.rows.at(index) = value;
        return Qualifier(std::move(t));
    }
    auto n = noisy_or();
    if (index < n.link.size())
        n.link[index] = value;
    else if (index == n.link.size())
        n.leak = value;
    else
        throw ArgumentError("qualifier parameter index out of range");
    return Qualifier(std::move(n));
}

const std::string& ArgumentFrame::effect() const {
    return direction == Direction::causal ? claim : grounds.front();
}

std::vector<std::string> ArgumentFrame::causes() const {
    if (direction == Direction::causal) return grounds;
    return {claim};
}

std::string make_argument_id(const std::string& warrant, const std::vector<std::string>& grounds,
                             const std::string& claim, Direction direction) {
    std::string id = warrant + ":";
    for (std::size_t i = 0; i < grounds.size(); ++i) {
        if (i) id += ',';
        id += grounds[i];
    }
    id += direction == Direction::causal ? "=>" : "~>";
    id += claim;
    return id;
}

void validate_frame(const ArgumentFrame& frame, const KnowledgeBase& kb) {
    if (frame.grounds.empty()) throw ArgumentError("argument '" + frame.id + "' has no grounds");
    if (!std::is_sorted(frame.grounds.begin(), frame.grounds.end()) ||
        std::adjacent_find(frame.grounds.begin(), frame.grounds.end()) != frame.grounds.end())
        throw ArgumentError("argument '" + frame.id + "': grounds must be sorted and unique");

    for (const auto& g : frame.grounds) kb.proposition(g);
    const int claim_tier = kb.tier(frame.claim);
    std::size_t below = 0, above = 0;
    for (const auto& g : frame.grounds) {
        int t = kb.tier(g);
        if (t < claim_tier) ++below;
        if (t > claim_tier) ++above;
    }
    if (below && above)
        throw ArgumentError("argument '" + frame.id + "' mixes causes and effects of its claim");
    if (frame.direction == Direction::causal && below != frame.grounds.size())
        throw ArgumentError("causal argument '" + frame.id + "' has a ground not below its claim's tier");
    if (frame.direction == Direction::diagnostic) {
        if (above != frame.grounds.size())
            throw ArgumentError("diagnostic argument '" + frame.id + "' has a ground not above its claim's tier");
        if (frame.grounds.size() != 1)
            throw ArgumentError("diagnostic argument '" + frame.id + "' must have exactly one ground");
    }

    for (const auto& r : frame.rebuttals) {
        kb.proposition(r);
        if (r == frame.claim || std::binary_search(frame.grounds.begin(), frame.grounds.end(), r))
            throw ArgumentError("argument '" + frame.id + "': rebuttal '" + r + "' overlaps grounds or claim");
    }
    if (frame.qualifier.arity() != frame.causes().size())
        throw ArgumentError("argument '" + frame.id + "': qualifier arity " + std::to_string(frame.qualifier.arity()) +
                            " does not match " + std::to_string(frame.causes().size()) + " causes");
    if (frame.warrant.empty()) throw ArgumentError("argument '" + frame.id + "' has no warrant");
}

Qualifier qualifier_from_causal_strength(std::span<const CausalLink> links, Warnings* warnings) {
    if (links.empty()) throw ArgumentError("no links to build a qualifier from");
    for (const auto& l : links) {
        if (l.effect != links.front().effect)
            throw ArgumentError("links disagree on effect: '" + links.front().effect + "' vs '" + l.effect + "'");
    }
    if (links.size() == 1) {
        const auto& l = links.front();
        return Qualifier(FullTable{{l.strength_given_not_cause, l.strength_given_cause}});
    }

    NoisyOr n;
    double lo = links.front().strength_given_not_cause;
    double hi = lo;
    for (const auto& l : links) {
        n.link.push_back(l.strength_given_cause);
        lo = std::min(lo, l.strength_given_not_cause);
        hi = std::max(hi, l.strength_given_not_cause);
    }
    n.leak = hi;
    if (hi - lo > kLeakTolerance && warnings) {
        warnings->push_back("leak for '" + links.front().effect + "' reconciled to " + text::format_short(hi) +
                            " from baselines spanning [" + text::format_short(lo) + ", " + text::format_short(hi) +
                            "]");
    }
    return Qualifier(std::move(n));
}

std::pair<double, double> qualifier_from_likelihood_ratio(double lr, double baseline) {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw ArgumentError("likelihood ratio must be positive and finite");
    if (!(baseline > 0.0 && baseline <= 1.0)) throw ArgumentError("baseline must lie in (0,1]");
    const double p = lr * baseline;
    if (p > 1.0) throw InfeasibleRatioError(lr, baseline);
    return {p, baseline};
}

namespace {

std::vector<std::string> exportable_rebuttals(const Schema& schema, const std::set<std::string>& used) {
    std::vector<std::string> out;
    for (const auto& ex : schema.implicit_exceptions) {
        if (ex.exportable && !used.count(ex.proposition)) out.push_back(ex.proposition);
    }
    std::sort(out.begin(), out.end());
    return out;
}

}  // namespace

std::vector<ArgumentFrame> construct_arguments(const SchemaActivation& activation, const KnowledgeBase& kb,
                                               Warnings* warnings) {
    if (activation.matched.empty())
        throw ArgumentError("activation of schema '" + activation.schema_id + "' matched no links");
    const Schema& schema = kb.schema(activation.schema_id);
    for (const auto& l : activation.matched) {
        kb.proposition(l.cause);
        kb.proposition(l.effect);
    }

    std::vector<ArgumentFrame> frames;
    if (activation.direction == Direction::causal) {
        std::map<std::string, std::vector<CausalLink>> by_effect;
        for (const auto& l : activation.matched) by_effect[l.effect].push_back(l);
        for (auto& [effect, links] : by_effect) {
            std::sort(links.begin(), links.end(),
                      [](const CausalLink& a, const CausalLink& b) { return a.cause < b.cause; });
            ArgumentFrame f;
            for (const auto& l : links) f.grounds.push_back(l.cause);
            f.claim = effect;
            f.qualifier = qualifier_from_causal_strength(links, warnings);
            f.warrant = schema.id;
            f.backing = schema.backing;
            f.direction = Direction::causal;
            std::set<std::string> used(f.grounds.begin(), f.grounds.end());
            used.insert(f.claim);
            f.rebuttals = exportable_rebuttals(schema, used);
            f.id = make_argument_id(f.warrant, f.grounds, f.claim, f.direction);
            frames.push_back(std::move(f));
        }
    } else {
        for (const auto& l : activation.matched) {
            ArgumentFrame f;
            f.grounds = {l.effect};
            f.claim = l.cause;
            f.warrant = schema.id;
            f.backing = schema.backing;
            f.direction = Direction::diagnostic;
            double p = l.strength_given_cause;
            double base = l.strength_given_not_cause;
            if (base > 0.0) {
                f.likelihood_ratio = LikelihoodRatio{p / base, base};
            }
            // Copy the link rather than re-multiplying lr * baseline so the
            // table matches the causal reading bit for bit.
            f.qualifier = Qualifier(FullTable{{base, p}});
            f.rebuttals = exportable_rebuttals(schema, {l.cause, l.effect});
            f.id = make_argument_id(f.warrant, f.grounds, f.claim, f.direction);
            frames.push_back(std::move(f));
        }
    }
    for (const auto& f : frames) validate_frame(f, kb);
    return frames;
}

ArgumentFrame construct_argument(const SchemaActivation& activation, const KnowledgeBase& kb, Warnings* warnings) {
    auto frames = construct_arguments(activation, kb, warnings);
    if (frames.size() != 1)
        throw ArgumentError("activation of schema '" + activation.schema_id + "' yields " +
                            std::to_string(frames.size()) + " arguments, expected one");
    return std::move(frames.front());
}

// ---------------------------------------------------------------------------
// Frame file format

std::string format_frames(std::span<const ArgumentFrame> frames) {
    std::ostringstream out;
    out << "argnet-frames 1\n";
    for (const auto& f : frames) {
        out << "frame " << f.id << '\n';
        out << "direction " << to_string(f.direction) << '\n';
        out << "warrant " << f.warrant << '\n';
        out << "backing " << (f.backing ? *f.backing : "-") << '\n';
        out << "grounds";
        for (const auto& g : f.grounds) out << ' ' << g;
        out << '\n';
        out << "claim " << f.claim << '\n';
        out << "rebuttals";
        for (const auto& r : f.rebuttals) out << ' ' << r;
        out << '\n';
        if (f.qualifier.is_full_table()) {
            out << "full_table";
            for (double v : f.qualifier.full_table().rows) out << ' ' << text::format_exact(v);
        } else {
            out << "noisy_or " << text::format_exact(f.qualifier.noisy_or().leak);
            for (double v : f.qualifier.noisy_or().link) out << ' ' << text::format_exact(v);
        }
        out << '\n';
        if (f.likelihood_ratio)
            out << "likelihood_ratio " << text::format_exact(f.likelihood_ratio->ratio) << ' '
                << text::format_exact(f.likelihood_ratio->baseline) << '\n';
        out << "end\n";
    }
    return out.str();
}

std::vector<ArgumentFrame> parse_frames(std::string_view source) {
    std::vector<ArgumentFrame> frames;
    auto lines = text::split_lines(source);
    bool header = false;
    std::optional<ArgumentFrame> cur;
    auto number = [](const text::Token& t, std::size_t line) {
        auto v = text::parse_double(t.text);
        if (!v) throw ParseError("malformed number '" + std::string(t.text) + "'", line, t.column);
        return *v;
    };
    for (std::size_t n = 0; n < lines.size(); ++n) {
        auto toks = text::tokenize(text::strip_comment(lines[n]));
        const std::size_t line = n + 1;
        if (toks.empty()) continue;
        auto key = toks[0].text;
        auto fail = [&](const std::string& what) -> void { throw ParseError(what, line, toks[0].column); };
        if (!header) {
            if (key != "argnet-frames" || toks.size() != 2 || toks[1].text != "1") fail("expected 'argnet-frames 1'");
            header = true;
            continue;
        }
        if (key == "frame") {
            if (cur || toks.size() != 2) fail("malformed frame header");
            cur.emplace();
            cur->id = std::string(toks[1].text);
            continue;
        }
        if (!cur) fail("directive outside a frame");
        if (key == "end") {
            frames.push_back(std::move(*cur));
            cur.reset();
        } else if (key == "direction" && toks.size() == 2) {
            if (toks[1].text == "causal")
                cur->direction = Direction::causal;
            else if (toks[1].text == "diagnostic")
                cur->direction = Direction::diagnostic;
            else
                fail("unknown direction");
        } else if (key == "warrant" && toks.size() == 2) {
            cur->warrant = std::string(toks[1].text);
        } else if (key == "backing" && toks.size() == 2) {
            if (toks[1].text != "-") cur->backing = std::string(toks[1].text);
        } else if (key == "grounds") {
            for (std::size_t i = 1; i < toks.size(); ++i) cur->grounds.emplace_back(toks[i].text);
        } else if (key == "claim" && toks.size() == 2) {
            cur->claim = std::string(toks[1].text);
        } else if (key == "rebuttals") {
            for (std::size_t i = 1; i < toks.size(); ++i) cur->rebuttals.emplace_back(toks[i].text);
        } else if (key == "full_table" && toks.size() >= 2) {
            FullTable t;
            for (std::size_t i = 1; i < toks.size(); ++i) t.rows.push_back(number(toks[i], line));
            try {
                cur->qualifier = Qualifier(std::move(t));
            } catch (const ArgumentError& e) {
                fail(e.what());
            }
        } else if (key == "noisy_or" && toks.size() >= 2) {
            NoisyOr no;
            no.leak = number(toks[1], line);
            for (std::size_t i = 2; i < toks.size(); ++i) no.link.push_back(number(toks[i], line));
            try {
                cur->qualifier = Qualifier(std::move(no));
            } catch (const ArgumentError& e) {
                fail(e.what());
            }
        } else if (key == "likelihood_ratio" && toks.size() == 3) {
            cur->likelihood_ratio = LikelihoodRatio{number(toks[1], line), number(toks[2], line)};
        } else {
            fail("unknown frame directive '" + std::string(key) + "'");
        }
    }
    if (cur) throw ParseError("unterminated frame '" + cur->id + "'", lines.size(), 1);
    return frames;
}

}  // namespace argnet
