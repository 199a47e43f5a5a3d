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

#include "argnet/session.hpp"

#include <filesystem>
#include <sstream>

#include "argnet/monitor.hpp"
#include "text_util.hpp"

namespace argnet {

namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::parse: return exit_parse;
        case ErrorKind::compile: return exit_compile;
        case ErrorKind::inference: return exit_inference;
        case ErrorKind::revision: return exit_revision;
        case ErrorKind::io: return exit_io;
    }
    return exit_usage;
}

std::string format_config(const SessionConfig& c) {
    std::ostringstream out;
    out << "threshold = " << text::format_exact(c.threshold) << '\n';
    out << "acceptance_ratio = " << text::format_exact(c.acceptance_ratio) << '\n';
    out << "max_candidates = " << c.max_candidates << '\n';
    return out.str();
}

SessionConfig parse_config(std::string_view source) {
    SessionConfig c;
    auto lines = text::split_lines(source);
    for (std::size_t n = 0; n < lines.size(); ++n) {
        auto toks = text::tokenize(text::strip_comment(lines[n]));
        if (toks.empty()) continue;
        const std::size_t line = n + 1;
        if (toks.size() != 3 || toks[1].text != "=") throw ParseError("expected '<key> = <value>'", line, 1);
        auto number = [&] {
            auto v = text::parse_double(toks[2].text);
            if (!v) throw ParseError("expected a number", line, toks[2].column);
            return *v;
        };
        if (toks[0].text == "threshold") {
            c.threshold = number();
        } else if (toks[0].text == "acceptance_ratio") {
            c.acceptance_ratio = number();
        } else if (toks[0].text == "max_candidates") {
            auto v = text::parse_int(toks[2].text);
            if (!v || *v < 0) throw ParseError("expected a non-negative integer", line, toks[2].column);
            c.max_candidates = static_cast<std::size_t>(*v);
        } else {
            throw ParseError("unknown setting '" + std::string(toks[0].text) + "'", line, toks[0].column);
        }
    }
    return c;
}

Session load_session(const std::string& dir) {
    Session s;
    const fs::path d(dir);
    auto read = [&](const char* name) -> std::optional<std::string> {
        if (!fs::exists(d / name)) return std::nullopt;
        return text::read_file((d / name).string());
    };
    if (auto t = read("config")) s.config = parse_config(*t);
    if (auto t = read("kb")) s.kb = load_kb(*t);
    if (auto t = read("frames")) s.frames = parse_frames(*t);
    if (auto t = read("net")) s.net = parse_network(*t);
    if (auto t = read("evidence")) s.evidence = parse_evidence(*t);
    if (auto t = read("transcript")) s.transcript = *t;
    return s;
}

void save_session(const Session& s, const std::string& dir) {
    const fs::path d(dir);
    std::error_code ec;
    fs::create_directories(d, ec);
    if (ec) throw Error(ErrorKind::io, "cannot create session directory '" + dir + "': " + ec.message());
    auto put = [&](const char* name, const std::optional<std::string>& body) {
        if (body)
            text::write_file((d / name).string(), *body);
        else
            fs::remove(d / name, ec);
    };
    put("config", format_config(s.config));
    put("kb", s.kb ? std::optional(format_kb(*s.kb)) : std::nullopt);
    put("frames", s.kb ? std::optional(format_frames(s.frames)) : std::nullopt);
    put("net", s.net ? std::optional(format_network(*s.net)) : std::nullopt);
    put("evidence", format_evidence(s.evidence));
    put("transcript", s.transcript);
}

namespace {

const BayesNet& require_net(const Session& s) {
    if (!s.net) throw Error(ErrorKind::compile, "session has no network; run build first");
    return *s.net;
}

const KnowledgeBase& require_kb(const Session& s) {
    if (!s.kb) throw Error(ErrorKind::compile, "session has no knowledge base; run build first");
    return *s.kb;
}

void print_posteriors(std::ostream& out, const BayesNet& net, const Evidence& evidence) {
    const auto post = Engine{}.all_posteriors(net, evidence);
    for (const auto& [id, p] : post) {
        out << "P(" << id << ") = " << text::format_short(p);
        if (evidence.count(id)) out << " (observed)";
        out << '\n';
    }
}

}  // namespace

std::string cmd_build(Session& s, const KnowledgeBase& kb, const BuildRequest& request) {
    if (!request.claim && request.grounds.empty()) throw Error(ErrorKind::compile, "build needs --claim or --grounds");
    ActivationOptions opts;
    opts.depth = request.depth;

    std::vector<SchemaActivation> activations;
    if (!request.grounds.empty()) {
        auto fwd = activate_forward(kb, request.grounds, opts);
        activations.insert(activations.end(), fwd.begin(), fwd.end());
    }
    if (request.claim) {
        auto bwd = activate_backward(kb, *request.claim, opts);
        activations.insert(activations.end(), bwd.begin(), bwd.end());
    }
    if (activations.empty()) throw Error(ErrorKind::compile, "no schema matches the request");

    Warnings warnings;
    std::vector<ArgumentFrame> frames;
    for (const auto& a : activations) {
        auto fs = construct_arguments(a, kb, &warnings);
        frames.insert(frames.end(), fs.begin(), fs.end());
    }
    auto compiled = compile(frames, kb);
    std::sort(frames.begin(), frames.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    frames.erase(std::unique(frames.begin(), frames.end()), frames.end());

    s.kb = kb;
    s.frames = std::move(frames);
    s.net = std::move(compiled.net);
    s.evidence.clear();
    s.transcript.clear();
    warnings.insert(warnings.end(), compiled.warnings.begin(), compiled.warnings.end());

    std::ostringstream out;
    out << "nodes: " << s.net->size() << '\n';
    out << "arcs: " << s.net->arc_count() << '\n';
    out << "arguments: " << s.frames.size() << '\n';
    for (const auto& f : s.frames) out << "argument " << f.id << '\n';
    for (const auto& w : warnings) out << "warning: " << w << '\n';
    return out.str();
}

std::string cmd_assert(Session& s, const Evidence& increment, bool incremental) {
    const BayesNet& net = require_net(s);
    check_evidence(net, increment);
    Evidence merged = s.evidence;
    for (const auto& [id, v] : increment) {
        auto it = merged.find(id);
        if (it != merged.end() && it->second != v)
            throw InferenceError("node '" + id + "' is already observed as " + (it->second ? "true" : "false"));
        merged[id] = v;
    }

    std::ostringstream out;
    // Computing everything before touching the session keeps it unchanged on error.
    print_posteriors(out, net, merged);
    if (!increment.empty()) {
        Evidence fresh;
        for (const auto& [id, v] : increment)
            if (!s.evidence.count(id)) fresh[id] = v;
        const ConflictReport r = incremental && !fresh.empty()
                                     ? incremental_surprise_index(net, s.evidence, fresh, s.config.threshold)
                                     : surprise_index(net, merged, s.config.threshold);
        out << format_report(r);
        if (r.triggered) out << "TRIGGERED\n";
    }
    s.evidence = std::move(merged);
    return out.str();
}

std::string cmd_report(const Session& s) {
    const BayesNet& net = require_net(s);
    std::ostringstream out;
    print_posteriors(out, net, s.evidence);
    if (!s.evidence.empty()) {
        const ConflictReport r = surprise_index(net, s.evidence, s.config.threshold);
        out << format_report(r);
        if (r.triggered) out << "TRIGGERED\n";
    }
    return out.str();
}

std::string cmd_revise(Session& s, bool force) {
    const BayesNet& net = require_net(s);
    const KnowledgeBase& kb = require_kb(s);
    if (s.evidence.empty()) throw RevisionError("session has no evidence to revise against");

    RevisionConfig config;
    config.threshold = s.config.threshold;
    config.acceptance_ratio = s.config.acceptance_ratio;
    config.max_candidates = s.config.max_candidates;
    RevisionPass pass = run_revision_pass(kb, s.frames, net, s.evidence, config, force);

    std::ostringstream out;
    if (!pass.ran) {
        out << "no revision needed\n";
        return out.str();
    }
    s.transcript += pass.transcript;
    out << pass.transcript;
    if (pass.adopted) {
        RevisionCandidate& c = pass.candidates[*pass.adopted];
        s.frames = std::move(c.frames);
        s.net = std::move(c.net);
        out << format_report(*pass.after);
    }
    return out.str();
}

std::string cmd_export(const Session& s, const std::string& format) {
    if (format != "dot" && format != "net") throw Error(ErrorKind::io, "unknown export format '" + format + "'");
    const BayesNet& net = require_net(s);
    return format == "dot" ? export_dot(net) : format_network(net);
}

std::string cmd_session(const Session& s) {
    std::ostringstream out;
    out << format_config(s.config);
    out << "kb: " << (s.kb ? std::to_string(s.kb->schemata().size()) + " schemata" : std::string("none")) << '\n';
    out << "arguments: " << s.frames.size() << '\n';
    if (s.net)
        out << "net: " << s.net->size() << " nodes, " << s.net->arc_count() << " arcs\n";
    else
        out << "net: none\n";
    out << "evidence: " << s.evidence.size() << " observations\n";
    return out.str();
}

}  // namespace argnet
