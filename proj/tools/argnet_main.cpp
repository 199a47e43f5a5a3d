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

#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>

#include "argnet/session.hpp"
#include "text_util.hpp"

namespace {

std::set<std::string> split_ids(const std::string& csv) {
    std::set<std::string> out;
    std::size_t start = 0;
    while (start <= csv.size()) {
        auto comma = csv.find(',', start);
        if (comma == std::string::npos) comma = csv.size();
        if (comma > start) out.insert(csv.substr(start, comma - start));
        start = comma + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"argnet: build, monitor and revise Bayesian networks from schema knowledge"};
    app.require_subcommand(1);

    std::string session_dir = "argnet-session";
    std::optional<double> threshold, acceptance_ratio;
    std::optional<std::size_t> max_candidates;
    app.add_option("--session", session_dir, "Session directory")->capture_default_str();
    app.add_option("--threshold", threshold, "Conflict threshold on LR*")->check(CLI::PositiveNumber);
    app.add_option("--acceptance-ratio", acceptance_ratio, "Likelihood ratio needed to adopt a revision")
        ->check(CLI::PositiveNumber);
    app.add_option("--max-candidates", max_candidates, "Revision candidates per pass")->check(CLI::NonNegativeNumber);

    std::string kb_path, claim, grounds;
    int depth = 1;
    auto* build = app.add_subcommand("build", "Activate schemata, construct arguments, compile the network");
    build->add_option("kb", kb_path, "Knowledge base file")->required();
    build->add_option("--claim", claim, "Chain backward from this proposition");
    build->add_option("--grounds", grounds, "Chain forward from these comma-separated propositions");
    build->add_option("--depth", depth, "Chaining depth")->check(CLI::PositiveNumber)->capture_default_str();

    std::string evidence_path;
    bool incremental = false;
    auto* assert_cmd = app.add_subcommand("assert", "Add evidence, print posteriors and the conflict report");
    assert_cmd->add_option("evidence", evidence_path, "Evidence file")->required();
    assert_cmd->add_flag("--incremental", incremental, "Score only the new observations");

    app.add_subcommand("report", "Print posteriors and the conflict report");

    bool force = false;
    auto* revise = app.add_subcommand("revise", "Run one revision pass");
    revise->add_flag("--force", force, "Revise even without triggered conflict");

    std::string format, output;
    auto* export_cmd = app.add_subcommand("export", "Write the network as dot or net text");
    export_cmd->add_option("format", format, "dot or net")->required();
    export_cmd->add_option("path", output, "Output file (stdout if omitted)");

    app.add_subcommand("session", "Show the session and store any global settings given");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? argnet::exit_ok : argnet::exit_usage;
    }

    try {
        argnet::Session s = argnet::load_session(session_dir);
        if (threshold) s.config.threshold = *threshold;
        if (acceptance_ratio) s.config.acceptance_ratio = *acceptance_ratio;
        if (max_candidates) s.config.max_candidates = *max_candidates;

        std::string out;
        if (build->parsed()) {
            argnet::BuildRequest req;
            if (!claim.empty()) req.claim = claim;
            req.grounds = split_ids(grounds);
            req.depth = depth;
            out = argnet::cmd_build(s, argnet::load_kb_file(kb_path), req);
        } else if (assert_cmd->parsed()) {
            out = argnet::cmd_assert(s, argnet::parse_evidence(argnet::text::read_file(evidence_path)), incremental);
        } else if (app.got_subcommand("report")) {
            out = argnet::cmd_report(s);
        } else if (revise->parsed()) {
            out = argnet::cmd_revise(s, force);
        } else if (export_cmd->parsed()) {
            out = argnet::cmd_export(s, format);
            if (!output.empty()) {
                argnet::text::write_file(output, out);
                out.clear();
            }
        } else {
            out = argnet::cmd_session(s);
        }

        if (!export_cmd->parsed() && !app.got_subcommand("report")) argnet::save_session(s, session_dir);
        std::cout << out;
        return argnet::exit_ok;
    } catch (const argnet::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return argnet::exit_code_for(e.kind());
    }
}
