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

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "argnet/argument.hpp"
#include "argnet/errors.hpp"
#include "argnet/inference.hpp"
#include "argnet/network.hpp"
#include "argnet/revision.hpp"
#include "argnet/schema_kb.hpp"

namespace argnet {

// Process exit codes used by the command-line driver.
enum ExitCode : int {
    exit_ok = 0,
    exit_usage = 64,
    exit_parse = 65,
    exit_compile = 66,
    exit_inference = 67,
    exit_revision = 68,
    exit_io = 74,
};

int exit_code_for(ErrorKind kind);

struct SessionConfig {
    double threshold = kDefaultConflictThreshold;
    double acceptance_ratio = 10.0;
    std::size_t max_candidates = 5;

    bool operator==(const SessionConfig&) const = default;
};

// Everything a sequence of commands works on. The net, when present, is
// compiled from exactly `frames`.
struct Session {
    std::optional<KnowledgeBase> kb;
    std::vector<ArgumentFrame> frames;
    std::optional<BayesNet> net;
    Evidence evidence;
    SessionConfig config;
    std::string transcript;
};

// A session lives in a directory of text files:
//   config, kb, frames, net, evidence, transcript
// Missing files mean empty state.
Session load_session(const std::string& dir);
void save_session(const Session& session, const std::string& dir);

std::string format_config(const SessionConfig& config);
SessionConfig parse_config(std::string_view source);

struct BuildRequest {
    std::optional<std::string> claim;
    std::set<std::string> grounds;
    int depth = 1;
};

// Each command mutates the session (where relevant) and returns the text to print.
std::string cmd_build(Session& s, const KnowledgeBase& kb, const BuildRequest& request);
std::string cmd_assert(Session& s, const Evidence& increment, bool incremental = false);
std::string cmd_report(const Session& s);
std::string cmd_revise(Session& s, bool force = false);
std::string cmd_export(const Session& s, const std::string& format);
std::string cmd_session(const Session& s);

}  // namespace argnet
