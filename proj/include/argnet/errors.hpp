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

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace argnet {

// Broad failure categories. The CLI maps each one to its own exit code.
enum class ErrorKind {
    parse,
    compile,
    inference,
    revision,
    io,
};

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

// Malformed input text. line/column are 1-based; 0 means "not applicable".
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line = 0, std::size_t column = 0)
        : Error(ErrorKind::parse, locate(what, line, column)), line_(line), column_(column) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    static std::string locate(const std::string& what, std::size_t line, std::size_t column) {
        if (line == 0) return what;
        return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what;
    }
    std::size_t line_;
    std::size_t column_;
};

// Content that parses but breaks a knowledge-base invariant (dangling id,
// out-of-range strength, tier violation).
class ValidationError : public ParseError {
public:
    using ParseError::ParseError;
};

class UnknownIdError : public Error {
public:
    UnknownIdError(ErrorKind kind, const std::string& id, const std::string& context)
        : Error(kind, "unknown " + context + " '" + id + "'"), id_(id) {}
    const std::string& id() const noexcept { return id_; }

private:
    std::string id_;
};

class NoBackingError : public Error {
public:
    explicit NoBackingError(const std::string& schema)
        : Error(ErrorKind::compile, "schema '" + schema + "' has no backing"), schema_(schema) {}
    const std::string& schema() const noexcept { return schema_; }

private:
    std::string schema_;
};

class ArgumentError : public Error {
public:
    explicit ArgumentError(const std::string& what) : Error(ErrorKind::compile, what) {}
};

class InfeasibleRatioError : public ArgumentError {
public:
    InfeasibleRatioError(double ratio, double baseline);
    double ratio() const noexcept { return ratio_; }
    double baseline() const noexcept { return baseline_; }

private:
    double ratio_;
    double baseline_;
};

class CycleError : public Error {
public:
    explicit CycleError(std::vector<std::string> cycle);
    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::string> cycle_;
};

class MissingPriorError : public Error {
public:
    explicit MissingPriorError(const std::string& node)
        : Error(ErrorKind::compile, "node '" + node + "' has no parents and no prior"), node_(node) {}
    const std::string& node() const noexcept { return node_; }

private:
    std::string node_;
};

// Two arguments give irreconcilable tables for the same claim.
class ConflictingArgumentsError : public Error {
public:
    ConflictingArgumentsError(const std::string& claim, const std::string& first, const std::string& second)
        : Error(ErrorKind::compile, "arguments '" + first + "' and '" + second +
                                        "' assign conflicting tables to '" + claim + "'"),
          first_(first),
          second_(second) {}
    const std::string& first() const noexcept { return first_; }
    const std::string& second() const noexcept { return second_; }

private:
    std::string first_;
    std::string second_;
};

class NotMergeableError : public Error {
public:
    explicit NotMergeableError(const std::string& argument)
        : Error(ErrorKind::compile,
                "argument '" + argument + "' has a multi-cause full table and cannot be merged by noisy-or"),
          argument_(argument) {}
    const std::string& argument() const noexcept { return argument_; }

private:
    std::string argument_;
};

class InferenceError : public Error {
public:
    explicit InferenceError(const std::string& what) : Error(ErrorKind::inference, what) {}
};

class ImpossibleEvidenceError : public InferenceError {
public:
    ImpossibleEvidenceError() : InferenceError("evidence has probability zero under the model") {}
};

class SizeError : public InferenceError {
public:
    SizeError(std::size_t size, std::size_t cap)
        : InferenceError("size " + std::to_string(size) + " exceeds cap " + std::to_string(cap)) {}
};

class DegenerateModelError : public InferenceError {
public:
    DegenerateModelError() : InferenceError("expected evidence probability is zero") {}
};

class RevisionError : public Error {
public:
    explicit RevisionError(const std::string& what) : Error(ErrorKind::revision, what) {}
};

class IncomparableModelsError : public RevisionError {
public:
    IncomparableModelsError() : RevisionError("models share no observed node") {}
};

}  // namespace argnet
