//
// Copyright 2026 The metasql Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace metasql {

// Base of every error the library raises. Each subclass corresponds to one
// failure kind that callers (mostly the CLI) map onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SyntaxError : public Error {
 public:
  SyntaxError(std::size_t position, std::string token, const std::string& message)
      : Error("syntax error at offset " + std::to_string(position) + " near '" + token +
              "': " + message),
        position_(position),
        token_(std::move(token)) {}

  std::size_t position() const { return position_; }
  const std::string& token() const { return token_; }

 private:
  std::size_t position_;
  std::string token_;
};

class UnknownTable : public Error {
 public:
  UnknownTable(const std::string& name, const std::string& db_id)
      : Error("unknown table '" + name + "' in database '" + db_id + "'") {}
};

class UnknownColumn : public Error {
 public:
  UnknownColumn(const std::string& name, const std::string& db_id)
      : Error("unknown column '" + name + "' in database '" + db_id + "'") {}
};

// Malformed file content or wire strings.
class FormatError : public Error {
 public:
  using Error::Error;
};

// Strict loading found gold queries that do not parse; one message per
// failed example.
class ParseFailureSummary : public FormatError {
 public:
  explicit ParseFailureSummary(std::vector<std::string> failures)
      : FormatError(std::to_string(failures.size()) + " gold queries failed to parse; first: " +
                    (failures.empty() ? std::string() : failures.front())),
        failures_(std::move(failures)) {}
  const std::vector<std::string>& failures() const { return failures_; }

 private:
  std::vector<std::string> failures_;
};

// Raised by classifier, generator, embedder and scorer backends.
class BackendError : public Error {
 public:
  using Error::Error;
};

class TemplateGap : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class ZeroVector : public Error {
 public:
  using Error::Error;
};

class EmptySet : public Error {
 public:
  using Error::Error;
};

class NoCandidates : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace metasql
