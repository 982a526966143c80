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

#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace metasql {

enum class TranscriptMode { kOff, kRecord, kReplay };

std::string_view transcript_mode_name(TranscriptMode mode);
// Throws ConfigError for anything but off, record or replay.
TranscriptMode transcript_mode_from_name(std::string_view name);

// Append-only JSON-lines log of service exchanges keyed by a hash of the
// request text. Replay serves the recorded responses for a hash in the order
// they were written. Credentials are never part of an entry.
class Transcript {
 public:
  Transcript(std::filesystem::path path, TranscriptMode mode);

  TranscriptMode mode() const { return mode_; }
  const std::filesystem::path& path() const { return path_; }

  static std::string hash_of(std::string_view request);

  // Recorded responses for the request; throws BackendError when absent.
  std::vector<nlohmann::json> replay(std::string_view request) const;
  void record(std::string_view request, const nlohmann::json& response);

 private:
  std::filesystem::path path_;
  TranscriptMode mode_;
  std::map<std::string, std::vector<nlohmann::json>> entries_;
  mutable std::mutex mutex_;
};

// Endpoint settings shared by the service generator and embedder.
struct ServiceConfig {
  std::string endpoint;  // http(s)://host[:port]/path
  std::string model;
  std::string credential_env = "METASQL_API_KEY";
  double temperature = 0.0;
  int max_tokens = 256;
  int timeout_seconds = 60;
};

// POSTs a JSON body with a bearer credential and returns the parsed JSON
// response. Throws BackendError on transport or HTTP failure.
nlohmann::json post_json(const std::string& endpoint, const nlohmann::json& body,
                         const std::string& credential, int timeout_seconds);

// Reads the credential from the named environment variable; throws
// ConfigError when unset or empty.
std::string read_credential(const std::string& env_name);

}  // namespace metasql
