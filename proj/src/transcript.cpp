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

#include "metasql/transcript.hpp"

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <sstream>

#define CPPHTTPLIB_OPENSSL_SUPPORT
#include <httplib.h>

#include "metasql/error.hpp"
#include "strings.hpp"

namespace metasql {

using nlohmann::json;

std::string_view transcript_mode_name(TranscriptMode mode) {
  switch (mode) {
    case TranscriptMode::kOff: return "off";
    case TranscriptMode::kRecord: return "record";
    case TranscriptMode::kReplay: return "replay";
  }
  return "off";
}

TranscriptMode transcript_mode_from_name(std::string_view name) {
  if (name == "off") return TranscriptMode::kOff;
  if (name == "record") return TranscriptMode::kRecord;
  if (name == "replay") return TranscriptMode::kReplay;
  throw ConfigError("transcript mode must be off, record or replay, got '" + std::string(name) + "'");
}

namespace {

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

Transcript::Transcript(std::filesystem::path path, TranscriptMode mode)
    : path_(std::move(path)), mode_(mode) {
  if (mode_ != TranscriptMode::kReplay) return;
  std::ifstream in(path_);
  if (!in) throw IoError("cannot read transcript " + path_.string());
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    try {
      const json j = json::parse(line);
      entries_[j.at("hash").get<std::string>()].push_back(j.at("completion"));
    } catch (const json::exception& e) {
      throw FormatError("transcript " + path_.string() + " line " + std::to_string(line_no) +
                        ": " + e.what());
    }
  }
}

std::string Transcript::hash_of(std::string_view request) {
  std::ostringstream out;
  out << std::hex;
  out.width(16);
  out.fill('0');
  out << detail::fnv1a(request);
  return out.str();
}

std::vector<json> Transcript::replay(std::string_view request) const {
  auto it = entries_.find(hash_of(request));
  if (it == entries_.end()) {
    throw BackendError("transcript " + path_.string() + " has no entry for request hash " +
                       hash_of(request));
  }
  return it->second;
}

void Transcript::record(std::string_view request, const json& response) {
  if (mode_ != TranscriptMode::kRecord) return;
  json j;
  j["hash"] = hash_of(request);
  j["prompt"] = std::string(request);
  j["completion"] = response;
  j["timestamp"] = utc_timestamp();
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app);
  if (!out) throw IoError("cannot append to transcript " + path_.string());
  out << j.dump() << '\n';
}

std::string read_credential(const std::string& env_name) {
  const char* value = std::getenv(env_name.c_str());
  if (value == nullptr || *value == '\0') {
    throw ConfigError("credential environment variable " + env_name + " is not set");
  }
  return value;
}

json post_json(const std::string& endpoint, const json& body, const std::string& credential,
               int timeout_seconds) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos) throw BackendError("endpoint lacks a scheme: " + endpoint);
  const auto path_start = endpoint.find('/', scheme_end + 3);
  const std::string base = endpoint.substr(0, path_start);
  const std::string path = path_start == std::string::npos ? "/" : endpoint.substr(path_start);

  httplib::Client client(base);
  client.set_connection_timeout(timeout_seconds);
  client.set_read_timeout(timeout_seconds);
  client.set_bearer_token_auth(credential);
  auto res = client.Post(path, body.dump(), "application/json");
  if (!res) {
    throw BackendError("request to " + endpoint + " failed: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendError("request to " + endpoint + " returned HTTP " + std::to_string(res->status));
  }
  try {
    return json::parse(res->body);
  } catch (const json::exception& e) {
    throw BackendError("malformed response from " + endpoint + ": " + e.what());
  }
}

}  // namespace metasql
