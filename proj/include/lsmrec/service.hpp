// Copyright 2026 The lsmrec Authors
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


#pragma once

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include <json.hpp>

#include "lsmrec/engine.hpp"
#include "lsmrec/error.hpp"
#include "lsmrec/session.hpp"

namespace httplib {
class Server;
}

namespace lsmrec {

struct ApiRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> query;
  std::string body;
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
  // Set for non-JSON payloads (the NDJSON event log).
  std::string raw;
  std::string content_type = "application/json";
};

int http_status(ErrorCode code);

// HTTP/JSON front of the engine. `handle` is transport-free so it can be
// driven directly; `bind` mounts it on an httplib server.
class Service {
 public:
  explicit Service(const Engine& engine);

  ApiResponse handle(const ApiRequest& request);
  void bind(httplib::Server& server);

  std::shared_ptr<Session> find_session(const std::string& id) const;
  std::size_t session_count() const;

 private:
  ApiResponse create_session(const nlohmann::json& body);
  ApiResponse story(Session& session);
  ApiResponse feedback(Session& session, const nlohmann::json& body);
  ApiResponse preferences(Session& session, const nlohmann::json& body);
  ApiResponse dimension_view(Session& session, const std::string& p);
  ApiResponse movie(const std::string& id, const ApiRequest& request) const;
  ApiResponse history(const std::string& id) const;
  ApiResponse events(Session& session) const;

  const Engine& engine_;
  mutable std::mutex mutex_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::atomic<std::uint64_t> next_session_{1};
};

}  // namespace lsmrec
