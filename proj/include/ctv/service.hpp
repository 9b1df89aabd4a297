// Copyright 2026 The ctv Authors
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

// JSON-over-HTTP front end for sessions.
//
//   POST /sessions                 {"design", "annotations", "modular"?}
//   GET  /sessions/{id}
//   POST /sessions/{id}/response   {"answer": "accept" | "reject"}
//   GET  /sessions/{id}/graph
//   GET  /sessions/{id}/trace
//
// Every response body is a JSON object with "schema_version".

#include <atomic>
#include <map>
#include <memory>
#include <mutex>
#include <string>

#include "ctv/session.hpp"

namespace httplib {
class Server;
}

namespace ctv {

inline constexpr int kSchemaVersion = 1;

struct HttpResult {
  int status = 200;
  std::string body;
};

class Service {
 public:
  Service() = default;
  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Routes one request. Never throws; errors become 4xx bodies with an
  // "error" field.
  HttpResult handle(const std::string& method, const std::string& path, const std::string& body);

  // Blocks serving on host:port. With port 0 an ephemeral port is chosen
  // and reported through `bound_port` before serving starts.
  bool serve(const std::string& host, int port, std::atomic<int>* bound_port = nullptr);
  void stop();

 private:
  struct Entry {
    std::mutex mu;
    SessionState state;
    bool witness_done = false;
    std::optional<PairTrace> witness;
  };

  std::shared_ptr<Entry> find(const std::string& id);
  HttpResult create(const std::string& body);

  std::mutex mu_;
  std::map<std::string, std::shared_ptr<Entry>> sessions_;
  int next_id_ = 1;
  std::mutex server_mu_;
  httplib::Server* server_ = nullptr;  // while serving
};

}  // namespace ctv
