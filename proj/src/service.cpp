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

#include "ctv/service.hpp"

#include <httplib.h>

#include <json.hpp>
#include <regex>

#include "ctv/annotations.hpp"
#include "ctv/parser.hpp"

namespace ctv {
namespace {

using nlohmann::json;

HttpResult reply(int status, json body) {
  body["schema_version"] = kSchemaVersion;
  return {status, body.dump()};
}

HttpResult error(int status, const std::string& message) { return reply(status, json{{"error", message}}); }

json graph_json(const DepGraph& g, const RoundMap& map) {
  json nodes = json::array();
  for (const auto& n : g.nodes) {
    auto it = map.find(n);
    nodes.push_back({{"name", n},
                     {"round", it == map.end() ? json(nullptr) : json(it->second)},
                     {"state", it == map.end() ? "ct" : "vartime"}});
  }
  json edges = json::array();
  for (const auto& [v, w] : g.data) edges.push_back({{"from", v}, {"to", w}, {"kind", "data"}});
  for (const auto& [v, w] : g.ctrl) edges.push_back({{"from", v}, {"to", w}, {"kind", "ctrl"}});
  return {{"nodes", nodes}, {"edges", edges}, {"dump", dump_graph(g, map)}};
}

json session_json(const std::string& id, const SessionState& s) {
  json j;
  j["id"] = id;
  j["top"] = s.program.top;
  j["mode"] = s.options.modular ? "modular" : "inline";
  j["status"] = to_string(s.status);
  j["iteration"] = s.iteration;
  j["failed_sinks"] = s.artifact.failed_sinks;
  if (s.suggestion) {
    const Suggestion& g = *s.suggestion;
    j["suggestion"] = {{"candidate", g.candidate},
                       {"weight", g.weight},
                       {"counterexample", g.counterexample},
                       {"blame", g.blame},
                       {"rationale", g.rationale},
                       {"prompt", prompt(g)}};
  } else {
    j["suggestion"] = nullptr;
  }
  j["assumptions"] = {{"public", s.ann.assumptions.publics}, {"flush", s.ann.assumptions.flush}};
  j["excluded"] = s.no;
  j["note"] = s.note;
  json history = json::array();
  for (const auto& h : s.history) {
    history.push_back({{"iteration", h.iteration},
                       {"digest", h.digest},
                       {"counterexample", h.counterexample},
                       {"suggestion", h.suggestion},
                       {"response", h.response}});
  }
  j["history"] = history;
  return j;
}

json trace_json(const PairTrace& tr, const std::set<std::string>& sinks) {
  json cycles = json::array();
  for (const auto& cfg : tr.configs) {
    json runs;
    for (int side = 0; side < 2; ++side) {
      json nets = json::object();
      for (size_t i = 0; i < tr.nets.size(); ++i) {
        nets[tr.nets[i]] = {{"value", cfg.store[side][i]}, {"live", cfg.live[side][i] != 0}};
      }
      runs[side == kLeft ? "left" : "right"] = nets;
    }
    cycles.push_back({{"cycle", cfg.cycle}, {"left", runs["left"]}, {"right", runs["right"]}});
  }
  const Verdict v = check_ct_on_trace(tr, sinks);
  return {{"t", tr.configs.empty() ? 0 : tr.configs.front().t},
          {"nets", tr.nets},
          {"cycles", cycles},
          {"violation",
           {{"sink", v.sink}, {"cycle", v.cycle}, {"live_left", v.live_left}, {"live_right", v.live_right}}},
          {"dump", dump_trace(tr)}};
}

}  // namespace

std::shared_ptr<Service::Entry> Service::find(const std::string& id) {
  std::lock_guard<std::mutex> lock(mu_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

HttpResult Service::create(const std::string& body) {
  json req = json::parse(body, nullptr, false);
  if (req.is_discarded() || !req.is_object()) return error(400, "request body must be a JSON object");
  if (!req.contains("design") || !req["design"].is_string()) return error(400, "missing string field 'design'");
  if (!req.contains("annotations") || !req["annotations"].is_string()) {
    return error(400, "missing string field 'annotations'");
  }
  SessionOptions opts;
  if (req.contains("modular")) {
    if (!req["modular"].is_boolean()) return error(400, "field 'modular' must be a boolean");
    opts.modular = req["modular"].get<bool>();
  }
  auto entry = std::make_shared<Entry>();
  try {
    Program p = parse_program(req["design"].get<std::string>());
    Annotations ann = validate_annotations(p, parse_annotations(req["annotations"].get<std::string>()));
    entry->state = start(p, ann, opts);
  } catch (const Error& e) {
    return error(400, e.what());
  }
  std::string id;
  {
    std::lock_guard<std::mutex> lock(mu_);
    id = "s" + std::to_string(next_id_++);
    sessions_[id] = entry;
  }
  std::lock_guard<std::mutex> lock(entry->mu);
  return reply(201, session_json(id, entry->state));
}

HttpResult Service::handle(const std::string& method, const std::string& path, const std::string& body) {
  static const std::regex kSession(R"(^/sessions/([A-Za-z0-9_-]+)(/(response|graph|trace))?$)");
  try {
    if (path == "/sessions") {
      if (method != "POST") return error(405, "use POST to create a session");
      return create(body);
    }
    std::smatch m;
    if (!std::regex_match(path, m, kSession)) return error(404, "no such endpoint: " + path);
    const std::string id = m[1];
    const std::string sub = m[3];
    auto entry = find(id);
    if (!entry) return error(404, "unknown session '" + id + "'");
    std::lock_guard<std::mutex> lock(entry->mu);
    SessionState& s = entry->state;
    if (sub.empty()) {
      if (method != "GET") return error(405, "use GET");
      return reply(200, session_json(id, s));
    }
    if (sub == "response") {
      if (method != "POST") return error(405, "use POST");
      json req = json::parse(body, nullptr, false);
      if (req.is_discarded() || !req.is_object() || !req.contains("answer") || !req["answer"].is_string()) {
        return error(400, "body must be {\"answer\": \"accept\" | \"reject\"}");
      }
      const std::string a = req["answer"];
      if (a != "accept" && a != "reject") return error(400, "answer must be 'accept' or 'reject'");
      if (s.terminal()) return error(409, std::string("session is ") + to_string(s.status));
      respond(s, a == "accept" ? Answer::kAccept : Answer::kReject);
      entry->witness_done = false;
      entry->witness.reset();
      return reply(200, session_json(id, s));
    }
    if (method != "GET") return error(405, "use GET");
    if (sub == "graph") {
      json cex = {{"nets", s.cex.nets},
                  {"justifications", s.cex.justifications},
                  {"scc_fallback", s.cex.scc_fallback},
                  {"none", s.cex.none()}};
      return reply(200, json{{"id", id},
                             {"status", to_string(s.status)},
                             {"graph", graph_json(s.graph, s.artifact.vartime)},
                             {"reduced", graph_json(s.reduced.graph, s.artifact.vartime)},
                             {"counterexample", cex},
                             {"blame", s.blame_set}});
    }
    if (!entry->witness_done) {
      entry->witness = find_witness(s);
      entry->witness_done = true;
    }
    return reply(200, json{{"id", id},
                           {"status", to_string(s.status)},
                           {"trace", entry->witness ? trace_json(*entry->witness, s.ann.sinks) : json(nullptr)}});
  } catch (const Error& e) {
    return error(400, e.what());
  } catch (const std::exception& e) {
    return error(500, e.what());
  }
}

bool Service::serve(const std::string& host, int port, std::atomic<int>* bound_port) {
  httplib::Server server;
  auto route = [this](const httplib::Request& req, httplib::Response& res) {
    HttpResult r = handle(req.method, req.path, req.body);
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  server.Get(R"(/sessions(/.*)?)", route);
  server.Post(R"(/sessions(/.*)?)", route);
  int actual = port;
  if (port == 0) {
    actual = server.bind_to_any_port(host);
  } else if (!server.bind_to_port(host, port)) {
    actual = -1;
  }
  if (actual < 0) return false;
  {
    std::lock_guard<std::mutex> lock(server_mu_);
    server_ = &server;
  }
  if (bound_port) bound_port->store(actual);
  const bool ok = server.listen_after_bind();
  std::lock_guard<std::mutex> lock(server_mu_);
  server_ = nullptr;
  return ok;
}

void Service::stop() {
  std::lock_guard<std::mutex> lock(server_mu_);
  if (server_) server_->stop();
}

}  // namespace ctv
