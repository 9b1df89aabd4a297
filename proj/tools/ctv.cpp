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

// ctv: constant-time verification of RTL designs.
//
// Exit codes: 0 verified, 1 variable-time or exhausted, 2 usage or input
// error.

#include <CLI11.hpp>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>
#include <thread>

#include "ctv/annotations.hpp"
#include "ctv/parser.hpp"
#include "ctv/service.hpp"
#include "ctv/session.hpp"

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kVerified = 0;
constexpr int kNotVerified = 1;
constexpr int kUsage = 2;

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ctv::Error("cannot read '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

struct Inputs {
  std::string design;
  std::string annotations;
  std::string top;
  bool modular = false;
  bool inline_mode = false;
  bool json = false;

  ctv::Program program;
  ctv::Annotations ann;

  void load() {
    program = ctv::parse_program(slurp(design), top);
    ann = ctv::validate_annotations(program, ctv::parse_annotations(slurp(annotations)));
  }
};

void add_inputs(CLI::App* cmd, Inputs& in, bool with_json) {
  cmd->add_option("design", in.design, "Verilog design file")->required();
  cmd->add_option("annotations", in.annotations, "annotation file")->required();
  cmd->add_option("--top", in.top, "top module (default: the uninstantiated one)");
  auto* mod = cmd->add_flag("--modular", in.modular, "summarize submodules instead of inlining");
  auto* inl = cmd->add_flag("--inline", in.inline_mode, "inline submodules (default)");
  mod->excludes(inl);
  if (with_json) cmd->add_flag("--json", in.json, "machine-readable output");
}

int exit_for(ctv::SessionStatus s) {
  return s == ctv::SessionStatus::kVerified ? kVerified : kNotVerified;
}

json artifact_json(const ctv::ProofArtifact& a) {
  json summaries = json::object();
  for (const auto& [m, s] : a.summaries) {
    json clauses = json::array();
    for (const auto& c : s.clauses) clauses.push_back(c.render());
    summaries[m] = clauses;
  }
  return {{"verdict", a.verified ? "verified" : "failed"},
          {"mode", a.modular ? "modular" : "inline"},
          {"failed_sinks", a.failed_sinks},
          {"vartime", a.vartime},
          {"secret", a.secret},
          {"ct", a.final_state.ct},
          {"public", a.final_state.pub},
          {"summaries", summaries}};
}

int cmd_check(Inputs& in) {
  in.load();
  const ctv::ElaboratedDesign d = ctv::elaborate(in.program, !in.modular);
  const ctv::ProofArtifact a = ctv::infer(d, in.ann, in.modular);
  if (in.json) {
    std::cout << artifact_json(a).dump(2) << "\n";
  } else {
    std::cout << a.render();
  }
  return a.verified ? kVerified : kNotVerified;
}

int cmd_suggest(Inputs& in) {
  in.load();
  const ctv::SessionState s = ctv::start(in.program, in.ann, {in.modular});
  if (in.json) {
    json j = {{"status", ctv::to_string(s.status)}, {"iteration", s.iteration}};
    if (s.suggestion) {
      j["suggestion"] = {{"candidate", s.suggestion->candidate},
                         {"weight", s.suggestion->weight},
                         {"counterexample", s.suggestion->counterexample},
                         {"blame", s.suggestion->blame}};
    } else {
      j["suggestion"] = nullptr;
    }
    if (!s.note.empty()) j["note"] = s.note;
    std::cout << j.dump(2) << "\n";
  } else {
    for (const auto& line : s.transcript) std::cout << line << "\n";
    if (s.suggestion) std::cout << ctv::prompt(*s.suggestion) << "\n";
  }
  return exit_for(s.status);
}

int cmd_interactive(Inputs& in) {
  in.load();
  ctv::SessionState s = ctv::start(in.program, in.ann, {in.modular});
  size_t shown = 0;
  auto flush = [&] {
    for (; shown < s.transcript.size(); ++shown) {
      // Prompt echoes are printed live below.
      if (s.transcript[shown].rfind("> ", 0) != 0) std::cout << s.transcript[shown] << "\n";
    }
  };
  flush();
  while (!s.terminal()) {
    std::cout << ctv::prompt(*s.suggestion) << " " << std::flush;
    std::string line;
    if (!std::getline(std::cin, line)) {
      std::cout << "\ninput ended while input was needed\n";
      return kNotVerified;
    }
    const auto b = line.find_first_not_of(" \t\r");
    const std::string a = b == std::string::npos ? "" : line.substr(b, line.find_last_not_of(" \t\r") - b + 1);
    ctv::Answer ans;
    if (a.empty() || a == "y" || a == "Y" || a == "yes") {
      ans = ctv::Answer::kAccept;
    } else if (a == "n" || a == "N" || a == "no") {
      ans = ctv::Answer::kReject;
    } else {
      std::cout << "please answer y or n\n";
      continue;
    }
    ctv::respond(s, ans);
    flush();
  }
  return exit_for(s.status);
}

int cmd_replay(const std::string& script_path, Inputs& in) {
  const ctv::Script sc = ctv::parse_script(slurp(script_path));
  const fs::path base = fs::path(script_path).parent_path();
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (base / p).string(); };
  if (in.design.empty()) {
    if (sc.design.empty()) throw CLI::ValidationError("replay", "no design given on the command line or in the script");
    in.design = resolve(sc.design);
  }
  if (in.annotations.empty()) {
    if (sc.annotations.empty()) {
      throw CLI::ValidationError("replay", "no annotations given on the command line or in the script");
    }
    in.annotations = resolve(sc.annotations);
  }
  if (!in.modular && !in.inline_mode && sc.modular) in.modular = *sc.modular;
  in.load();
  const ctv::ScriptedRun r = ctv::run_scripted(in.program, in.ann, sc.answers, {in.modular});
  std::cout << r.transcript;
  return r.script_exhausted ? kNotVerified : exit_for(r.state.status);
}

int cmd_export_horn(Inputs& in, const std::string& out) {
  in.load();
  const ctv::ElaboratedDesign d = ctv::elaborate(in.program, !in.modular);
  const std::string doc = ctv::export_horn(d, in.ann, in.modular);
  if (out.empty() || out == "-") {
    std::cout << doc;
  } else {
    std::ofstream f(out, std::ios::binary);
    if (!f) throw ctv::Error("cannot write '" + out + "'");
    f << doc;
  }
  return kVerified;
}

int cmd_graph(Inputs& in) {
  in.load();
  const ctv::ElaboratedDesign d = ctv::elaborate(in.program, !in.modular);
  const ctv::ProofArtifact a = ctv::infer(d, in.ann, in.modular);
  const ctv::DepGraph g = ctv::build_depgraph(d, a);
  const ctv::ReducedGraph r = ctv::reduce(g, a.vartime, in.ann.sinks, true);
  const ctv::Counterexample cex = ctv::counterexample(r);
  if (in.json) {
    std::cout << json{{"graph", ctv::dump_graph(g, a.vartime)},
                      {"reduced", ctv::dump_graph(r.graph, a.vartime)},
                      {"counterexample", cex.nets},
                      {"nodes", g.nodes.size()},
                      {"edges", g.edge_count()}}
                     .dump(2)
              << "\n";
  } else {
    std::cout << "graph\n" << ctv::dump_graph(g, a.vartime) << "reduced\n" << ctv::dump_graph(r.graph, a.vartime);
    std::cout << "counterexample";
    for (const auto& n : cex.nets) std::cout << " " << n;
    std::cout << "\n";
  }
  return a.verified ? kVerified : kNotVerified;
}

ctv::Service* g_service = nullptr;

void on_signal(int) {
  if (g_service) g_service->stop();
}

int cmd_serve(const std::string& host, int port) {
  ctv::Service service;
  g_service = &service;
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::atomic<int> bound{-1};
  std::thread announce([&] {
    while (bound.load() < 0) std::this_thread::sleep_for(std::chrono::milliseconds(5));
    if (bound.load() > 0) std::cerr << "listening on http://" << host << ":" << bound.load() << "\n";
  });
  const bool ok = service.serve(host, port, &bound);
  if (!ok && bound.load() < 0) bound.store(0);
  announce.join();
  g_service = nullptr;
  if (!ok && bound.load() == 0) {
    std::cerr << "ctv: cannot listen on " << host << ":" << port << "\n";
    return kUsage;
  }
  return kVerified;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constant-time verification of RTL designs"};
  app.require_subcommand(1);

  Inputs check, suggest, inter, horn, graph, replay;
  std::string script, horn_out, host = "127.0.0.1";
  int port = 8080;

  add_inputs(app.add_subcommand("check", "verify the design"), check, true);
  add_inputs(app.add_subcommand("suggest", "run one round and print the suggestion"), suggest, true);
  add_inputs(app.add_subcommand("interactive", "verify with a Y/n loop on the terminal"), inter, false);
  auto* horn_cmd = app.add_subcommand("export-horn", "write the Horn clause document");
  add_inputs(horn_cmd, horn, false);
  horn_cmd->add_option("-o,--output", horn_out, "output file (default stdout)");
  add_inputs(app.add_subcommand("graph", "dump the dependency and reduced graphs"), graph, true);

  auto* replay_cmd = app.add_subcommand("replay", "replay a scripted session");
  replay_cmd->add_option("--script", script, "script file")->required();
  replay_cmd->add_option("design", replay.design, "design file (else the script's 'design' line)");
  replay_cmd->add_option("annotations", replay.annotations, "annotation file");
  replay_cmd->add_option("--top", replay.top, "top module");
  auto* rm = replay_cmd->add_flag("--modular", replay.modular, "modular mode");
  auto* ri = replay_cmd->add_flag("--inline", replay.inline_mode, "inline mode");
  rm->excludes(ri);

  auto* serve_cmd = app.add_subcommand("serve", "serve the session API over HTTP");
  serve_cmd->add_option("--host", host, "bind address")->capture_default_str();
  serve_cmd->add_option("--port", port, "port, 0 for any")->capture_default_str()->check(CLI::Range(0, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kUsage;
  }

  try {
    if (app.got_subcommand("check")) return cmd_check(check);
    if (app.got_subcommand("suggest")) return cmd_suggest(suggest);
    if (app.got_subcommand("interactive")) return cmd_interactive(inter);
    if (app.got_subcommand("export-horn")) return cmd_export_horn(horn, horn_out);
    if (app.got_subcommand("graph")) return cmd_graph(graph);
    if (app.got_subcommand("replay")) return cmd_replay(script, replay);
    if (app.got_subcommand("serve")) return cmd_serve(host, port);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "ctv: " << e.what() << "\n";
    return kUsage;
  } catch (const ctv::Error& e) {
    std::cerr << "ctv: " << e.what() << "\n";
    return kUsage;
  }
  return kUsage;
}
