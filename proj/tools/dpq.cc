//
// Copyright 2026 The dpq Authors.
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

// Command-line front end: HTTP service, batch runner and interactive REPL.

#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "dpq/api.h"
#include "dpq/engine.h"
#include "httplib.h"

namespace {

using dpq::ApiResponse;
using dpq::Engine;

void Persist(const Engine& engine) {
  const std::string& path = engine.config().snapshot_path;
  if (path.empty()) return;
  if (absl::Status s = engine.SaveSnapshot(path); !s.ok()) {
    std::cerr << "snapshot: " << s.message() << "\n";
  }
}

int Serve(Engine& engine, const std::string& where) {
  const size_t colon = where.rfind(':');
  if (colon == std::string::npos) {
    std::cerr << "--serve wants addr:port\n";
    return 2;
  }
  const std::string host = where.substr(0, colon);
  const int port = std::stoi(where.substr(colon + 1));

  std::mutex mu;  // the engine is one serialized state machine
  httplib::Server server;
  auto reply = [](httplib::Response& res, const ApiResponse& r) {
    res.status = r.status;
    res.set_content(r.body.dump(), "application/json");
  };
  server.Post("/workload", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu);
    ApiResponse r = dpq::HandleWorkload(engine, req.body);
    if (r.status == 200) Persist(engine);
    reply(res, r);
  });
  server.Get("/budget", [&](const httplib::Request&, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu);
    reply(res, dpq::HandleBudget(engine));
  });
  server.Get("/tree", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu);
    reply(res, dpq::HandleTree(engine, req.get_param_value("attrs")));
  });
  server.Get("/cache/stats", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu);
    reply(res, dpq::HandleCacheStats(engine, req.get_param_value("attrs")));
  });
  server.Post("/reset", [&](const httplib::Request& req, httplib::Response& res) {
    std::lock_guard<std::mutex> lock(mu);
    ApiResponse r = dpq::HandleReset(engine, req.body);
    Persist(engine);
    reply(res, r);
  });
  std::cerr << "listening on " << host << ":" << port << "\n";
  if (!server.listen(host, port)) {
    std::cerr << "cannot bind " << where << "\n";
    return 1;
  }
  return 0;
}

// One JSON request per line (blank lines and #comments skipped), or a
// single JSON array of requests.
int Batch(Engine& engine, const std::string& path, const std::string& out_path) {
  std::ifstream in(path);
  if (!in) {
    std::cerr << "cannot open " << path << "\n";
    return 1;
  }
  std::stringstream all;
  all << in.rdbuf();
  std::vector<std::string> bodies;
  nlohmann::json arr = nlohmann::json::parse(all.str(), nullptr, false);
  if (!arr.is_discarded() && arr.is_array()) {
    for (const auto& r : arr) bodies.push_back(r.dump());
  } else {
    std::string line;
    std::istringstream lines(all.str());
    while (std::getline(lines, line)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
      bodies.push_back(line);
    }
  }
  std::ofstream file;
  if (!out_path.empty()) file.open(out_path);
  std::ostream& out = out_path.empty() ? std::cout : file;
  out << "index,mechanism,epsilon,cumulative_epsilon\n";
  for (size_t i = 0; i < bodies.size(); ++i) {
    ApiResponse r = dpq::HandleWorkload(engine, bodies[i]);
    std::string mech = "Error";
    double eps = 0;
    if (r.status == 200) {
      mech = r.body["mechanism"];
      eps = r.body["epsilon"];
    } else if (r.status == 409) {
      mech = "Rejected";
    } else {
      std::cerr << "workload " << i << ": " << r.body.value("error", "") << "\n";
    }
    out << i << ',' << mech << ',' << eps << ',' << engine.ledger().consumed() << "\n";
  }
  Persist(engine);
  return 0;
}

int Repl(Engine& engine) {
  std::string line;
  std::cout << "> " << std::flush;
  while (std::getline(std::cin, line)) {
    std::istringstream words(line);
    std::string cmd;
    words >> cmd;
    std::string rest;
    std::getline(words, rest);
    const size_t start = rest.find_first_not_of(' ');
    rest = start == std::string::npos ? "" : rest.substr(start);
    ApiResponse r;
    if (cmd.empty()) {
      std::cout << "> " << std::flush;
      continue;
    } else if (cmd == "query") {
      r = dpq::HandleWorkload(engine, rest);
      if (r.status == 200) Persist(engine);
    } else if (cmd == "budget") {
      r = dpq::HandleBudget(engine);
    } else if (cmd == "tree") {
      r = dpq::HandleTree(engine, rest);
    } else if (cmd == "stats") {
      r = dpq::HandleCacheStats(engine, rest);
    } else if (cmd == "reset") {
      std::istringstream args(rest);
      nlohmann::json body = nlohmann::json::object();
      uint64_t seed;
      double budget;
      if (args >> seed) body["seed"] = seed;
      if (args >> budget) body["total_budget"] = budget;
      r = dpq::HandleReset(engine, body.dump());
      Persist(engine);
    } else if (cmd == "quit" || cmd == "exit") {
      break;
    } else {
      r = {400, {{"error", "commands: query <json>, budget, tree <attrs>, "
                           "stats <attrs>, reset [seed] [budget], quit"}}};
    }
    std::cout << r.status << " " << r.body.dump() << "\n> " << std::flush;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Cache-aware differentially private range query engine"};
  std::string config_path, serve, batch, out;
  app.add_option("--config", config_path, "engine config JSON")->required();
  app.add_option("--serve", serve, "serve HTTP on addr:port");
  app.add_option("--batch", batch, "run a workload log and print a CSV");
  app.add_option("--out", out, "CSV output for --batch");
  CLI11_PARSE(app, argc, argv);

  absl::StatusOr<dpq::EngineConfig> config = dpq::EngineConfig::Load(config_path);
  if (!config.ok()) {
    std::cerr << config.status().message() << "\n";
    return 1;
  }
  absl::StatusOr<std::unique_ptr<Engine>> engine = Engine::FromConfig(*config);
  if (!engine.ok()) {
    std::cerr << engine.status().message() << "\n";
    return 1;
  }
  if (!serve.empty()) return Serve(**engine, serve);
  if (!batch.empty()) return Batch(**engine, batch, out);
  return Repl(**engine);
}
