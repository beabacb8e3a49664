// Copyright 2026 The hgx Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <csignal>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"

#include "hgx/digest.hpp"
#include "hgx/engine.hpp"
#include "hgx/errors.hpp"
#include "hgx/serialize.hpp"
#include "hgx/server.hpp"
#include "hgx/synthetic.hpp"

namespace {

hgx::Server* g_server = nullptr;

void on_signal(int) {
  if (g_server) g_server->stop();
}

hgx::EngineConfig load_config(const std::string& path) {
  return path.empty() ? hgx::EngineConfig{} : hgx::load_engine_config(path);
}

std::filesystem::path snapshot_path(const std::string& dir, const std::string& id) {
  return std::filesystem::path(dir) / "snapshots" / (id + ".json");
}

void write_snapshot(const std::string& dir, const hgx::ModelSnapshot& s) {
  const auto path = snapshot_path(dir, s.id);
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  out << hgx::to_json(s).dump() << '\n';
  if (!out) throw hgx::AvailabilityError("cannot write " + path.string());
}

hgx::SnapshotPtr find_snapshot(const hgx::Engine& engine, const std::string& dir,
                               const std::string& id) {
  try {
    return engine.snapshot(id);
  } catch (const hgx::LookupError&) {
    std::ifstream in(snapshot_path(dir, id));
    if (!in) throw;
    return hgx::snapshot_from_json(hgx::Json::parse(in));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hgx: temporal hypergraph link prediction with analyst feedback"};
  app.require_subcommand(1);

  std::string data_dir = "hgx-data";
  std::string config_path;
  std::string session = "main";
  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--data-dir", data_dir, "State directory holding provenance.log");
    cmd->add_option("--config", config_path, "Engine config file (JSON)");
    cmd->add_option("--session", session, "Session to act on");
  };

  auto* ingest = app.add_subcommand("ingest", "Load a corpus into the session");
  std::string corpus, ontology, bin = "month";
  ingest->add_option("--corpus", corpus, "Line-delimited JSON documents")->required();
  ingest->add_option("--ontology", ontology, "Topic ontology (JSON)")->required();
  ingest->add_option("--bin", bin, "Time binning: year, month or week");
  add_common(ingest);

  auto* generate = app.add_subcommand("generate", "Load a planted-community dataset");
  hgx::PlantedConfig planted;
  std::string corpus_out;
  generate->add_option("--nodes", planted.nodes);
  generate->add_option("--edges", planted.edges);
  generate->add_option("--timesteps", planted.timesteps);
  generate->add_option("--communities", planted.communities);
  generate->add_option("--noise", planted.noise);
  generate->add_option("--seed", planted.seed);
  generate->add_option("--corpus-out", corpus_out,
                       "Write corpus.jsonl and ontology.json here instead of loading");
  add_common(generate);

  auto* train = app.add_subcommand("train", "Fit the model and forecast");
  std::optional<std::uint64_t> seed;
  train->add_option("--seed", seed, "RNG seed (config default otherwise)");
  add_common(train);

  auto* evaluate = app.add_subcommand("evaluate", "Held-out AUC and recall of a snapshot");
  std::string snapshot_id;
  std::optional<std::uint64_t> mask_seed;
  double threshold = 0.5;
  evaluate->add_option("--snapshot", snapshot_id, "Snapshot id (default: session snapshot)");
  evaluate->add_option("--mask-seed", mask_seed, "Seed of the supervision split");
  evaluate->add_option("--threshold", threshold, "Recall cutoff");
  add_common(evaluate);

  auto* serve = app.add_subcommand("serve", "Run the HTTP service");
  int port = 8080;
  std::string host = "127.0.0.1";
  serve->add_option("--port", port);
  serve->add_option("--host", host);
  add_common(serve);

  auto* exp = app.add_subcommand("export", "Write a snapshot");
  std::string format = "json", out_path;
  int horizon = 1;
  exp->add_option("--snapshot", snapshot_id, "Snapshot id (default: session snapshot)");
  exp->add_option("--format", format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
  exp->add_option("--horizon", horizon, "Forecast horizon for csv");
  exp->add_option("--out", out_path, "Output file (stdout otherwise)");
  add_common(exp);

  auto* branch = app.add_subcommand("branch", "Fork a new session from an existing one");
  std::string branch_name;
  branch->add_option("name", branch_name, "New session id")->required();
  add_common(branch);

  auto* rep = app.add_subcommand("replay", "Rebuild state from a provenance log");
  std::string log_path;
  std::optional<std::uint64_t> up_to;
  rep->add_option("--log", log_path, "Provenance log file")->required();
  rep->add_option("--up-to", up_to, "Last event to apply (default: session head)");
  rep->add_option("--config", config_path, "Engine config file (JSON)");
  rep->add_option("--session", session, "Session whose head to replay");

  CLI11_PARSE(app, argc, argv);

  try {
    const hgx::EngineConfig config = load_config(config_path);

    if (*rep) {
      std::ifstream in(log_path);
      if (!in) throw hgx::LookupError("cannot open " + log_path);
      hgx::ProvenanceLog log = hgx::ProvenanceLog::parse(in);
      const auto head = up_to ? up_to : log.head(session);
      hgx::Engine engine(config, std::move(log));
      auto state = engine.replay_to(head);
      hgx::Json out = {{"events", engine.event_count()}};
      out["head"] = head ? hgx::Json(*head) : hgx::Json(nullptr);
      out["snapshot"] = state->snapshot ? hgx::Json(state->snapshot->id) : hgx::Json(nullptr);
      out["dataset"] = state->dataset ? hgx::Json(state->dataset->digest) : hgx::Json(nullptr);
      if (state->snapshot) {
        hgx::Json preds = hgx::Json::array();
        for (const auto& p : state->snapshot->forecast.predictions) {
          preds.push_back({{"horizon", p.horizon}, {"digest", hgx::Digest().matrix(p.values).hex()}});
        }
        out["predictions"] = preds;
      }
      out["pending"] = state->pending != nullptr;
      std::cout << out.dump(2) << '\n';
      return 0;
    }

    if (*generate && !corpus_out.empty()) {
      const hgx::PlantedCorpus pc = hgx::generate_corpus(planted);
      std::filesystem::create_directories(corpus_out);
      std::ofstream docs(std::filesystem::path(corpus_out) / "corpus.jsonl");
      for (const auto& d : pc.documents) {
        hgx::Json j = {{"id", d.id}, {"author", d.author}, {"timestamp", hgx::format_timestamp(d.timestamp)}, {"text", d.text}};
        if (d.category) j["category"] = *d.category;
        docs << j.dump() << '\n';
      }
      hgx::Json ont = hgx::Json::object();
      for (const auto& t : pc.ontology.topics) ont[t.name] = t.keywords;
      std::ofstream(std::filesystem::path(corpus_out) / "ontology.json") << ont.dump(2) << '\n';
      std::cout << pc.documents.size() << " documents written to " << corpus_out << '\n';
      return 0;
    }

    auto engine = hgx::Engine::open(data_dir, config);

    if (*branch) {
      const std::string id = engine->create_session(session, branch_name);
      std::cout << "session " << id << " from " << session << '\n';
      return 0;
    }

    if (*ingest) {
      const auto seq = engine->ingest_corpus(session, corpus, ontology, hgx::binning_from_string(bin));
      auto s = engine->session(session);
      std::cout << "event " << seq << ": " << s->dataset->nodes() << " nodes, "
                << s->dataset->edges() << " edges, " << s->dataset->timesteps() << " timesteps\n";
    } else if (*generate) {
      const auto seq = engine->generate(session, planted);
      std::cout << "event " << seq << ": dataset " << engine->session(session)->dataset->digest << '\n';
    } else if (*train) {
      hgx::TrainConfig cfg;
      cfg.hyper = config.hyper;
      cfg.seed = seed.value_or(config.seed);
      cfg.supervision_fraction = config.supervision_fraction;
      const auto seq = engine->train(session, cfg);
      auto snap = engine->session(session)->snapshot;
      write_snapshot(data_dir, *snap);
      std::cout << "event " << seq << ": snapshot " << snap->id << " (" << snap->training.loss_trace.size() - 1
                << " epochs, final loss " << snap->training.loss_trace.back() << ")\n";
    } else if (*evaluate) {
      auto state = engine->session(session);
      if (!state->dataset) throw hgx::StateError("session has no data");
      hgx::SnapshotPtr snap =
          snapshot_id.empty() ? state->snapshot : find_snapshot(*engine, data_dir, snapshot_id);
      if (!snap) throw hgx::StateError("session has no trained model");
      const auto t = state->dataset->timesteps();
      const hgx::IncidenceMatrix& truth = state->dataset->implicit_graph.at(static_cast<hgx::TimeIndex>(t - 1));
      const std::uint64_t ms = mask_seed.value_or(
          state->train_config ? state->train_config->effective_mask_seed() : config.seed);
      const auto split = hgx::split_supervision(truth, config.supervision_fraction, ms);
      const auto report = hgx::evaluate(hgx::predict(snap->training), split.eval, truth, threshold);
      hgx::Json out = {{"snapshot", snap->id},   {"mask_seed", ms},
                       {"auc", report.auc},       {"recall", report.recall},
                       {"threshold", threshold},  {"positives", report.positives},
                       {"negatives", report.negatives}, {"warnings", split.warnings}};
      std::cout << out.dump(2) << '\n';
    } else if (*serve) {
      hgx::Server server(*engine);
      const int bound = server.bind(host, port);
      g_server = &server;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::cout << "serving on http://" << host << ":" << bound << std::endl;
      server.run();
      g_server = nullptr;
    } else if (*exp) {
      auto state = engine->session(session);
      hgx::SnapshotPtr snap =
          snapshot_id.empty() ? state->snapshot : find_snapshot(*engine, data_dir, snapshot_id);
      if (!snap) throw hgx::StateError("session has no trained model");
      std::string text;
      if (format == "json") {
        text = hgx::to_json(*snap).dump() + "\n";
      } else {
        if (horizon < 1 || static_cast<std::size_t>(horizon) > snap->forecast.predictions.size()) {
          throw hgx::IndexError("horizon outside the forecast");
        }
        text = hgx::to_csv(snap->forecast.predictions[static_cast<std::size_t>(horizon - 1)].values);
      }
      if (out_path.empty()) {
        std::cout << text;
      } else {
        std::ofstream(out_path) << text;
      }
    }
  } catch (const std::exception& e) {
    const auto [status, kind] = hgx::classify_error(e);
    std::cerr << "hgx: " << kind << " error: " << e.what() << '\n';
    return status >= 500 ? 2 : 1;
  }
  return 0;
}
