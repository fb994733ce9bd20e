// Copyright 2026 The lefcert Authors
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

#include "lefcert/cli.h"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "lefcert/certify.h"
#include "lefcert/collective.h"
#include "lefcert/error.h"
#include "lefcert/harness.h"
#include "lefcert/io.h"
#include "lefcert/oracle.h"
#include "lefcert/parallel.h"
#include "lefcert/results.h"
#include "lefcert/rng.h"

namespace lefcert::cli {
namespace {

using results::Json;

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

struct EngineFlags {
  std::string preset;
  std::string metric = "cosine";
  double lambda = 0.0;
  std::string m = "auto";
  int t = 0;
  std::string threat = "unbounded";
  double r = 0.1;
  double sigma = 1.0;
  int n = 1000;
  double alpha = 0.01;
  bool no_hoeffding = false;
};

void add_engine_flags(CLI::App* sub, EngineFlags& f, bool with_budget) {
  sub->add_option("--preset", f.preset,
                  "Start from image, graph or smoothed defaults; explicit flags win")
      ->check(CLI::IsMember({"image", "graph", "smoothed"}));
  sub->add_option("--metric", f.metric, "Distance: cosine or l2")
      ->check(CLI::IsMember({"cosine", "l2"}))
      ->capture_default_str();
  sub->add_option("--lambda", f.lambda, "Weight of the text term")->capture_default_str();
  sub->add_option("--m", f.m, "Trim count M, or auto for floor((K-1)/2)")
      ->capture_default_str();
  if (with_budget) {
    sub->add_option("--t", f.t, "Poisoning budget T")->capture_default_str();
  }
  sub->add_option("--threat", f.threat, "unbounded or l2ball")
      ->check(CLI::IsMember({"unbounded", "l2ball"}))
      ->capture_default_str();
  sub->add_option("--r", f.r, "l2-ball radius")->capture_default_str();
  sub->add_option("--sigma", f.sigma, "Smoothing noise level")->capture_default_str();
  sub->add_option("--n", f.n, "Noise samples per smoothed embedding")
      ->capture_default_str();
  sub->add_option("--alpha", f.alpha, "Hoeffding failure probability")
      ->capture_default_str();
  sub->add_flag("--no-hoeffding", f.no_hoeffding,
                "Treat smoothed distances as exact");
}

int parse_trim(const std::string& s, int shots) {
  if (s == "auto") return max_trim(shots);
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(ErrorCode::kInvalidParameter, "--m must be an integer or auto");
  }
  return v;
}

CertConfig make_config(const CLI::App* sub, const EngineFlags& f, int shots) {
  const bool given_any = f.preset.empty();
  auto given = [&](const char* name) { return given_any || sub->count(name) > 0; };
  CertConfig cfg;
  if (f.preset == "image") cfg = harness::presets::image(shots);
  if (f.preset == "graph") cfg = harness::presets::graph(shots);
  if (f.preset == "smoothed") cfg = harness::presets::smoothed(shots);
  if (given("--metric")) cfg.metric = parse_metric(f.metric);
  if (given("--lambda")) cfg.lambda = f.lambda;
  if (given("--m")) cfg.trim = parse_trim(f.m, shots);
  cfg.budget = f.t;
  if (given("--threat")) {
    cfg.threat = f.threat == "l2ball"
                     ? ThreatModel::l2_ball(f.r, f.sigma, f.n, f.alpha)
                     : ThreatModel::unbounded();
  }
  if (cfg.threat.kind == ThreatKind::kL2Ball) {
    if (given("--r")) cfg.threat.radius = f.r;
    if (given("--sigma")) cfg.threat.sigma = f.sigma;
    if (given("--n")) cfg.threat.noise_samples = f.n;
    if (given("--alpha")) cfg.threat.confidence_alpha = f.alpha;
    if (sub->count("--no-hoeffding") > 0) cfg.threat.hoeffding = !f.no_hoeffding;
  }
  cfg.validate(shots);
  return cfg;
}

// Shortest decimal that reads back to the same double.
std::string shortest(double v) {
  char buf[32];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

// The subcommand's effective flags as a config file that reproduces the run.
// With `cfg`, the engine keys carry the resolved values instead of the raw
// flags, so a preset plus overrides comes back as one explicit setting each.
std::string echo(const CLI::App* sub, const CertConfig* cfg = nullptr) {
  static const std::set<std::string> kEngineKeys{
      "preset", "metric", "lambda", "m", "t", "threat",
      "r", "sigma", "n", "alpha", "no-hoeffding"};
  std::string out = "[" + sub->get_name() + "]\n";
  std::istringstream lines(sub->config_to_str(true, false));
  for (std::string line; std::getline(lines, line);) {
    if (cfg != nullptr && kEngineKeys.count(line.substr(0, line.find('='))) > 0) continue;
    out += line + "\n";
  }
  if (cfg == nullptr) return out;
  out += "metric=\"" + std::string(metric_name(cfg->metric)) + "\"\n";
  out += "lambda=" + shortest(cfg->lambda) + "\n";
  out += "m=\"" + std::to_string(cfg->trim) + "\"\n";
  if (sub->get_option_no_throw("--t") != nullptr) {
    out += "t=" + std::to_string(cfg->budget) + "\n";
  }
  out += "threat=\"" + std::string(threat_name(cfg->threat.kind)) + "\"\n";
  if (cfg->threat.kind == ThreatKind::kL2Ball) {
    out += "r=" + shortest(cfg->threat.radius) + "\n";
    out += "sigma=" + shortest(cfg->threat.sigma) + "\n";
    out += "n=" + std::to_string(cfg->threat.noise_samples) + "\n";
    out += "alpha=" + shortest(cfg->threat.confidence_alpha) + "\n";
    out += std::string("no-hoeffding=") + (cfg->threat.hoeffding ? "false" : "true") + "\n";
  }
  return out;
}

struct EpisodeFiles {
  std::string support;
  std::string text;
  std::string queries;
};

void add_episode_files(CLI::App* sub, EpisodeFiles& f) {
  sub->add_option("--support", f.support, "Support embeddings")->required();
  sub->add_option("--text", f.text, "Class text embeddings")->required();
  sub->add_option("--queries", f.queries, "Query embeddings")->required();
}

Episode load_episode(const EpisodeFiles& files, int noise_samples) {
  auto rows = [&](const std::string& path) {
    return io::load_rows(io::read_embeddings(path), noise_samples);
  };
  return io::assemble_episode(rows(files.support), rows(files.text),
                              rows(files.queries));
}

Json episode_json(const Episode& e) {
  Json j;
  j["classes"] = e.num_classes;
  j["shots"] = e.shots;
  j["dim"] = e.support.front().front().dim();
  j["queries"] = e.queries.size();
  j["label_names"] = e.label_names;
  return j;
}

int cmd_certify(const CLI::App* sub, const EpisodeFiles& files,
                const EngineFlags& flags, const std::string& out_path,
                std::ostream& out) {
  const Episode e = load_episode(files, flags.n);
  const CertConfig cfg = make_config(sub, flags, e.shots);
  const auto res = certify::certify_episode(e, cfg);

  int labeled = 0;
  int correct = 0;
  int certified = 0;
  int certified_correct = 0;
  Json queries = Json::array();
  for (std::size_t i = 0; i < res.size(); ++i) {
    const auto& r = res[i];
    const int label = e.queries[i].label;
    Json q;
    q["index"] = i;
    q["label"] = label > 0 ? Json(e.label_names[static_cast<std::size_t>(label - 1)])
                           : Json(nullptr);
    q["predicted_name"] =
        e.label_names[static_cast<std::size_t>(r.certificate.predicted - 1)];
    q["correct"] = label > 0 ? Json(r.correct) : Json(nullptr);
    const Json cert = results::certificate_json(r.certificate);
    for (const auto& [k, v] : cert.items()) q[k] = v;
    Json scores = Json::array();
    for (double s : r.scores.scores) scores.push_back(results::number(s));
    q["scores"] = scores;
    q["bounds"] = results::bound_table_json(r.certificate.bound_table);
    queries.push_back(q);
    labeled += label > 0;
    correct += label > 0 && r.correct;
    certified += r.certificate.certified;
    certified_correct += label > 0 && r.correct && r.certificate.certified;
  }
  const double n = res.empty() ? 1.0 : static_cast<double>(res.size());
  Json summary;
  summary["num_queries"] = res.size();
  summary["labeled_queries"] = labeled;
  summary["certified_ratio"] = certified / n;
  summary["clean_accuracy"] = labeled > 0 ? Json(correct / double(labeled)) : Json(nullptr);
  summary["certified_accuracy"] =
      labeled > 0 ? Json(certified_correct / double(labeled)) : Json(nullptr);

  Json j;
  j["command"] = "certify";
  j["config"] = results::config_json(cfg);
  j["episode"] = episode_json(e);
  j["summary"] = summary;
  j["queries"] = queries;
  j["effective_config"] = echo(sub, &cfg);
  results::write_results(j, out_path);
  out << "certify: " << res.size() << " queries, certified ratio "
      << certified / n << ", results in " << out_path << "\n";
  return kExitOk;
}

int cmd_collective(const CLI::App* sub, const EpisodeFiles& files,
                   const EngineFlags& flags, const std::string& out_path,
                   std::ostream& out) {
  const Episode e = load_episode(files, flags.n);
  const CertConfig cfg = make_config(sub, flags, e.shots);
  const auto r = collective::collective_certify(e, cfg);
  const auto sample = certify::certify_episode(e, cfg);
  const auto certified = std::count_if(sample.begin(), sample.end(), [](const auto& q) {
    return q.certificate.certified;
  });

  Json j;
  j["command"] = "collective";
  j["config"] = results::config_json(cfg);
  j["episode"] = episode_json(e);
  j["collective"] = results::collective_json(r);
  j["sample_wise_certified_ratio"] =
      sample.empty() ? 1.0 : certified / static_cast<double>(sample.size());
  j["effective_config"] = echo(sub, &cfg);
  results::write_results(j, out_path);
  out << "collective: " << r.num_queries << " queries, at most " << r.b_max
      << " broken, certified ratio " << r.certified_ratio << ", results in "
      << out_path << "\n";
  return kExitOk;
}

struct SweepFlags {
  std::string pool;
  int classes = 5;
  int shots = 10;
  int queries_per_class = 1;
  int t_max = 0;
  std::vector<std::string> m_list;
  std::vector<double> lambda_list;
  int episodes = 10;
  std::uint64_t seed = 0;
  std::string protocol = "default";
  bool no_timing = false;
};

int cmd_sweep(const CLI::App* sub, const SweepFlags& s, const EngineFlags& flags,
              const std::string& out_path, std::ostream& out) {
  const auto pool = io::read_pool(s.pool);
  const CertConfig base = make_config(sub, flags, s.shots);
  harness::ProtocolOptions opts;
  opts.num_classes = s.classes;
  opts.shots = s.shots;
  opts.queries_per_class = s.queries_per_class;
  opts.episodes = s.episodes;
  opts.max_budget = s.t_max;
  opts.seed = s.seed;
  std::vector<int> trims;
  for (const auto& m : s.m_list) trims.push_back(parse_trim(m, s.shots));
  if (trims.empty()) trims.push_back(base.trim);
  std::vector<double> lambdas = s.lambda_list;
  if (lambdas.empty()) lambdas.push_back(base.lambda);
  const auto protocol =
      s.protocol == "collective" ? harness::Protocol::kCollective : harness::Protocol::kDefault;
  const auto rows = harness::sweep(pool, base, opts, trims, lambdas, protocol);

  const bool timing = !s.no_timing;
  const bool csv = out_path.size() >= 4 && out_path.substr(out_path.size() - 4) == ".csv";
  if (csv) {
    io::write_file_atomic(out_path, results::sweep_csv(rows, timing));
  } else {
    Json j;
    j["command"] = "sweep";
    j["config"] = results::config_json(base);
    Json p;
    p["protocol"] = s.protocol;
    p["classes"] = s.classes;
    p["shots"] = s.shots;
    p["queries_per_class"] = s.queries_per_class;
    p["episodes"] = s.episodes;
    p["t_max"] = s.t_max;
    p["seed"] = s.seed;
    j["protocol_options"] = p;
    j["rows"] = results::sweep_json(rows, timing);
    j["effective_config"] = echo(sub, &base);
    results::write_results(j, out_path);
  }
  out << "sweep: " << rows.size() << " rows, results in " << out_path << "\n";
  return kExitOk;
}

int cmd_oracle(const CLI::App* sub, const oracle::CheckOptions& opts,
               const std::string& out_path, std::ostream& out) {
  if (opts.grid_steps < 2) {
    throw Error(ErrorCode::kInvalidParameter, "--grid-steps must be at least 2");
  }
  const auto report = oracle::oracle_check(opts);
  Json j;
  j["command"] = "oracle-check";
  j["report"] = results::oracle_report_json(report);
  j["effective_config"] = echo(sub);
  results::write_results(j, out_path);
  out << "oracle-check: " << report.trials << " trials, "
      << (report.clean() ? "no violations" : "VIOLATIONS FOUND") << ", results in "
      << out_path << "\n";
  return kExitOk;
}

struct SyntheticFlags {
  harness::SyntheticPoolSpec spec;
  int shots = 0;
  int queries_per_class = 1;
};

int cmd_gen(const SyntheticFlags& f, const std::string& out_path, std::ostream& out) {
  const auto pool = harness::generate_synthetic_pool(f.spec);
  io::write_pool(pool, out_path);
  out << "gen-synthetic: " << f.spec.num_classes << " classes x " << f.spec.per_class
      << " members, pool in " << out_path << " and " << out_path << ".text\n";
  if (f.shots <= 0) return kExitOk;

  const Episode e = harness::sample_episode(pool, f.spec.num_classes, f.shots,
                                            f.queries_per_class,
                                            derive_seed(f.spec.seed, 0));
  std::vector<Embedding> support;
  std::vector<std::string> support_labels;
  for (int c = 0; c < e.num_classes; ++c) {
    for (const auto& x : e.support[static_cast<std::size_t>(c)]) {
      support.push_back(x);
      support_labels.push_back(e.label_names[static_cast<std::size_t>(c)]);
    }
  }
  std::vector<Embedding> queries;
  std::vector<std::string> query_labels;
  for (const auto& q : e.queries) {
    queries.push_back(q.embedding);
    query_labels.push_back(e.label_names[static_cast<std::size_t>(q.label - 1)]);
  }
  io::write_embeddings(io::from_embeddings(support, std::move(support_labels), true),
                       out_path + ".support");
  io::write_embeddings(io::from_embeddings(queries, std::move(query_labels), true),
                       out_path + ".queries");
  out << "gen-synthetic: episode with K=" << f.shots << " in " << out_path
      << ".support and " << out_path << ".queries\n";
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certified few-shot classification under data poisoning", "lefcert"};
  app.set_config("--config", "", "Read flags from a TOML or INI file; flags win");
  app.require_subcommand(1);
  int jobs = 0;
  auto* jobs_opt =
      app.add_option("--jobs", jobs, "Worker threads, 0 uses all available (env LEFCERT_JOBS)")
          ->check(CLI::NonNegativeNumber);

  EpisodeFiles cert_files;
  EngineFlags cert_flags;
  std::string cert_out;
  auto* certify_cmd = app.add_subcommand("certify", "Sample-wise certification");
  add_episode_files(certify_cmd, cert_files);
  add_engine_flags(certify_cmd, cert_flags, true);
  certify_cmd->add_option("--out", cert_out, "Results JSON")->required();

  EpisodeFiles coll_files;
  EngineFlags coll_flags;
  std::string coll_out;
  auto* collective_cmd = app.add_subcommand("collective", "Collective certification");
  add_episode_files(collective_cmd, coll_files);
  add_engine_flags(collective_cmd, coll_flags, true);
  collective_cmd->add_option("--out", coll_out, "Results JSON")->required();

  SweepFlags sweep_flags;
  EngineFlags sweep_engine;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "Protocol sweep over M and lambda");
  sweep_cmd->add_option("--pool", sweep_flags.pool, "Pool file (and POOL.text)")
      ->required();
  sweep_cmd->add_option("--classes", sweep_flags.classes, "Classes per episode")
      ->capture_default_str();
  sweep_cmd->add_option("--shots", sweep_flags.shots, "Shots per class")
      ->capture_default_str();
  sweep_cmd->add_option("--queries-per-class", sweep_flags.queries_per_class)
      ->capture_default_str();
  sweep_cmd->add_option("--t-max", sweep_flags.t_max, "Largest budget reported")
      ->capture_default_str();
  sweep_cmd->add_option("--m-list", sweep_flags.m_list, "Trim values, comma separated")
      ->delimiter(',');
  sweep_cmd->add_option("--lambda-list", sweep_flags.lambda_list,
                        "Lambda values, comma separated")
      ->delimiter(',');
  sweep_cmd->add_option("--episodes", sweep_flags.episodes)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_flags.seed)->capture_default_str();
  sweep_cmd->add_option("--protocol", sweep_flags.protocol)
      ->check(CLI::IsMember({"default", "collective"}))
      ->capture_default_str();
  sweep_cmd->add_flag("--no-timing", sweep_flags.no_timing,
                      "Leave runtimes out so reruns are byte-identical");
  add_engine_flags(sweep_cmd, sweep_engine, false);
  sweep_cmd->add_option("--out", sweep_out, "Results JSON, or CSV for *.csv")
      ->required();

  oracle::CheckOptions oracle_opts;
  std::string oracle_out;
  auto* oracle_cmd = app.add_subcommand("oracle-check", "Brute-force bound validation");
  oracle_cmd->add_option("--trials", oracle_opts.trials)->capture_default_str();
  oracle_cmd->add_option("--seed", oracle_opts.seed)->capture_default_str();
  oracle_cmd->add_option("--grid-steps", oracle_opts.grid_steps)->capture_default_str();
  oracle_cmd->add_option("--out", oracle_out, "Report JSON")->required();

  SyntheticFlags gen;
  std::string gen_out;
  auto* gen_cmd = app.add_subcommand("gen-synthetic", "Write a synthetic pool");
  gen_cmd->add_option("--classes", gen.spec.num_classes)->capture_default_str();
  gen_cmd->add_option("--per-class", gen.spec.per_class)->capture_default_str();
  gen_cmd->add_option("--dim", gen.spec.dim)->capture_default_str();
  gen_cmd->add_option("--spread", gen.spec.intra_spread)->capture_default_str();
  gen_cmd->add_option("--gap", gen.spec.inter_gap)->capture_default_str();
  gen_cmd->add_option("--text-offset", gen.spec.text_offset)->capture_default_str();
  gen_cmd->add_option("--seed", gen.spec.seed)->capture_default_str();
  gen_cmd->add_option("--shots", gen.shots,
                      "Also write OUT.support and OUT.queries for one episode");
  gen_cmd->add_option("--queries-per-class", gen.queries_per_class)
      ->capture_default_str();
  gen_cmd->add_option("--out", gen_out, "Pool file; text rows go to OUT.text")
      ->required();

  for (auto* sub : {certify_cmd, collective_cmd, sweep_cmd, oracle_cmd, gen_cmd}) {
    sub->configurable();
  }

  std::vector<std::string> argv_storage{"lefcert"};
  argv_storage.insert(argv_storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& a : argv_storage) argv.push_back(a.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::FileError& e) {
    err << "IO_FAILURE: " << one_line(e.what()) << "\n";
    return kExitIo;
  } catch (const CLI::ParseError& e) {
    err << "INVALID_PARAMETER: " << one_line(e.what()) << "\n";
    return kExitConfig;
  }

  try {
    if (jobs_opt->count() == 0) {
      if (const char* env = std::getenv("LEFCERT_JOBS"); env != nullptr && *env != '\0') {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 0 || v > 4096) {
          throw Error(ErrorCode::kInvalidParameter,
                      "LEFCERT_JOBS must be a nonnegative integer, got '" + std::string(env) + "'");
        }
        jobs = static_cast<int>(v);
      }
    }
    set_jobs(jobs);
    if (certify_cmd->parsed()) {
      return cmd_certify(certify_cmd, cert_files, cert_flags, cert_out, out);
    }
    if (collective_cmd->parsed()) {
      return cmd_collective(collective_cmd, coll_files, coll_flags, coll_out, out);
    }
    if (sweep_cmd->parsed()) {
      return cmd_sweep(sweep_cmd, sweep_flags, sweep_engine, sweep_out, out);
    }
    if (oracle_cmd->parsed()) return cmd_oracle(oracle_cmd, oracle_opts, oracle_out, out);
    return cmd_gen(gen, gen_out, out);
  } catch (const Error& e) {
    err << one_line(e.what()) << "\n";
    return is_io_error(e.code()) ? kExitIo : kExitConfig;
  } catch (const std::exception& e) {
    err << "INTERNAL: " << one_line(e.what()) << "\n";
    return kExitConfig;
  }
}

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace lefcert::cli
