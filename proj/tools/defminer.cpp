// defminer command line: one subcommand per pipeline stage plus `run`.

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "defminer/error.hpp"
#include "defminer/pipeline.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace defminer;

namespace {

std::vector<std::size_t> parse_ks(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      std::size_t used = 0;
      const auto v = std::stoull(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("invalid k '" + item + "' in --ks");
    }
  }
  if (out.empty()) throw UsageError("--ks must list at least one k");
  return out;
}

/// Header for single-stage commands: hash over the command's own arguments.
ArtifactHeader header_for(const json& args, std::uint64_t seed = 42) {
  return {fnv1a_hex(args.dump()), seed};
}

struct Args {
  std::string config, input, domain_rules, out, corpus, term = "digital twin", candidates,
      rules, endpoint, vectors, ks = "400,100,50", restage = "centroids", assignment,
      definitions, lexicon, survey, contingency, smoothing = "add_half_zero_cells", dir,
      output_dir, embedding_endpoint, ngrams = "2,3", residual_kind = "pearson";
  std::uint64_t seed = 42;
  double threshold = 0.90;
  std::size_t groups = 2;
  bool no_scale = false, no_fallback = false;
};

Smoothing parse_smoothing(const std::string& s) {
  if (s == "none") return Smoothing::none;
  if (s == "add_half_zero_cells") return Smoothing::add_half_zero_cells;
  throw UsageError("--smoothing must be none or add_half_zero_cells");
}

int cmd_ingest(const Args& a) {
  const auto corpus = apply_domain_rules(load_corpus(a.input), load_domain_rules(a.domain_rules));
  const auto h = header_for({{"cmd", "ingest"}, {"input", a.input}, {"domain_rules", a.domain_rules}});
  std::vector<json> docs;
  for (const auto& d : corpus.documents()) docs.push_back(to_json(d));
  write_jsonl(a.out, h, docs);
  spdlog::info("ingested {} documents", corpus.size());
  return 0;
}

int cmd_extract(const Args& a) {
  const auto corpus = load_corpus(a.corpus);
  PatternTemplate::Options opts;
  opts.term = a.term;
  const auto cands = dedup_exact(extract_all(corpus.with_source(Source::article), PatternTemplate(opts)));
  write_candidates(a.out, header_for({{"cmd", "extract"}, {"corpus", a.corpus}, {"term", a.term}}), cands);
  spdlog::info("{} candidates", cands.size());
  return 0;
}

int cmd_filter(const Args& a) {
  const auto cands = read_candidates(a.candidates);
  const auto rules = load_filter_rules(a.rules);
  ClassifierEndpoint ep;
  ep.url = a.endpoint;
  ep.enabled = !a.endpoint.empty();
  ep.allow_fallback = !a.no_fallback;
  const auto verdicts = classify_all(cands, ep, rules);
  const auto outcome = apply_filter(cands, verdicts);
  const auto h = header_for({{"cmd", "filter"}, {"candidates", a.candidates}, {"rules", a.rules},
                             {"endpoint", a.endpoint}});
  const Layout l{a.output_dir};
  std::vector<json> vj;
  for (const auto& v : verdicts) vj.push_back(to_json(v));
  write_jsonl(l.verdicts(), h, vj);
  write_candidates(l.kept(), h, outcome.kept);
  write_candidates(l.dropped(), h, outcome.dropped);
  write_json(l.audit(), h, {{"rules", outcome.audit}});
  spdlog::info("kept {} of {}", outcome.kept.size(), cands.size());
  return 0;
}

int cmd_embed(const Args& a) {
  const auto cands = read_candidates(a.candidates);
  std::vector<IdentifiedText> items;
  for (const auto& c : cands) items.push_back({c.id(), c.sentence});
  std::vector<DefinitionVector> vecs;
  if (!items.empty()) {
    EmbeddingEndpoint ep;
    ep.url = a.endpoint;
    ep.enabled = !a.endpoint.empty();
    ep.allow_fallback = !a.no_fallback;
    vecs = ep.enabled ? embed_external(items, ep) : embed_baseline(items);
  }
  write_vectors(a.out, header_for({{"cmd", "embed"}, {"candidates", a.candidates}, {"endpoint", a.endpoint}}),
                vecs);
  return 0;
}

int cmd_cluster(const Args& a) {
  const auto vecs = read_vectors(a.vectors);
  if (vecs.empty()) throw DataError("no vectors in " + a.vectors);
  auto ks = parse_ks(a.ks);
  const auto scaled = scale_ks(ks, vecs.size());
  if (!a.no_scale) ks = scaled;
  RestageMode mode = RestageMode::centroids;
  if (a.restage == "raw") mode = RestageMode::raw;
  else if (a.restage != "centroids") throw UsageError("--restage must be centroids or raw");
  KMeansOptions opts;
  opts.seed = a.seed;
  const auto stages = cascade_cluster(vecs, ks, opts, mode);
  write_assignments(a.out, header_for({{"cmd", "cluster"}, {"vectors", a.vectors}, {"ks", ks},
                                       {"restage", a.restage}}, a.seed),
                    stages);
  for (const auto& s : stages) {
    spdlog::info("k={} inertia={:.6f} iterations={}", s.assignment.k, s.assignment.inertia,
                 s.assignment.iterations_run);
  }
  return 0;
}

int cmd_dedup(const Args& a) {
  const auto cands = read_candidates(a.candidates);
  const auto assignment = read_final_assignment(a.assignment);
  std::vector<std::size_t> labels;
  for (const auto& c : cands) {
    auto it = assignment.find(c.id());
    if (it == assignment.end()) throw DataError("candidate " + c.id() + " has no cluster assignment");
    labels.push_back(it->second);
  }
  const auto res = dedup_within_clusters(cands, labels, a.threshold);
  const auto h = header_for({{"cmd", "dedup"}, {"candidates", a.candidates}, {"assignment", a.assignment},
                             {"threshold", a.threshold}});
  const Layout l{a.output_dir};
  write_records(l.definitions(), h, to_records(res.survivors));
  write_dedup_decisions(l.dedup_decisions(), h, res.decisions);
  spdlog::info("{} survivors, {} dropped", res.survivors.size(), res.decisions.size());
  return 0;
}

int cmd_components(const Args& a) {
  auto records = read_records(a.definitions);
  const auto lex = load_lexicon(a.lexicon);
  std::vector<std::string> survey;
  if (!a.survey.empty()) {
    for (const auto& d : load_corpus(a.survey).with_source(Source::survey)) {
      for (auto& s : split_sentences(d.text)) survey.push_back(std::move(s.text));
    }
  }
  const auto h = header_for({{"cmd", "components"}, {"definitions", a.definitions}, {"lexicon", a.lexicon},
                             {"survey", a.survey}, {"ngrams", a.ngrams}});
  components_stage(std::move(records), survey, lex, parse_ks(a.ngrams), Layout{a.output_dir}, h);
  return 0;
}

int cmd_stats(const Args& a) {
  const auto table = read_contingency(a.contingency);
  const ResidualKind kind = a.residual_kind == "adjusted" ? ResidualKind::adjusted : ResidualKind::pearson;
  if (a.residual_kind != "adjusted" && a.residual_kind != "pearson") {
    throw UsageError("--residuals must be pearson or adjusted");
  }
  const auto h = header_for({{"cmd", "stats"}, {"contingency", a.contingency}, {"smoothing", a.smoothing},
                             {"groups", a.groups}, {"residuals", a.residual_kind}});
  stats_stage(&table, "", parse_smoothing(a.smoothing), kind, a.groups, Layout{a.output_dir}, h);
  return 0;
}

int cmd_report(const Args& a) {
  const Layout l{a.dir};
  const auto manifest = manifest_from_json(read_json(l.run_manifest()));
  emit_report(manifest, l, ArtifactHeader{manifest.config_hash, manifest.seed});
  std::cout << read_file(l.digest());
  return 0;
}

int cmd_run(const Args& a, const CLI::App& sub) {
  json j;
  fs::path base;
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw UsageError("cannot open config " + a.config);
    try {
      j = json::parse(in);
    } catch (const json::parse_error& e) {
      throw UsageError("malformed config " + a.config + ": " + e.what());
    }
    base = fs::absolute(a.config).parent_path();
  }
  // Flags given on the command line override the config key of the same name.
  auto given = [&](const char* flag) { return sub.count(flag) > 0; };
  if (given("--input")) j["input"] = fs::absolute(a.input).string();
  if (given("--domain-rules")) j["domain_rules"] = fs::absolute(a.domain_rules).string();
  if (given("--rules")) j["filter_rules"] = fs::absolute(a.rules).string();
  if (given("--lexicon")) j["lexicon"] = fs::absolute(a.lexicon).string();
  if (given("--output-dir")) j["output_dir"] = fs::absolute(a.output_dir).string();
  if (given("--term")) j["pattern"]["term"] = a.term;
  if (given("--ks")) j["ks"] = parse_ks(a.ks);
  if (given("--seed")) j["seed"] = a.seed;
  if (given("--threshold")) j["dedup_threshold"] = a.threshold;
  if (given("--restage")) j["restage"] = a.restage;
  if (given("--smoothing")) j["smoothing"] = a.smoothing;
  if (given("--groups")) j["groups"] = a.groups;
  if (given("--no-scale")) j["scale_ks"] = false;
  if (given("--endpoint")) {
    j["classifier"]["url"] = a.endpoint;
    j["classifier"]["enabled"] = true;
  }
  if (given("--embedding-endpoint")) {
    j["embedding"]["url"] = a.embedding_endpoint;
    j["embedding"]["mode"] = "external";
  }
  if (given("--no-fallback")) {
    if (j.contains("classifier")) j["classifier"]["allow_fallback"] = false;
    if (j.contains("embedding")) j["embedding"]["allow_fallback"] = false;
  }
  const auto cfg = config_from_json(j, base);
  const auto m = run_pipeline(cfg);
  std::cout << read_file(Layout{cfg.output_dir}.digest());
  spdlog::info("outputs in {}", cfg.output_dir.string());
  return m.counts.empty() ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"defminer: mine definitions of a term from a document corpus"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");
  Args a;

  auto* ingest = app.add_subcommand("ingest", "Load, normalize and label a corpus");
  ingest->add_option("--input", a.input, "Corpus JSONL")->required();
  ingest->add_option("--domain-rules", a.domain_rules, "Domain rules JSON")->required();
  ingest->add_option("--out", a.out, "Normalized corpus JSONL")->required();

  auto* extract = app.add_subcommand("extract", "Extract definition candidates");
  extract->add_option("--corpus", a.corpus, "Normalized corpus JSONL")->required();
  extract->add_option("--term", a.term, "Term to define");
  extract->add_option("--out", a.out, "Candidates JSONL")->required();

  auto* filter = app.add_subcommand("filter", "Drop incomplete definitions");
  filter->add_option("--candidates", a.candidates, "Candidates JSONL")->required();
  filter->add_option("--rules", a.rules, "Filter rules JSON")->required();
  filter->add_option("--endpoint", a.endpoint, "Classifier URL (http)");
  filter->add_flag("--no-fallback", a.no_fallback, "Fail instead of falling back to the heuristics");
  filter->add_option("--out-dir", a.output_dir, "Output directory")->default_val(".");

  auto* embed = app.add_subcommand("embed", "Vectorize kept candidates");
  embed->add_option("--candidates", a.candidates, "Kept candidates JSONL")->required();
  embed->add_option("--endpoint", a.endpoint, "Embedding URL (http)");
  embed->add_flag("--no-fallback", a.no_fallback, "Fail instead of falling back to TF-IDF");
  embed->add_option("--out", a.out, "Vectors JSONL")->required();

  auto* cluster = app.add_subcommand("cluster", "Cascade k-means");
  cluster->add_option("--vectors", a.vectors, "Vectors JSONL")->required();
  cluster->add_option("--ks", a.ks, "Strictly decreasing k schedule");
  cluster->add_option("--seed", a.seed, "Random seed");
  cluster->add_option("--restage", a.restage, "centroids or raw");
  cluster->add_flag("--no-scale", a.no_scale, "Use ks as given instead of scaling to corpus size");
  cluster->add_option("--out", a.out, "Assignments JSONL")->required();

  auto* dedup = app.add_subcommand("dedup", "Fuzzy dedup within clusters");
  dedup->add_option("--candidates", a.candidates, "Kept candidates JSONL")->required();
  dedup->add_option("--assignment", a.assignment, "Assignments JSONL")->required();
  dedup->add_option("--threshold", a.threshold, "Similarity threshold");
  dedup->add_option("--out-dir", a.output_dir, "Output directory")->default_val(".");

  auto* components = app.add_subcommand("components", "Tag components and count terms");
  components->add_option("--definitions", a.definitions, "Definitions JSONL")->required();
  components->add_option("--lexicon", a.lexicon, "Lexicon JSON")->required();
  components->add_option("--survey", a.survey, "Corpus JSONL holding survey documents");
  components->add_option("--ngrams", a.ngrams, "n-gram sizes");
  components->add_option("--out-dir", a.output_dir, "Output directory")->default_val(".");

  auto* stats = app.add_subcommand("stats", "Chi-square, residuals and component groups");
  stats->add_option("--contingency", a.contingency, "Contingency CSV")->required();
  stats->add_option("--smoothing", a.smoothing, "none or add_half_zero_cells");
  stats->add_option("--residuals", a.residual_kind, "pearson or adjusted");
  stats->add_option("--groups", a.groups, "Number of component groups");
  stats->add_option("--out-dir", a.output_dir, "Output directory")->default_val(".");

  auto* report = app.add_subcommand("report", "Render the report of a finished run");
  report->add_option("--dir", a.dir, "Run output directory")->required();

  auto* run = app.add_subcommand("run", "Run the whole pipeline");
  run->add_option("--config", a.config, "Config JSON");
  run->add_option("--input", a.input, "Corpus JSONL");
  run->add_option("--domain-rules", a.domain_rules, "Domain rules JSON");
  run->add_option("--rules", a.rules, "Filter rules JSON");
  run->add_option("--lexicon", a.lexicon, "Lexicon JSON");
  run->add_option("--output-dir", a.output_dir, "Output directory");
  run->add_option("--term", a.term, "Term to define");
  run->add_option("--ks", a.ks, "Strictly decreasing k schedule");
  run->add_option("--seed", a.seed, "Random seed");
  run->add_option("--threshold", a.threshold, "Dedup similarity threshold");
  run->add_option("--restage", a.restage, "centroids or raw");
  run->add_option("--smoothing", a.smoothing, "none or add_half_zero_cells");
  run->add_option("--groups", a.groups, "Number of component groups");
  run->add_flag("--no-scale", a.no_scale, "Use ks as given");
  run->add_option("--endpoint", a.endpoint, "Classifier URL (http)");
  run->add_option("--embedding-endpoint", a.embedding_endpoint, "Embedding URL (http)");
  run->add_flag("--no-fallback", a.no_fallback, "Fail on endpoint errors");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }
  spdlog::set_default_logger(spdlog::stderr_color_mt("defminer"));
  spdlog::set_level(verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    if (*ingest) return cmd_ingest(a);
    if (*extract) return cmd_extract(a);
    if (*filter) return cmd_filter(a);
    if (*embed) return cmd_embed(a);
    if (*cluster) return cmd_cluster(a);
    if (*dedup) return cmd_dedup(a);
    if (*components) return cmd_components(a);
    if (*stats) return cmd_stats(a);
    if (*report) return cmd_report(a);
    if (*run) return cmd_run(a, *run);
  } catch (const StageError& e) {
    std::cerr << "defminer: " << e.what() << '\n';
    return e.exit_code();
  } catch (const UsageError& e) {
    std::cerr << "defminer: " << e.what() << '\n';
    return 1;
  } catch (const EndpointError& e) {
    std::cerr << "defminer: endpoint failure: " << e.what() << '\n';
    return 3;
  } catch (const DataError& e) {
    std::cerr << "defminer: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "defminer: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
