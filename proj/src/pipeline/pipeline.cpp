#include "pipeline/pipeline.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "aggregate/aggregate.hpp"
#include "annotate/annotate.hpp"
#include "common/csv.hpp"
#include "common/hash.hpp"
#include "common/io.hpp"
#include "common/rng.hpp"
#include "corpus/corpus.hpp"
#include "disruption/disruption.hpp"
#include "embedding/embedding.hpp"
#include "stats/stats.hpp"
#include "tasknet/tasknet.hpp"

#ifndef AIX_VERSION
#define AIX_VERSION "0.0.0"
#endif

namespace aix::pipeline {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;
using embedding::TaskImpact;

namespace {

constexpr std::array<std::string_view, 11> kStages{
    "score",   "filter",    "match",  "classify",  "network",  "sample",
    "annotate", "consensus", "zscores", "aggregate", "correlate"};

// Groups that get a task network, in output order.
constexpr std::array<TaskImpact, 3> kNetworkGroups{TaskImpact::Disruptive,
                                                   TaskImpact::Consolidating,
                                                   TaskImpact::NotImpacted};

// Which subcommand writes each artifact, for missing-input errors.
const std::map<std::string, std::string, std::less<>>& producers() {
  static const std::map<std::string, std::string, std::less<>> m{
      {"scores.csv", "score"},
      {"ai_patents.csv", "filter"},
      {"best_matches.csv", "match"},
      {"matches.csv", "classify"},
      {"network.json", "network"},
      {"annotation_set.csv", "sample"},
      {"llm_annotations.csv", "annotate"},
      {"consensus.csv", "consensus"},
      {"exposure.csv", "aggregate"},
  };
  return m;
}

std::string producer_of(std::string_view name) {
  auto it = producers().find(name);
  if (it != producers().end()) return it->second;
  if (name.starts_with("network_") || name.starts_with("partition_")) return "network";
  return "run-all";
}

class Stage {
public:
  Stage(const PipelineConfig& cfg, std::string_view name, const Logger& logger)
      : cfg_(cfg), logger_(logger) {
    report_.stage = name;
    stage_seed_ = derive_seed(cfg.seed, name);
  }

  const PipelineConfig& cfg() const { return cfg_; }
  std::uint64_t stage_seed() const { return stage_seed_; }

  // A configured input file.
  const fs::path& input(const fs::path& path) {
    auto rel = path.lexically_relative(cfg_.base_dir);
    record_input(rel.empty() ? path.string() : rel.generic_string(), path);
    return path;
  }

  // An artifact of an upstream stage.
  fs::path artifact(const std::string& name) {
    fs::path p = cfg_.out_dir / name;
    if (!fs::exists(p))
      fail(ErrorKind::MissingArtifact, "missing {} in {}; run `{}` first", name,
           cfg_.out_dir.string(), producer_of(name));
    record_input(name, p);
    return p;
  }

  void write(const std::string& name, const std::string& contents) {
    io::write_file(cfg_.out_dir / name, contents);
    outputs_.push_back({name, sha256_hex(contents)});
    report_.outputs.push_back(name);
  }

  void warn(std::string message) {
    if (logger_) logger_(LogLevel::Warning, fmt::format("{}: {}", report_.stage, message));
    report_.warnings.push_back(std::move(message));
  }

  void warn_all(const Warnings& warnings) {
    for (const auto& w : warnings) warn(w);
  }

  void param(const std::string& key, ojson value) { params_[key] = std::move(value); }

  StageReport finish() {
    ojson m;
    m["stage"] = report_.stage;
    m["version"] = AIX_VERSION;
    m["seed"] = cfg_.seed;
    m["stage_seed"] = stage_seed_;
    m["parameters"] = params_.is_null() ? ojson::object() : params_;
    auto list = [](const std::vector<std::pair<std::string, std::string>>& items) {
      ojson arr = ojson::array();
      for (const auto& [name, sha] : items) arr.push_back({{"name", name}, {"sha256", sha}});
      return arr;
    };
    m["inputs"] = list(inputs_);
    m["outputs"] = list(outputs_);
    m["warnings"] = report_.warnings;
    io::write_file(cfg_.out_dir / (report_.stage + ".manifest.json"), m.dump(2) + "\n");
    if (logger_)
      logger_(LogLevel::Info, fmt::format("{}: wrote {} file(s) to {}", report_.stage,
                                          report_.outputs.size(), cfg_.out_dir.string()));
    return report_;
  }

private:
  void record_input(const std::string& name, const fs::path& path) {
    for (const auto& [n, sha] : inputs_)
      if (n == name) return;
    inputs_.push_back({name, sha256_file(path)});
  }

  const PipelineConfig& cfg_;
  const Logger& logger_;
  StageReport report_;
  std::uint64_t stage_seed_ = 0;
  std::vector<std::pair<std::string, std::string>> inputs_, outputs_;
  ojson params_;
};

std::string json_text(const ojson& j) { return j.dump(2) + "\n"; }

ojson optional_number(const std::optional<double>& v) {
  return v ? ojson(*v) : ojson(nullptr);
}

std::map<std::string, TaskImpact> labels_of(std::span<const embedding::LabeledMatch> matches) {
  std::map<std::string, TaskImpact> out;
  for (const auto& m : matches) out.emplace(m.match.task_id, m.label);
  return out;
}

struct AnnotationSetRow {
  std::string task_id;
  TaskImpact group;
};

std::vector<AnnotationSetRow> load_annotation_set(const fs::path& path) {
  auto table = csv::Table::read_file(path);
  table.require_header({"task_id", "group"});
  std::vector<AnnotationSetRow> out;
  for (const auto& rec : table.records()) {
    auto g = embedding::parse_task_impact(rec.fields[1]);
    if (!g) throw DataError(table.source(), rec.line, "group", "unknown group");
    out.push_back({rec.fields[0], *g});
  }
  return out;
}

// ---- stages --------------------------------------------------------------

void stage_score(Stage& s) {
  const auto& cfg = s.cfg();
  auto patents = corpus::load_patents(s.input(cfg.paths.patents));
  std::unordered_set<std::string> ids;
  for (const auto& p : patents) ids.insert(p.patent_id);
  auto citations = corpus::load_citations(s.input(cfg.paths.citations), ids);
  s.warn_all(citations.warnings);
  auto graph = disruption::CitationGraph::build(patents, citations.edges);
  auto scores = disruption::score_all(graph, cfg.threads);
  auto cls = disruption::classify_patents(scores, cfg.quartile_low, cfg.quartile_high);
  s.warn_all(cls.warnings);
  s.param("quartile_low", cfg.quartile_low);
  s.param("quartile_high", cfg.quartile_high);
  s.write("scores.csv", disruption::render_scores(scores, cls));
}

ojson class_counts(const disruption::Classification& cls) {
  std::map<disruption::PatentClass, std::size_t> n;
  for (const auto& [id, c] : cls.classes) ++n[c];
  ojson j;
  for (auto c : {disruption::PatentClass::Disruptive, disruption::PatentClass::Consolidating,
                 disruption::PatentClass::Middle})
    j[std::string(disruption::to_string(c))] = n[c];
  j["undefined"] = cls.undefined.size();
  return j;
}

void stage_filter(Stage& s) {
  const auto& cfg = s.cfg();
  auto patents = corpus::load_patents(s.input(cfg.paths.patents));
  std::unordered_set<std::string> ids;
  for (const auto& p : patents) ids.insert(p.patent_id);
  auto citations = corpus::load_citations(s.input(cfg.paths.citations), ids);
  auto graph = disruption::CitationGraph::build(patents, citations.edges);
  auto rows = disruption::load_scores(s.artifact("scores.csv"));

  auto ai = disruption::filter_ai_patents(patents, cfg.filter, graph);
  std::unordered_set<std::string> keep(ai.begin(), ai.end());
  std::vector<disruption::DisruptionScore> all, subset;
  for (auto& r : rows) {
    all.push_back(r.score);
    if (keep.count(r.score.patent_id)) subset.push_back(r.score);
  }
  if (subset.size() != ai.size())
    fail(ErrorKind::Data, "scores.csv does not cover every AI patent; re-run `score`");

  auto corpus_cls = disruption::classify_patents(all, cfg.quartile_low, cfg.quartile_high);
  auto cls = disruption::classify_patents(subset, cfg.quartile_low, cfg.quartile_high);
  s.warn_all(cls.warnings);
  if (!cls.undefined.empty())
    s.warn(fmt::format("{} AI patent(s) have an undefined index and get no class",
                       cls.undefined.size()));

  s.param("year_min", cfg.filter.year_min);
  s.param("year_max", cfg.filter.year_max);
  s.param("min_forward_citations", cfg.filter.min_forward_citations);
  s.param("min_references", cfg.filter.min_references);
  s.param("keywords", cfg.filter.keywords);
  s.param("cpc_prefixes", cfg.filter.cpc_prefixes);
  s.write("ai_patents.csv", disruption::render_scores(subset, cls));

  ojson q;
  q["percentiles"] = {cfg.quartile_low, cfg.quartile_high};
  q["corpus"] = {{"patents", all.size()},
                 {"q_low", corpus_cls.q_low},
                 {"q_high", corpus_cls.q_high},
                 {"counts", class_counts(corpus_cls)}};
  q["ai_patents"] = {{"patents", subset.size()},
                     {"q_low", cls.q_low},
                     {"q_high", cls.q_high},
                     {"counts", class_counts(cls)}};
  s.write("quartiles.json", json_text(q));
}

void stage_match(Stage& s) {
  const auto& cfg = s.cfg();
  auto tasks = corpus::load_tasks(s.input(cfg.paths.tasks));
  auto task_store = embedding::EmbeddingStore::load(s.input(cfg.paths.task_embeddings));
  auto patent_store = embedding::EmbeddingStore::load(s.input(cfg.paths.patent_embeddings));
  auto rows = disruption::load_scores(s.artifact("ai_patents.csv"));

  std::vector<std::string> task_ids;
  for (const auto& t : tasks) {
    if (!task_store.find(t.task_id))
      fail(ErrorKind::Data, "task '{}' has no embedding in {}", t.task_id,
           cfg.paths.task_embeddings.filename().string());
    task_ids.push_back(t.task_id);
  }
  std::vector<std::string> patent_ids;
  std::size_t missing = 0;
  for (const auto& r : rows) {
    if (r.label == "undefined") continue;
    if (!patent_store.find(r.score.patent_id)) {
      ++missing;
      continue;
    }
    patent_ids.push_back(r.score.patent_id);
  }
  if (missing > 0)
    s.warn(fmt::format("{} classified AI patent(s) have no embedding and are not matched", missing));
  if (patent_ids.empty()) fail(ErrorKind::Data, "no classified AI patent has an embedding");

  auto results = embedding::match_tasks(task_store.subset(task_ids),
                                        patent_store.subset(patent_ids), cfg.threads);
  s.param("patents", patent_ids.size());
  s.write("best_matches.csv", embedding::render_best_matches(results));
}

void stage_classify(Stage& s) {
  const auto& cfg = s.cfg();
  auto results = embedding::load_best_matches(s.artifact("best_matches.csv"));
  auto rows = disruption::load_scores(s.artifact("ai_patents.csv"));
  std::map<std::string, disruption::PatentClass> classes;
  for (const auto& r : rows)
    if (auto c = disruption::parse_patent_class(r.label)) classes.emplace(r.score.patent_id, *c);

  double threshold = embedding::impact_threshold(results, cfg.impact_percentile);
  auto labels = embedding::classify_tasks(results, threshold, classes);
  std::map<TaskImpact, std::size_t> n;
  for (const auto& [t, l] : labels) ++n[l];

  s.param("impact_percentile", cfg.impact_percentile);
  s.write("matches.csv", embedding::render_matches(results, labels));
  ojson j;
  j["percentile"] = cfg.impact_percentile;
  j["threshold"] = threshold;
  j["tasks"] = results.size();
  for (auto l : {TaskImpact::Disruptive, TaskImpact::Consolidating, TaskImpact::Middle,
                 TaskImpact::NotImpacted})
    j["counts"][std::string(embedding::to_string(l))] = n[l];
  s.write("threshold.json", json_text(j));
}

void stage_network(Stage& s) {
  const auto& cfg = s.cfg();
  auto matches = embedding::load_matches(s.artifact("matches.csv"));
  auto store = embedding::EmbeddingStore::load(s.input(cfg.paths.task_embeddings));

  ojson groups = ojson::object();
  for (auto g : kNetworkGroups) {
    const std::string name(embedding::to_string(g));
    std::vector<std::string> ids;
    for (const auto& m : matches)
      if (m.label == g) ids.push_back(m.match.task_id);
    if (ids.size() < 3) {
      s.warn(fmt::format("group {} has {} task(s); network skipped", name, ids.size()));
      continue;
    }
    auto sub = store.subset(ids);
    if (sub.size() != ids.size())
      fail(ErrorKind::Data, "group {}: {} task(s) lack an embedding", name, ids.size() - sub.size());
    auto net = tasknet::build_network(sub, cfg.edge_percentile, cfg.threads);
    auto seed = derive_seed(s.stage_seed(), name);
    auto part = tasknet::louvain(net, seed);
    s.write("network_" + name + ".csv", tasknet::render_network(net));
    s.write("partition_" + name + ".csv", tasknet::render_partition(net, part));
    groups[name] = {{"nodes", net.nodes.size()},
                    {"edges", net.edges.size()},
                    {"percentile", net.percentile},
                    {"cutoff", net.cutoff},
                    {"communities", part.community_count},
                    {"modularity", part.modularity},
                    {"trajectory", part.trajectory},
                    {"seed", part.seed}};
  }
  s.param("edge_percentile", cfg.edge_percentile);
  s.write("network.json", json_text({{"groups", groups}}));
}

void stage_sample(Stage& s) {
  const auto& cfg = s.cfg();
  auto matches = embedding::load_matches(s.artifact("matches.csv"));
  auto info = nlohmann::json::parse(io::read_file(s.artifact("network.json")), nullptr, false);
  if (info.is_discarded() || !info.contains("groups"))
    fail(ErrorKind::Data, "network.json is malformed; re-run `network`");

  std::size_t impacted_sample = 0;
  std::vector<std::pair<TaskImpact, tasknet::SamplePlan>> plans;
  std::vector<AnnotationSetRow> set;
  csv::Writer survey{"task_id", "group", "community", "degree", "rank"};
  for (auto g : kNetworkGroups) {
    const std::string name(embedding::to_string(g));
    if (!info["groups"].contains(name)) continue;
    auto part_file = tasknet::load_partition(s.artifact("partition_" + name + ".csv"));
    auto net = tasknet::load_network(s.artifact("network_" + name + ".csv"), part_file.nodes);
    tasknet::Partition part;
    part.community = part_file.community;
    part.community_count =
        part.community.empty() ? 0 : *std::max_element(part.community.begin(), part.community.end()) + 1;

    long long total = static_cast<long long>(net.nodes.size());
    if (g == TaskImpact::NotImpacted) {
      long long want = cfg.not_impacted_total > 0 ? cfg.not_impacted_total
                                                  : static_cast<long long>(impacted_sample);
      if (want == 0) want = total;
      if (want > total) {
        s.warn(fmt::format("not_impacted sample of {} exceeds the {} available tasks; taking all",
                           want, total));
        want = total;
      }
      total = want;
    }
    auto plan = tasknet::sample_representatives(net, part, total);
    if (g != TaskImpact::NotImpacted) impacted_sample += plan.selected.size();
    s.write("sample_" + name + ".csv", tasknet::render_sample(plan));
    for (const auto& e : plan.selected) set.push_back({e.task_id, g});

    auto survey_total =
        std::max(1LL, static_cast<long long>(std::ceil(cfg.survey_fraction * static_cast<double>(total) - 1e-9)));
    auto survey_plan = tasknet::sample_representatives(net, part, survey_total);
    for (const auto& e : survey_plan.selected)
      survey.row({e.task_id, name, std::to_string(e.community), std::to_string(e.degree),
                  std::to_string(e.rank)});
  }
  if (set.empty()) fail(ErrorKind::Data, "no group has a network to sample from");

  csv::Writer w{"task_id", "group"};
  for (const auto& r : set) w.row({r.task_id, embedding::to_string(r.group)});
  s.param("not_impacted_total", cfg.not_impacted_total);
  s.param("survey_fraction", cfg.survey_fraction);
  s.write("annotation_set.csv", w.str());
  s.write("survey_sample.csv", survey.str());
}

void stage_annotate(Stage& s) {
  const auto& cfg = s.cfg();
  auto set = load_annotation_set(s.artifact("annotation_set.csv"));
  auto all_tasks = corpus::load_tasks(s.input(cfg.paths.tasks));
  std::map<std::string, const corpus::TaskRecord*> by_id;
  for (const auto& t : all_tasks) by_id.emplace(t.task_id, &t);
  std::vector<corpus::TaskRecord> tasks;
  for (const auto& r : set) {
    auto it = by_id.find(r.task_id);
    if (it == by_id.end()) fail(ErrorKind::Data, "annotation set task '{}' is not in the task file", r.task_id);
    tasks.push_back(*it->second);
  }

  std::unique_ptr<annotate::ChatBackend> backend;
  if (cfg.llm_mode == LlmMode::Replay)
    backend = annotate::make_replay_backend(annotate::load_replay(s.input(cfg.paths.replay)));
  else
    backend = annotate::make_http_backend(cfg.llm);

  std::vector<annotate::Annotation> annotations;
  std::vector<annotate::ReplayRecord> log;
  csv::Writer missing{"task_id", "dimension"};
  std::size_t n_missing = 0;
  for (auto d : annotate::kDimensions) {
    auto run = annotate::annotate_llm(tasks, d, *backend, cfg.llm);
    annotations.insert(annotations.end(), run.annotations.begin(), run.annotations.end());
    log.insert(log.end(), run.log.begin(), run.log.end());
    for (const auto& t : run.missing) missing.row({t, annotate::to_string(d)});
    n_missing += run.missing.size();
    s.warn_all(run.warnings);
  }
  if (n_missing > 0)
    s.warn(fmt::format("{} task/dimension pair(s) have no label after retries", n_missing));

  s.param("mode", cfg.llm_mode == LlmMode::Replay ? "replay" : "live");
  s.param("model", cfg.llm.model);
  s.param("max_retries", cfg.llm.max_retries);
  s.write("llm_annotations.csv", annotate::render_annotations(annotations));
  s.write("llm_missing.csv", missing.str());
  s.write("llm_log.ndjson", annotate::render_replay(log));
}

void stage_consensus(Stage& s) {
  using annotate::Source;
  const auto& cfg = s.cfg();
  auto llm_file = annotate::load_annotations(s.artifact("llm_annotations.csv"), Source::Llm, 1);
  auto llm = annotate::build_consensus(llm_file.annotations);

  annotate::ConsensusSet human, author;
  if (!cfg.paths.survey.empty()) {
    auto survey = annotate::ingest_survey(s.input(cfg.paths.survey));
    s.warn_all(survey.warnings);
    human = annotate::build_consensus(survey.annotations, survey.excluded);
  } else {
    s.warn("paths.survey is not set; no human labels");
  }
  if (!cfg.paths.adjudication.empty()) {
    auto adj = annotate::load_annotations(s.input(cfg.paths.adjudication), Source::Author,
                                          std::nullopt);
    s.warn_all(adj.warnings);
    author = annotate::build_consensus(adj.annotations);
  }
  auto final_set = annotate::merge_final(llm, author);

  std::vector<std::pair<Source, const annotate::ConsensusSet*>> sets{
      {Source::Llm, &llm}, {Source::Human, &human}, {Source::Author, &author},
      {Source::Final, &final_set}};
  s.write("consensus.csv", annotate::render_consensus(sets));

  auto [llm_shared, human_shared] = annotate::intersect(llm, human);
  ojson dims = ojson::object();
  for (auto d : annotate::kDimensions) {
    ojson j;
    std::size_t shared = 0;
    for (const auto& [key, c] : llm_shared) shared += key.second == d;
    j["shared_tasks"] = shared;
    if (shared > 0) {
      j["agreement_rate"] = annotate::agreement_rate(llm_shared, human_shared, d);
    } else {
      j["agreement_rate"] = nullptr;
      if (!human.empty())
        s.warn(fmt::format("{}: no task has both LLM and human labels", annotate::to_string(d)));
    }
    auto a = annotate::alignment_rate(llm_shared, human_shared, author, d);
    j["disagreements"] = a.disagreements;
    j["adjudicated"] = a.adjudicated;
    j["aligned_with_llm"] = a.aligned_with_first;
    j["alignment_rate"] = optional_number(a.rate);
    dims[std::string(annotate::to_string(d))] = j;
  }
  s.write("agreement.json", json_text({{"dimensions", dims}}));
}

void stage_zscores(Stage& s) {
  const auto& cfg = s.cfg();
  auto matches = embedding::load_matches(s.artifact("matches.csv"));
  auto set = load_annotation_set(s.artifact("annotation_set.csv"));
  auto consensus = annotate::load_consensus(s.artifact("consensus.csv"));
  auto all = labels_of(matches);
  std::map<std::string, TaskImpact> labels;
  for (const auto& r : set) {
    auto it = all.find(r.task_id);
    if (it == all.end()) fail(ErrorKind::Data, "annotation set task '{}' is not in matches.csv", r.task_id);
    labels.emplace(r.task_id, it->second);
  }
  const auto& chars = consensus[cfg.zscore_source];
  auto run = stats::null_model_zscores(labels, chars, cfg.n_iter, s.stage_seed(), cfg.threads);
  s.warn_all(run.warnings);
  s.param("n_iter", cfg.n_iter);
  s.param("source", annotate::to_string(cfg.zscore_source));
  s.param("tasks", run.n_tasks);
  s.write("zscores.csv", stats::render_zscores(run.results));
}

std::string render_states_by_sector(
    const std::vector<std::pair<std::string, aggregate::StateAggregate>>& items) {
  using csv::format_double;
  csv::Writer w{"sector", "state", "w_disruptive", "w_consolidating", "w_all", "p_disruptive",
                "p_consolidating", "p_all", "delta", "delta_disruptive_general",
                "delta_consolidating_general"};
  for (const auto& [sector, agg] : items)
    for (const auto& r : agg.rows)
      w.row({sector, r.state, std::to_string(r.w_d), std::to_string(r.w_c),
             std::to_string(r.w_all), format_double(r.p_d), format_double(r.p_c),
             format_double(r.p_all), format_double(r.delta), format_double(r.delta_d_general),
             format_double(r.delta_c_general)});
  return w.str();
}

void stage_aggregate(Stage& s) {
  const auto& cfg = s.cfg();
  auto matches = embedding::load_matches(s.artifact("matches.csv"));
  auto tasks = corpus::load_tasks(s.input(cfg.paths.tasks));
  auto imap = corpus::load_industry_map(s.input(cfg.paths.occ_industry));
  corpus::check_industry_coverage(tasks, imap);
  auto patents = corpus::load_patents(s.input(cfg.paths.patents));

  std::vector<embedding::MatchResult> results;
  for (const auto& m : matches) results.push_back(m.match);
  auto views = aggregate::join_tasks(labels_of(matches), tasks, imap, results, patents);

  auto industry = aggregate::industry_deltas(views, imap);
  auto states = aggregate::state_deltas(views);
  auto exposure = aggregate::sector_exposure(views, imap);
  s.warn_all(exposure.warnings);
  auto tests = aggregate::sector_two_prop(industry);

  // Geographic breakdown for the four sectors with the most AI-impacted tasks.
  auto ranked = industry.rows;
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.t_all > b.t_all; });
  std::vector<std::pair<std::string, aggregate::StateAggregate>> by_sector;
  for (std::size_t i = 0; i < ranked.size() && i < 4; ++i) {
    try {
      by_sector.emplace_back(ranked[i].sector,
                             aggregate::state_deltas_by_sector(views, ranked[i].sector));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Data) throw;
      s.warn(fmt::format("state breakdown for sector '{}' skipped: {}", ranked[i].sector, e.what()));
    }
  }

  s.write("industry.csv", aggregate::render_industry(industry));
  s.write("states.csv", aggregate::render_states(states));
  s.write("states_by_sector.csv", render_states_by_sector(by_sector));
  s.write("exposure.csv", aggregate::render_exposure(exposure));
  s.write("twoprop.csv", aggregate::render_two_prop(tests));

  ojson plot;
  plot["industry"] = ojson::array();
  for (const auto& r : industry.rows)
    plot["industry"].push_back({{"sector", r.sector},
                                {"delta_disruptive", r.delta_d},
                                {"delta_consolidating", r.delta_c}});
  plot["states"] = ojson::array();
  for (const auto& r : states.rows) plot["states"].push_back({{"state", r.state}, {"delta", r.delta}});
  plot["states_by_sector"] = ojson::object();
  for (const auto& [sector, agg] : by_sector) {
    ojson rows = ojson::array();
    for (const auto& r : agg.rows)
      rows.push_back({{"state", r.state},
                      {"delta_disruptive_general", r.delta_d_general},
                      {"delta_consolidating_general", r.delta_c_general}});
    plot["states_by_sector"][sector] = rows;
  }
  plot["exposure"] = ojson::array();
  for (const auto& r : exposure.rows)
    plot["exposure"].push_back({{"sector", r.sector},
                                {"disruptive", r.ratio_d},
                                {"consolidating", r.ratio_c}});
  s.write("plot_data.json", json_text(plot));
}

ojson correlation_json(const stats::CorrelationResult& c) {
  return {{"r", c.r}, {"p_value", c.p_value}, {"n", c.n}, {"excluded", c.excluded}};
}

void stage_correlate(Stage& s) {
  const auto& cfg = s.cfg();
  auto vac = corpus::load_vacancies(s.input(cfg.paths.vacancy));
  auto table = csv::Table::read_file(s.artifact("exposure.csv"));
  table.require_header({"sector", "t", "t_disruptive", "t_consolidating", "ratio_disruptive",
                        "ratio_consolidating"});

  std::vector<std::string> ids;
  std::vector<double> vacancy, exp_d, exp_c;
  for (const auto& rec : table.records()) {
    auto it = vac.rate.find(rec.fields[0]);
    if (it == vac.rate.end()) {
      s.warn(fmt::format("sector '{}' has no vacancy rate; left out", rec.fields[0]));
      continue;
    }
    ids.push_back(rec.fields[0]);
    vacancy.push_back(it->second);
    exp_d.push_back(csv::parse_double(table, rec, 4));
    exp_c.push_back(csv::parse_double(table, rec, 5));
  }

  ojson out;
  out["sigma_mult"] = cfg.sigma_mult;
  out["sectors"] = ids;
  for (auto [name, x] : {std::pair{"disruptive", &exp_d}, std::pair{"consolidating", &exp_c}}) {
    ojson j;
    try {
      auto fit = stats::ols_fit(*x, vacancy);
      j["fit"] = {{"slope", fit.slope},
                  {"intercept", fit.intercept},
                  {"residual_std", fit.residual_std}};
      j["all"] = correlation_json(stats::pearson(*x, vacancy));
      j["excluding_outliers"] = correlation_json(
          stats::pearson_with_outlier_exclusion(*x, vacancy, ids, cfg.sigma_mult));
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Data) throw;
      s.warn(fmt::format("{} exposure: {}", name, e.what()));
      j["error"] = e.what();
    }
    out[name] = j;
  }
  s.param("sigma_mult", cfg.sigma_mult);
  s.write("correlations.json", json_text(out));
}

using StageFn = void (*)(Stage&);

StageFn stage_fn(std::string_view name) {
  static const std::map<std::string_view, StageFn> fns{
      {"score", stage_score},         {"filter", stage_filter},
      {"match", stage_match},         {"classify", stage_classify},
      {"network", stage_network},     {"sample", stage_sample},
      {"annotate", stage_annotate},   {"consensus", stage_consensus},
      {"zscores", stage_zscores},     {"aggregate", stage_aggregate},
      {"correlate", stage_correlate},
  };
  auto it = fns.find(name);
  return it == fns.end() ? nullptr : it->second;
}

}  // namespace

std::span<const std::string_view> stage_names() { return kStages; }

std::vector<StageReport> run_stage(const PipelineConfig& config, std::string_view stage,
                                   const Logger& logger) {
  std::vector<std::string_view> order;
  if (stage == "run-all")
    order.assign(kStages.begin(), kStages.end());
  else if (stage_fn(stage))
    order.push_back(stage);
  else
    fail(ErrorKind::Usage, "unknown stage '{}'", stage);

  std::vector<StageReport> reports;
  for (auto name : order) {
    Stage s(config, name, logger);
    stage_fn(name)(s);
    reports.push_back(s.finish());
  }
  return reports;
}

const char* version() { return AIX_VERSION; }

}  // namespace aix::pipeline
