// Writes the synthetic mini-corpus under data/minicorpus: patents, citations,
// tasks, industry map, embeddings, an LLM replay file, survey responses,
// author adjudications and vacancy rates. Survey, adjudication and vacancy
// files are derived from a pipeline run over the generated corpus so they
// cover the tasks the pipeline actually samples.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "annotate/annotate.hpp"
#include "common/csv.hpp"
#include "common/hash.hpp"
#include "common/io.hpp"
#include "common/rng.hpp"
#include "corpus/corpus.hpp"
#include "embedding/embedding.hpp"
#include "pipeline/config.hpp"
#include "pipeline/pipeline.hpp"

namespace fs = std::filesystem;
using namespace aix;

namespace {

constexpr std::uint32_t kDim = 32;
constexpr std::size_t kPatents = 300;
constexpr std::size_t kCitations = 2000;
constexpr std::size_t kTasks = 400;

class Gen {
public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_.next() >> 11) * 0x1.0p-53; }
  bool chance(double p) { return uniform() < p; }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(rng_.below(n)); }
  double normal() {
    double u1 = uniform(), u2 = uniform();
    if (u1 < 1e-300) u1 = 1e-300;
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
  }
  template <class T>
  const T& pick(const std::vector<T>& v) {
    return v[below(v.size())];
  }

private:
  Rng rng_;
};

struct Topic {
  std::string name;
  bool disruptive_leaning;
};

const std::vector<Topic> kTopics{
    {"medical image analysis", true},   {"payment fraud detection", true},
    {"warehouse inventory routing", false}, {"vehicle driver assistance", false},
    {"customer support dialogue", true}, {"weld seam inspection", false},
    {"building energy management", false}, {"contract document review", true},
};

struct Sector {
  std::string name;
  std::string occ_prefix;
  std::vector<std::size_t> topics;
  double p_interactive, p_repetitive, p_physical;
  std::vector<std::string> verbs;
  std::vector<std::string> objects;
};

const std::vector<Sector> kSectors{
    {"Manufacturing", "51", {5, 2}, 0.25, 0.7, 0.75,
     {"Inspect", "Operate", "Calibrate", "Assemble", "Monitor", "Adjust"},
     {"welded joints for surface defects", "CNC milling machines", "conveyor line sensors",
      "subassemblies to blueprint tolerances", "production output against schedules",
      "machine settings to correct \"drift\" in dimensions"}},
    {"Information Technology", "15", {7, 4, 1}, 0.35, 0.3, 0.1,
     {"Develop", "Review", "Analyze", "Document", "Test", "Configure"},
     {"software modules for client applications", "network access logs for anomalies",
      "database schemas and queries", "user requirements with stakeholders",
      "automated test suites", "cloud infrastructure settings"}},
    {"Health Care", "29", {0}, 0.7, 0.45, 0.55,
     {"Examine", "Interpret", "Record", "Administer", "Explain", "Prepare"},
     {"patients to assess symptoms", "diagnostic images such as X-rays",
      "medical histories in electronic charts", "medications according to orders",
      "treatment plans to patients and families", "examination rooms and instruments"}},
    {"Finance", "13", {1, 7}, 0.45, 0.55, 0.05,
     {"Audit", "Evaluate", "Prepare", "Reconcile", "Advise", "Verify"},
     {"financial statements for accuracy", "loan applications and credit reports",
      "tax returns and supporting schedules", "account balances and ledgers",
      "clients on investment options", "transaction records for compliance"}},
    {"Retail Trade", "41", {4, 2}, 0.8, 0.6, 0.5,
     {"Greet", "Stock", "Process", "Answer", "Arrange", "Count"},
     {"customers entering the store", "shelves with merchandise",
      "returns and exchanges at the register", "customer questions about products",
      "window and floor displays", "cash drawers at shift end"}},
    {"Transportation", "53", {3, 2, 6}, 0.3, 0.65, 0.8,
     {"Drive", "Load", "Inspect", "Plan", "Log", "Coordinate"},
     {"trucks over assigned routes", "cargo onto delivery vehicles",
      "vehicles for mechanical problems", "delivery schedules around traffic",
      "hours of service and fuel use", "dispatch with warehouse staff"}},
};

const std::vector<std::string> kStates{"CA", "NY", "TX", "WA", "MA", "IL", "PA", "NJ"};

const std::vector<std::string> kAiPhrases{
    "a neural network",        "deep learning",         "machine learning",
    "computer vision",         "natural language processing", "reinforcement learning",
    "artificial intelligence", "image recognition",     "predictive analytics",
    "a robot"};

const std::vector<std::string> kPlainPhrases{
    "a mechanical linkage", "a sealed housing", "a hydraulic actuator", "a sensor array",
    "a modular frame", "a wireless transceiver"};

std::vector<float> unit(std::vector<double> v) {
  double n = 0.0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  std::vector<float> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = static_cast<float>(v[i] / n);
  return out;
}

struct TaskTruth {
  char how, rep, nature;
};

std::string reply_content(int style, const std::string& task, annotate::Dimension d, char label) {
  const std::string field(annotate::label_field(d));
  nlohmann::ordered_json obj;
  obj["Task"] = task;
  obj[field] = std::string(1, label);
  obj["Reason"] = fmt::format("The task is best described as {}.",
                              annotate::label_name(d, label) == std::string_view("?")
                                  ? std::string(1, label)
                                  : std::string(annotate::label_name(d, label)));
  switch (style) {
    case 0: return obj.dump();
    case 1: return "```json\n" + obj.dump(2) + "\n```";
    case 2: return fmt::format("Task: {}\n{}: {}\nReason: short and direct.", task, field, label);
    default: return "Here is the classification:\n" + obj.dump();
  }
}

std::string response_body(std::size_t n, const std::string& content) {
  nlohmann::ordered_json body;
  body["id"] = fmt::format("chatcmpl-mini-{:05}", n);
  body["object"] = "chat.completion";
  body["model"] = "gpt-4o";
  body["choices"] = nlohmann::ordered_json::array(
      {{{"index", 0},
        {"message", {{"role", "assistant"}, {"content", content}}},
        {"finish_reason", "stop"}}});
  return body.dump();
}

char flip(annotate::Dimension d, char label) {
  auto l = annotate::legal_labels(d);
  return label == l[0] ? l[1] : l[0];
}

char truth_of(const TaskTruth& t, annotate::Dimension d) {
  switch (d) {
    case annotate::Dimension::How: return t.how;
    case annotate::Dimension::Repetitiveness: return t.rep;
    case annotate::Dimension::Nature: return t.nature;
  }
  return t.how;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path dir = argc > 1 ? fs::path(argv[1]) : fs::path("data/minicorpus");
  fs::create_directories(dir);
  Gen g(20240917);

  // ---- topics and embeddings centres
  std::vector<std::vector<double>> centres;
  for (std::size_t t = 0; t < kTopics.size(); ++t) {
    std::vector<double> c(kDim);
    for (auto& x : c) x = g.normal();
    centres.push_back(c);
  }
  auto around = [&](std::size_t topic, double spread) {
    std::vector<double> v(kDim);
    for (std::size_t i = 0; i < kDim; ++i) v[i] = centres[topic][i] + spread * g.normal();
    return unit(v);
  };

  // ---- patents
  struct Draft {
    corpus::Patent p;
    std::size_t topic;
    int style;  // 0 disruptive-leaning, 1 consolidating-leaning, 2 neutral
    bool ai;
    int ordinal;
  };
  std::vector<Draft> drafts;
  for (std::size_t i = 0; i < kPatents; ++i) {
    Draft d;
    int year = g.chance(0.45) ? 2015 + static_cast<int>(g.below(5)) : 2005 + static_cast<int>(g.below(17));
    int month = 1 + static_cast<int>(g.below(12));
    int day = 1 + static_cast<int>(g.below(28));
    d.ordinal = year * 400 + month * 31 + day;
    d.p.grant_date = std::chrono::year_month_day{std::chrono::year{year},
                                                 std::chrono::month{static_cast<unsigned>(month)},
                                                 std::chrono::day{static_cast<unsigned>(day)}};
    d.topic = g.below(kTopics.size());
    const bool window = year >= 2015 && year <= 2019;
    d.ai = g.chance(window ? 0.7 : 0.3);
    double lean = kTopics[d.topic].disruptive_leaning ? 0.65 : 0.25;
    d.style = g.chance(0.15) ? 2 : (g.chance(lean) ? 0 : 1);
    const auto& topic = kTopics[d.topic].name;
    const auto& phrase = d.ai ? g.pick(kAiPhrases) : g.pick(kPlainPhrases);
    d.p.title = fmt::format("System for {} using {}", topic, phrase.substr(phrase.find(' ') == 1 ? 2 : 0));
    d.p.abstract = fmt::format(
        "Disclosed is an apparatus for {} comprising {}. The arrangement reduces manual effort "
        "and improves throughput.",
        topic, phrase);
    if (g.chance(0.1)) d.p.abstract.clear();
    if (!g.chance(0.1)) d.p.assignee_state = g.pick(kStates);
    d.p.cpc_codes.push_back(d.ai ? (g.chance(0.5) ? "G06N3/08" : "G06N20/00") : "F16B5/02");
    if (g.chance(0.4)) d.p.cpc_codes.push_back(g.chance(0.5) ? "G06F17/00" : "B25J9/16");
    drafts.push_back(std::move(d));
  }
  // A few AI-classified patents described without any keyword.
  for (std::size_t i = 0; i < 6; ++i) {
    auto& d = drafts[g.below(drafts.size())];
    d.p.title = fmt::format("Adaptive controller for {}", kTopics[d.topic].name);
    d.p.abstract = "A learned model adjusts actuator settings from sensor history.";
    d.p.cpc_codes = {"G06N5/04"};
    d.ai = true;
  }
  std::stable_sort(drafts.begin(), drafts.end(),
                   [](const Draft& a, const Draft& b) { return a.ordinal < b.ordinal; });
  for (std::size_t i = 0; i < drafts.size(); ++i)
    drafts[i].p.patent_id = fmt::format("US{}", 8000000 + i * 4127 + g.below(4000));

  // ---- citations: strictly later to earlier
  std::vector<std::set<std::size_t>> refs(drafts.size());
  std::size_t edges = 0;
  auto earlier = [&](std::size_t i) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < i; ++j)
      if (drafts[j].ordinal < drafts[i].ordinal) out.push_back(j);
    return out;
  };
  std::vector<std::vector<std::size_t>> candidates(drafts.size());
  for (std::size_t i = 0; i < drafts.size(); ++i) candidates[i] = earlier(i);
  auto add_anchor = [&](std::size_t i) {
    const auto& cand = candidates[i];
    if (cand.empty()) return;
    std::size_t f = cand[g.below(cand.size())];
    for (int tries = 0; tries < 3; ++tries) {
      std::size_t alt = cand[g.below(cand.size())];
      const auto& a = drafts[alt].p;
      int y = static_cast<int>(a.grant_date.year());
      if (y >= 2015 && y <= 2019 && drafts[alt].ai) {
        f = alt;
        break;
      }
    }
    auto add = [&](std::size_t j) {
      if (edges < kCitations && refs[i].insert(j).second) ++edges;
    };
    add(f);
    std::vector<std::size_t> fr(refs[f].begin(), refs[f].end());
    int style = drafts[f].style;
    std::size_t extra = style == 1 ? 2 : (style == 2 && g.chance(0.5) ? 1 : 0);
    for (std::size_t k = 0; k < extra && !fr.empty(); ++k) add(fr[g.below(fr.size())]);
  };
  for (std::size_t i = 0; i < drafts.size(); ++i) add_anchor(i);
  while (edges < kCitations) add_anchor(g.below(drafts.size()));

  std::vector<corpus::CitationEdge> citations;
  for (std::size_t i = 0; i < drafts.size(); ++i)
    for (auto j : refs[i]) citations.push_back({drafts[i].p.patent_id, drafts[j].p.patent_id});
  std::vector<corpus::CitationEdge> shuffled = citations;
  for (std::size_t i = shuffled.size(); i > 1; --i) std::swap(shuffled[i - 1], shuffled[g.below(i)]);
  // Rows the loader must drop or collapse.
  shuffled.push_back(shuffled[17]);
  shuffled.push_back({drafts[40].p.patent_id, drafts[40].p.patent_id});
  shuffled.push_back({drafts[250].p.patent_id, "US0000001"});

  std::vector<corpus::Patent> patents;
  for (const auto& d : drafts) patents.push_back(d.p);
  io::write_file(dir / "patents.csv", corpus::render_patents(patents));
  io::write_file(dir / "citations.csv", corpus::render_citations(shuffled));

  // ---- industry map and tasks
  corpus::IndustryMap imap;
  std::vector<std::pair<std::string, std::size_t>> occupations;  // code, sector
  for (std::size_t s = 0; s < kSectors.size(); ++s) {
    imap.sectors.insert(kSectors[s].name);
    for (int k = 0; k < 4; ++k) {
      auto code = fmt::format("{}-{}{:03}.00", kSectors[s].occ_prefix, 1 + k, 11 + 17 * k);
      imap.sector_of.emplace(code, kSectors[s].name);
      occupations.emplace_back(code, s);
    }
  }
  std::vector<corpus::TaskRecord> tasks;
  std::vector<TaskTruth> truth;
  embedding::EmbeddingStore task_store(kDim);
  for (std::size_t i = 0; i < kTasks; ++i) {
    const auto& [code, s] = occupations[g.below(occupations.size())];
    const auto& sec = kSectors[s];
    corpus::TaskRecord t;
    t.task_id = fmt::format("T{:05}", 10001 + i * 7);
    t.description = fmt::format("{} {}.", g.pick(sec.verbs), g.pick(sec.objects));
    t.occupation_code = code;
    tasks.push_back(t);
    TaskTruth tr;
    tr.how = g.chance(sec.p_interactive) ? 'T' : 'D';
    tr.rep = g.chance(sec.p_repetitive) ? 'R' : 'V';
    tr.nature = g.chance(sec.p_physical) ? 'P' : 'M';
    std::size_t topic = sec.topics[g.below(sec.topics.size())];
    // Tasks near disruptive-leaning topics tilt towards mental, variable work.
    if (kTopics[topic].disruptive_leaning && g.chance(0.3)) {
      tr.nature = 'M';
      tr.rep = 'V';
    }
    truth.push_back(tr);
    task_store.add(t.task_id, around(topic, 0.6 + 1.4 * g.uniform()));
  }
  io::write_file(dir / "tasks.csv", corpus::render_tasks(tasks));
  io::write_file(dir / "occ_industry.csv", corpus::render_industry_map(imap));

  embedding::EmbeddingStore patent_store(kDim);
  for (const auto& d : drafts) patent_store.add(d.p.patent_id, around(d.topic, 0.9));
  auto save_store = [&](const embedding::EmbeddingStore& s, const std::string& name) {
    s.save(dir / name);
    embedding::write_manifest(dir / name, {"synthetic-topic-clusters", kDim, s.size(),
                                           sha256_file(dir / name)});
  };
  save_store(patent_store, "patent_embeddings.emb");
  save_store(task_store, "task_embeddings.emb");

  // ---- LLM replay: every task and dimension. A few replies carry an
  // illegal letter, some recover on retry and some never do.
  std::vector<annotate::ReplayRecord> replay;
  std::size_t n = 0;
  std::map<std::pair<std::string, annotate::Dimension>, char> llm_label;
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    for (auto d : annotate::kDimensions) {
      char label = truth_of(truth[i], d);
      if (g.chance(0.12)) label = flip(d, label);
      llm_label[{tasks[i].task_id, d}] = label;
      int style = static_cast<int>((i + static_cast<std::size_t>(d)) % 4);
      unsigned bad = 0;
      if (g.chance(0.03)) bad = 1;
      if (g.chance(0.01)) bad = 3;
      for (unsigned a = 0; a < 3; ++a) {
        annotate::ReplayRecord r;
        r.key = {tasks[i].task_id, d, a};
        r.status = 200;
        bool illegal = a < bad;
        r.response = response_body(n++, reply_content(style, tasks[i].description, d, illegal ? 'Q' : label));
        replay.push_back(std::move(r));
        if (!illegal) break;
      }
    }
  }
  io::write_file(dir / "llm_replay.ndjson", annotate::render_replay(replay));

  // Placeholders so the config validates before the derived files exist.
  io::write_file(dir / "survey.csv", "task_id,dimension,label,annotator_id\n");
  io::write_file(dir / "adjudication.csv", "task_id,dimension,label,annotator_id\n");
  io::write_file(dir / "vacancy.csv", "industry_sector,vacancy_rate\n");
  io::write_file(dir / "config.ini",
                 "; Synthetic mini-corpus. Paths are relative to this file.\n"
                 "[paths]\n"
                 "patents = patents.csv\n"
                 "citations = citations.csv\n"
                 "tasks = tasks.csv\n"
                 "occ_industry = occ_industry.csv\n"
                 "vacancy = vacancy.csv\n"
                 "patent_embeddings = patent_embeddings.emb\n"
                 "task_embeddings = task_embeddings.emb\n"
                 "survey = survey.csv\n"
                 "adjudication = adjudication.csv\n"
                 "replay = llm_replay.ndjson\n"
                 "\n"
                 "[filter]\n"
                 "year_min = 2015\n"
                 "year_max = 2019\n"
                 "min_forward_citations = 3\n"
                 "min_references = 1\n"
                 "cpc_prefixes = G06N\n"
                 "\n"
                 "[thresholds]\n"
                 "quartile_low = 25\n"
                 "quartile_high = 75\n"
                 "impact_percentile = 90\n"
                 "edge_percentile = 95\n"
                 "sigma_mult = 2.0\n"
                 "\n"
                 "[zscores]\n"
                 "n_iter = 500\n"
                 "source = final\n"
                 "\n"
                 "[sample]\n"
                 "survey_fraction = 0.05\n"
                 "\n"
                 "[run]\n"
                 "seed = 20240917\n"
                 "threads = 1\n"
                 "out = out\n"
                 "\n"
                 "[llm]\n"
                 "mode = replay\n"
                 "base_url = https://api.openai.com/v1\n"
                 "model = gpt-4o\n"
                 "api_key_env = OPENAI_API_KEY\n"
                 "max_retries = 2\n"
                 "timeout_seconds = 60\n"
                 "concurrency = 1\n");

  // ---- run the early stages to learn the annotation set and exposure
  fs::path scratch = fs::temp_directory_path() / "aix_minicorpus_scratch";
  fs::remove_all(scratch);
  auto cfg = pipeline::load_config(dir / "config.ini", {{"run.out", scratch.string()}});
  for (auto stage : {"score", "filter", "match", "classify", "network", "sample", "aggregate"})
    pipeline::run_stage(cfg, stage);

  auto set = csv::Table::read_file(scratch / "annotation_set.csv");
  std::map<std::string, std::size_t> index_of;
  for (std::size_t i = 0; i < tasks.size(); ++i) index_of[tasks[i].task_id] = i;

  // Survey: three crowd workers per task and dimension; one group is short a
  // worker and gets excluded.
  csv::Writer survey{"task_id", "dimension", "label", "annotator_id"};
  csv::Writer adjud{"task_id", "dimension", "label", "annotator_id"};
  std::size_t row_no = 0;
  for (const auto& rec : set.records()) {
    const auto& id = rec.fields[0];
    const auto& tr = truth[index_of.at(id)];
    for (auto d : annotate::kDimensions) {
      std::array<char, 3> votes{};
      std::size_t workers = (row_no++ == 5) ? 2 : 3;
      const std::size_t first_worker = g.below(60);
      for (std::size_t w = 0; w < workers; ++w) {
        char v = truth_of(tr, d);
        if (g.chance(0.2)) v = flip(d, v);
        votes[w] = v;
        survey.row({id, annotate::to_string(d), std::string(1, v),
                    fmt::format("W{:03}", 1 + (first_worker + w * 7) % 60)});
      }
      if (workers != 3) continue;
      int first = 0;
      for (char v : votes) first += v == annotate::legal_labels(d)[0];
      char majority = first >= 2 ? annotate::legal_labels(d)[0] : annotate::legal_labels(d)[1];
      auto it = llm_label.find({id, d});
      if (it != llm_label.end() && it->second != majority)
        adjud.row({id, annotate::to_string(d), std::string(1, truth_of(tr, d)), "authors"});
    }
  }
  io::write_file(dir / "survey.csv", survey.str());
  io::write_file(dir / "adjudication.csv", adjud.str());

  // Vacancy rates track disruptive exposure, with one sector far off the line.
  auto exposure = csv::Table::read_file(scratch / "exposure.csv");
  corpus::VacancyTable vac;
  std::size_t k = 0;
  for (const auto& rec : exposure.records()) {
    double ratio = std::stod(rec.fields[4]);
    double rate = 3.0 + 60.0 * ratio + 0.25 * g.normal();
    if (k++ == 2) rate += 9.0;
    vac.rate.emplace(rec.fields[0], std::round(std::clamp(rate, 0.5, 99.0) * 10.0) / 10.0);
  }
  io::write_file(dir / "vacancy.csv", corpus::render_vacancies(vac));
  fs::remove_all(scratch);

  std::printf("wrote %zu patents, %zu citations, %zu tasks, %zu replay records to %s\n",
              patents.size(), citations.size(), tasks.size(), replay.size(), dir.c_str());
  return 0;
}
