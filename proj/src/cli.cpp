// Copyright 2026 The GEE Toolkit Authors
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

#include "gee/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <set>

#include "CLI11.hpp"
#include "gee/atomic.hpp"
#include "gee/corpus.hpp"
#include "gee/error.hpp"
#include "gee/eval.hpp"
#include "gee/explanation.hpp"
#include "gee/log.hpp"
#include "gee/parallel.hpp"
#include "gee/report.hpp"
#include "gee/utf8.hpp"

namespace gee {

using nlohmann::json;
namespace fs = std::filesystem;

// ---------------------------------------------------------------- config

namespace {

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_relative() && !base.empty() ? base / path : path;
}

StepConfig step_from_json(const json& j, StepConfig step) {
  if (j.contains("model_id")) step.model_id = j["model_id"].get<std::string>();
  if (j.contains("temperature")) step.temperature = j["temperature"].get<double>();
  if (j.contains("top_p")) step.top_p = j["top_p"].get<double>();
  if (j.contains("max_tokens") && !j["max_tokens"].is_null()) step.max_tokens = j["max_tokens"].get<int>();
  return step;
}

void check_step(const StepConfig& s, const char* name) {
  const std::string n(name);
  if (s.model_id.empty()) throw ConfigError(n + ".model_id is empty");
  if (!(s.temperature >= 0.0 && s.temperature <= 2.0)) throw ConfigError(n + ".temperature must be in [0, 2]");
  if (!(s.top_p > 0.0 && s.top_p <= 1.0)) throw ConfigError(n + ".top_p must be in (0, 1]");
  if (s.max_tokens && *s.max_tokens <= 0) throw ConfigError(n + ".max_tokens must be positive");
}

}  // namespace

void RunConfig::validate() const {
  check_step(extraction, "extraction");
  check_step(explanation, "explanation");
  if (concurrency == 0) throw ConfigError("concurrency must be at least 1");
  if (max_states == 0) throw ConfigError("max_states must be at least 1");
  if (max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
  for (const auto* p : {&lexicon, &extract_template, &explain_template}) {
    if (*p && !fs::exists(**p)) throw ConfigError("file not found: " + (*p)->string());
  }
  if ((extract_template || explain_template) && !language) {
    throw ConfigError("template overrides need a run language");
  }
}

RunConfig run_config_from_json(const json& j, const fs::path& base_dir) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  static const std::set<std::string> known = {
      "language", "provider", "extraction", "explanation", "cache_dir", "lexicon", "templates",
      "concurrency", "max_states", "max_attempts", "run_log"};
  RunConfig c;
  try {
    for (const auto& [key, _] : j.items()) {
      if (!known.count(key)) throw ConfigError("unknown config key '" + key + "'");
    }
    if (j.contains("language") && !j["language"].is_null()) c.language = parse_lang(j["language"].get<std::string>());
    if (j.contains("provider")) {
      const auto& p = j["provider"];
      const auto kind = p.value("kind", std::string("offline"));
      if (kind == "offline") {
        c.provider = ProviderKind::Offline;
      } else if (kind == "http") {
        c.provider = ProviderKind::Http;
      } else {
        throw ConfigError("unknown provider kind '" + kind + "'");
      }
      if (p.contains("endpoint")) c.http.endpoint = p["endpoint"].get<std::string>();
      if (p.contains("credential_env")) c.http.credential_env = p["credential_env"].get<std::string>();
      if (p.contains("timeout_s")) c.http.timeout = std::chrono::seconds(p["timeout_s"].get<int>());
    }
    if (j.contains("extraction")) c.extraction = step_from_json(j["extraction"], c.extraction);
    if (j.contains("explanation")) c.explanation = step_from_json(j["explanation"], c.explanation);
    if (j.contains("cache_dir")) c.cache_dir = resolve(base_dir, j["cache_dir"].get<std::string>());
    if (j.contains("lexicon")) c.lexicon = resolve(base_dir, j["lexicon"].get<std::string>());
    if (j.contains("run_log")) c.run_log = resolve(base_dir, j["run_log"].get<std::string>());
    if (j.contains("templates")) {
      const auto& t = j["templates"];
      if (t.contains("extract")) c.extract_template = resolve(base_dir, t["extract"].get<std::string>());
      if (t.contains("explain")) c.explain_template = resolve(base_dir, t["explain"].get<std::string>());
    }
    if (j.contains("concurrency")) c.concurrency = j["concurrency"].get<std::size_t>();
    if (j.contains("max_states")) c.max_states = j["max_states"].get<std::size_t>();
    if (j.contains("max_attempts")) c.max_attempts = j["max_attempts"].get<int>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("bad config value: ") + e.what());
  } catch (const DataError& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

RunConfig load_run_config(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
  return run_config_from_json(j, path.parent_path());
}

// ---------------------------------------------------------------- helpers

namespace {

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  std::vector<json> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (utf8::trim(line).empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::exception& e) {
      throw DataError(path.string() + " line " + std::to_string(number) + ": " + e.what());
    }
    if (!out.back().is_object()) {
      throw DataError(path.string() + " line " + std::to_string(number) + ": expected a JSON object");
    }
  }
  return out;
}

void write_jsonl(const fs::path& path, const std::vector<json>& records) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  for (const auto& r : records) out << r.dump() << '\n';
}

// A pair record plus its "edits" field, as written by extract.
struct EditedPair {
  SentencePair pair;
  std::vector<AtomicEdit> edits;
  json record;
};

std::vector<EditedPair> read_edited_pairs(const fs::path& path) {
  std::vector<EditedPair> out;
  std::set<std::string> seen;
  const auto records = read_jsonl(path);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    EditedPair e;
    try {
      e.pair = pair_from_json(r, i + 1, "pair-" + std::to_string(i + 1));
      if (!r.contains("edits")) throw DataError("missing field 'edits'");
      e.edits = edits_from_json(r["edits"]);
    } catch (const std::exception& ex) {
      throw DataError(path.string() + ": record " + std::to_string(i + 1) + ": " + ex.what());
    }
    if (!seen.insert(e.pair.id).second) throw DataError(path.string() + ": duplicate id '" + e.pair.id + "'");
    e.record = r;
    out.push_back(std::move(e));
  }
  return out;
}

void check_language(const CliContext& ctx, const SentencePair& p) {
  if (ctx.config.language && *ctx.config.language != p.lang) {
    throw DataError("pair '" + p.id + "' is " + std::string(to_string(p.lang)) + " but the run language is " +
                    std::string(to_string(*ctx.config.language)));
  }
}

std::shared_ptr<const Lexicon> lexicon_for(const CliContext& ctx) {
  if (ctx.config.lexicon) return std::make_shared<const Lexicon>(Lexicon::load(*ctx.config.lexicon));
  return default_lexicon();
}

// One tokenizer per language, built on first use.
class Tokenizers {
 public:
  explicit Tokenizers(const CliContext& ctx) : ctx_(ctx) {}
  const Tokenizer& operator()(Lang lang) {
    if (lang == Lang::De) return de_;
    if (!zh_) zh_ = Tokenizer(Lang::Zh, lexicon());
    return *zh_;
  }
  std::shared_ptr<const Lexicon> lexicon() {
    if (!lex_) lex_ = lexicon_for(ctx_);
    return lex_;
  }

 private:
  const CliContext& ctx_;
  Tokenizer de_{Lang::De};
  std::optional<Tokenizer> zh_;
  std::shared_ptr<const Lexicon> lex_;
};

PromptTemplate template_for(const CliContext& ctx, Lang lang, PromptStep step) {
  const auto& override_path = step == PromptStep::Explain ? ctx.config.explain_template : ctx.config.extract_template;
  if (override_path && ctx.config.language == lang) return load_template(*override_path, lang, step);
  return builtin_template(lang, step);
}

std::shared_ptr<Provider> provider_for(const CliContext& ctx) {
  if (ctx.provider) return ctx.provider;
  if (ctx.config.provider == ProviderKind::Http) return std::make_shared<HttpProvider>(ctx.config.http);
  return std::make_shared<OfflineProvider>(lexicon_for(ctx));
}

StepSettings settings_for(const CliContext& ctx, const StepConfig& step, RunLog* log) {
  StepSettings s;
  s.model_id = step.model_id;
  s.temperature = step.temperature;
  s.top_p = step.top_p;
  s.max_tokens = step.max_tokens;
  s.cache_dir = ctx.config.cache_dir;
  s.retry.max_attempts = ctx.config.max_attempts;
  if (ctx.sleep) s.retry.sleep = ctx.sleep;
  s.log = log;
  return s;
}

std::unique_ptr<RunLog> open_run_log(const CliContext& ctx) {
  if (!ctx.config.run_log) return nullptr;
  return std::make_unique<RunLog>(*ctx.config.run_log);
}

std::ostream& out_of(const CliContext& ctx) { return ctx.out ? *ctx.out : std::cout; }

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

json explanation_json(const Explanation& e) {
  return {{"edit_desc", e.edit_desc},
          {"reason", e.reason},
          {"error_type", e.error_type},
          {"matched_edit", e.matched_edit ? json(*e.matched_edit) : json(nullptr)}};
}

Explanation explanation_from_json(const json& j) {
  Explanation e;
  e.edit_desc = j.value("edit_desc", std::string());
  e.reason = j.value("reason", std::string());
  e.error_type = j.value("error_type", std::string());
  e.raw = e.sentence();
  return e;
}

std::string mention_text(const Mention& m) {
  AtomicEdit e;
  e.op = m.op;
  e.orig = m.orig;
  e.tgt = m.tgt;
  return serialize_edit(e);
}

json coverage_json(const CoverageReport& c, std::span<const AtomicEdit> edits) {
  json missing = json::array();
  for (auto i : c.missing_edits) missing.push_back({{"edit", i}, {"text", serialize_edit(edits[i])}});
  json halluc = json::array();
  for (const auto& h : c.hallucinated) {
    halluc.push_back({{"explanation", h.explanation}, {"mention", mention_text(h.mention)}});
  }
  json matched = json::array();
  for (const auto& [edit, expl] : c.matched) matched.push_back({{"edit", edit}, {"explanation", expl}});
  return {{"coverage_rate", c.coverage_rate}, {"total_edits", c.total_edits}, {"matched", matched},
          {"missing_edits", missing},         {"hallucinated", halluc},         {"unresolved", c.unresolved}};
}

}  // namespace

// ---------------------------------------------------------------- commands

void cmd_preprocess(const CliContext& ctx, const fs::path& input, const fs::path& output,
                    const std::optional<fs::path>& stats_out) {
  const auto pairs = load_pairs(input);
  std::vector<SentencePair> de, zh;
  for (const auto& p : pairs) {
    check_language(ctx, p);
    (p.lang == Lang::De ? de : zh).push_back(p);
  }
  Tokenizers tok(ctx);
  std::set<std::string> kept;
  for (const auto& p : filter_german(de)) kept.insert(p.id);
  if (!zh.empty()) {
    for (const auto& p : filter_chinese(zh, *tok.lexicon())) kept.insert(p.id);
  }
  std::vector<SentencePair> out;
  for (const auto& p : pairs) {
    if (kept.count(p.id)) out.push_back(p);
  }
  save_pairs(output, out);

  auto stats_path = stats_out.value_or(fs::path(output).replace_extension(".stats.json"));
  json stats = json::object();
  auto& os = out_of(ctx);
  os << "language\tpairs\tedits\tmean edits/pair\n";
  for (Lang lang : {Lang::De, Lang::Zh}) {
    std::vector<SentencePair> part;
    for (const auto& p : out) {
      if (p.lang == lang) part.push_back(p);
    }
    if (part.empty()) continue;
    const auto st = corpus_stats(part, lang == Lang::Zh ? tok.lexicon() : nullptr);
    stats[std::string(to_string(lang))] = to_json(st);
    os << to_string(lang) << '\t' << st.pair_count << '\t' << st.edit_count << '\t'
       << fixed(st.mean_edits_per_pair, 2) << '\n';
  }
  if (stats_path.has_parent_path()) fs::create_directories(stats_path.parent_path());
  std::ofstream sf(stats_path, std::ios::binary | std::ios::trunc);
  if (!sf) throw DataError("cannot write " + stats_path.string());
  sf << stats.dump(2) << '\n';
  os << "kept " << out.size() << " of " << pairs.size() << " pairs\n";
}

void cmd_extract(const CliContext& ctx, const fs::path& input, const fs::path& output, ExtractMode mode) {
  const auto pairs = load_pairs(input);
  for (const auto& p : pairs) check_language(ctx, p);
  Tokenizers tok(ctx);
  tok(Lang::De);
  if (std::any_of(pairs.begin(), pairs.end(), [](const auto& p) { return p.lang == Lang::Zh; })) tok(Lang::Zh);

  std::shared_ptr<Provider> provider;
  std::map<Lang, PromptTemplate> templates;
  auto log = open_run_log(ctx);
  if (mode == ExtractMode::Llm) {
    provider = provider_for(ctx);
    for (const auto& p : pairs) {
      if (!templates.count(p.lang)) templates.emplace(p.lang, template_for(ctx, p.lang, PromptStep::Extract));
    }
  }
  const auto settings = settings_for(ctx, ctx.config.extraction, log.get());
  ApplyOptions apply;
  apply.max_states = ctx.config.max_states;

  std::vector<json> records(pairs.size());
  parallel_for(pairs.size(), ctx.config.concurrency, [&](std::size_t i) {
    const auto& p = pairs[i];
    const Tokenizer& t = tok(p.lang);
    json r = to_json(p);
    std::vector<AtomicEdit> edits;
    FeasibilityResult feas;
    json warnings = json::array();
    if (mode == ExtractMode::Rule) {
      const auto src = t(p.source);
      const auto tgt = t(p.target);
      edits = extract_rule_based(src, tgt);
      feas = apply_edits(src, tgt, edits, apply);
    } else {
      try {
        auto res = extract_edits_llm(p, templates.at(p.lang), *provider, t, settings);
        edits = std::move(res.edits);
        feas = std::move(res.feasibility);
        for (auto& w : res.warnings) warnings.push_back(std::move(w));
      } catch (const DataError& e) {
        warn(e.what());
        r["error"] = e.what();
        feas = apply_edits(t(p.source), t(p.target), edits, apply);
      }
    }
    r["edits"] = edits_to_json(edits);
    r["feasibility"] = std::string(to_string(feas.status));
    r["mode"] = mode == ExtractMode::Rule ? "rule" : "llm";
    r["warnings"] = warnings;
    records[i] = std::move(r);
  });
  write_jsonl(output, records);
  std::size_t feasible = 0;
  for (const auto& r : records) feasible += r["feasibility"] == "feasible";
  out_of(ctx) << "extracted edits for " << records.size() << " pairs, " << feasible << " feasible\n";
}

void cmd_explain(const CliContext& ctx, const fs::path& input, const fs::path& output) {
  const auto items = read_edited_pairs(input);
  for (const auto& e : items) check_language(ctx, e.pair);
  std::shared_ptr<Provider> provider;
  std::map<Lang, PromptTemplate> templates;
  for (const auto& e : items) {
    if (e.edits.empty() || templates.count(e.pair.lang)) continue;
    templates.emplace(e.pair.lang, template_for(ctx, e.pair.lang, PromptStep::Explain));
  }
  if (!templates.empty()) provider = provider_for(ctx);
  auto log = open_run_log(ctx);
  const auto settings = settings_for(ctx, ctx.config.explanation, log.get());

  std::vector<json> records(items.size());
  parallel_for(items.size(), ctx.config.concurrency, [&](std::size_t i) {
    const auto& item = items[i];
    const auto& p = item.pair;
    json r = to_json(p);
    r["edits"] = edits_to_json(item.edits);
    json expls = json::array();
    json warnings = json::array();
    std::vector<Explanation> parsed;
    if (!item.edits.empty()) {
      try {
        auto res = explain_edits(p, item.edits, templates.at(p.lang), *provider, settings);
        parsed = std::move(res.explanations);
        for (auto& w : res.warnings) warnings.push_back(std::move(w));
        r["raw"] = res.raw;
      } catch (const DataError& e) {
        // A malformed reply is recorded and the run goes on.
        warn(e.what());
        r["error"] = e.what();
      }
    }
    for (const auto& e : parsed) expls.push_back(explanation_json(e));
    r["explanations"] = expls;
    r["warnings"] = warnings;
    r["coverage"] = coverage_json(coverage(item.edits, parsed, p), item.edits);
    records[i] = std::move(r);
  });
  write_jsonl(output, records);
  std::size_t n = 0, errors = 0;
  for (const auto& r : records) {
    n += r["explanations"].size();
    errors += r.contains("error");
  }
  out_of(ctx) << "wrote " << n << " explanations for " << records.size() << " pairs";
  if (errors) out_of(ctx) << ", " << errors << " unreadable replies";
  out_of(ctx) << '\n';
}

void cmd_eval_edits(const CliContext& ctx, const fs::path& predictions, const fs::path& gold,
                    const std::optional<fs::path>& adjudications, const fs::path& report_out) {
  const auto gold_pairs = load_pairs(gold);
  const auto preds = read_edited_pairs(predictions);
  std::map<std::string, const EditedPair*> by_id;
  for (const auto& e : preds) by_id[e.pair.id] = &e;
  Tokenizers tok(ctx);
  EditMatchReport total;
  std::set<std::string> used;
  for (const auto& g : gold_pairs) {
    check_language(ctx, g);
    if (!g.gold_edits) throw DataError("pair '" + g.id + "' has no gold edits");
    std::vector<AtomicEdit> pred;
    auto it = by_id.find(g.id);
    if (it == by_id.end()) {
      warn("pair '" + g.id + "' has no prediction");
    } else {
      pred = it->second->edits;
      used.insert(g.id);
    }
    total += match_edits(pred, *g.gold_edits, g, tok(g.lang));
  }
  for (const auto& e : preds) {
    if (!used.count(e.pair.id)) warn("prediction '" + e.pair.id + "' has no gold pair");
  }
  if (adjudications) apply_adjudications(total, load_adjudications(*adjudications));

  auto data = to_json(total);
  write_report(report_out, data, {edit_match_table(total)}, "Edit extraction");
  std::vector<json> queue;
  for (const auto& item : data["review_queue"]) queue.push_back(item);
  auto queue_path = fs::path(report_out).replace_extension(".queue.jsonl");
  write_jsonl(queue_path, queue);
  out_of(ctx) << "recall " << fixed(total.recall, 3) << " precision " << fixed(total.precision, 3) << " F1 "
              << fixed(total.f1, 3) << ", " << queue.size() << " edits queued for review\n";
}

void cmd_eval_coverage(const CliContext& ctx, const std::optional<fs::path>& edits, const fs::path& explanations,
                       const fs::path& report_out) {
  std::map<std::string, std::vector<AtomicEdit>> edit_override;
  if (edits) {
    for (auto& e : read_edited_pairs(*edits)) edit_override[e.pair.id] = std::move(e.edits);
  }
  const auto items = read_edited_pairs(explanations);
  std::size_t total_edits = 0, matched = 0, hallucinated = 0, unresolved = 0;
  json pairs = json::array();
  Table listing{"Per pair", {{"Pair", "Edits", "Matched", "Missing", "Hallucinated"}}, ""};
  for (const auto& item : items) {
    check_language(ctx, item.pair);
    auto pair_edits = item.edits;
    if (edits) {
      auto it = edit_override.find(item.pair.id);
      if (it == edit_override.end()) throw DataError("pair '" + item.pair.id + "' missing from " + edits->string());
      pair_edits = it->second;
    }
    std::vector<Explanation> expl;
    if (item.record.contains("explanations")) {
      for (const auto& e : item.record["explanations"]) expl.push_back(explanation_from_json(e));
    }
    const auto cov = coverage(pair_edits, expl, item.pair);
    total_edits += cov.total_edits;
    matched += cov.matched.size();
    hallucinated += cov.hallucinated.size();
    unresolved += cov.unresolved.size();
    auto j = coverage_json(cov, pair_edits);
    j["id"] = item.pair.id;
    std::string missing_text, halluc_text;
    for (const auto& m : j["missing_edits"]) {
      missing_text += (missing_text.empty() ? "" : "; ") + m["text"].get<std::string>();
    }
    for (const auto& h : j["hallucinated"]) {
      halluc_text += (halluc_text.empty() ? "" : "; ") + h["mention"].get<std::string>();
    }
    listing.rows.push_back({item.pair.id, std::to_string(cov.total_edits), std::to_string(cov.matched.size()),
                            missing_text, halluc_text});
    pairs.push_back(std::move(j));
  }
  const double rate =
      total_edits == 0 ? 1.0 : static_cast<double>(matched) / static_cast<double>(total_edits);
  json data = {{"pairs", pairs},
               {"total_edits", total_edits},
               {"matched_edits", matched},
               {"missing_edits", total_edits - matched},
               {"hallucinated", hallucinated},
               {"unresolved", unresolved},
               {"coverage_rate", rate}};
  Table summary{"Coverage",
                {{"Metric", "Value"},
                 {"Edits", std::to_string(total_edits)},
                 {"Explained edits", std::to_string(matched)},
                 {"Missing explanations", std::to_string(total_edits - matched)},
                 {"Hallucinated mentions", std::to_string(hallucinated)},
                 {"Coverage rate", format_percent(100.0 * rate)}},
                ""};
  write_report(report_out, data, {summary, listing}, "Error coverage");
  out_of(ctx) << "coverage " << format_percent(100.0 * rate) << " (" << matched << "/" << total_edits
              << "), " << hallucinated << " hallucinated mentions\n";
}

void cmd_report(const CliContext& ctx, const fs::path& annotations, const std::optional<fs::path>& dual_ids,
                const fs::path& report_out) {
  const auto records = load_annotations(annotations);
  std::optional<std::set<std::string>> dual;
  if (dual_ids) {
    std::ifstream in(*dual_ids, std::ios::binary);
    if (!in) throw DataError("cannot open " + dual_ids->string());
    dual.emplace();
    std::string line;
    while (std::getline(in, line)) {
      auto id = utf8::trim(line);
      if (!id.empty()) dual->insert(std::string(id));
    }
  }
  const auto summary = aggregate_annotations(records, dual);
  const auto tables = annotation_tables(summary);
  write_report(report_out, to_json(summary), tables, "Explanation evaluation");
  auto& os = out_of(ctx);
  for (const auto& t : tables) {
    os << t.title << '\n';
    for (std::size_t r = 1; r < t.rows.size(); ++r) {
      const auto& row = t.rows[r];
      os << "  " << row[0];
      for (std::size_t c = 1; c < row.size(); ++c) {
        if (!row[c].empty()) os << '\t' << row[c];
      }
      os << '\n';
    }
  }
}

// ---------------------------------------------------------------- entry point

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err,
            std::shared_ptr<Provider> provider) {
  CLI::App app{"Grammar error explanation toolkit"};
  app.require_subcommand(1);
  std::string config_path, lang, cache_dir;
  app.add_option("--config", config_path, "Run configuration (JSON)");
  app.add_option("--lang", lang, "Run language: de or zh");
  app.add_option("--cache-dir", cache_dir, "LLM response cache directory");

  std::string input, output, stats, mode = "rule", predictions, gold, adjud, edits, explanations, annotations,
                                    dual;
  auto* pre = app.add_subcommand("preprocess", "Filter a corpus and write statistics");
  pre->add_option("-i,--input", input, "Input pairs (.jsonl or .tsv)")->required();
  pre->add_option("-o,--output", output, "Filtered pairs (.jsonl)")->required();
  pre->add_option("--stats", stats, "Statistics JSON (default: output path with .stats.json extension)");

  auto* ext = app.add_subcommand("extract", "Extract atomic edits");
  ext->add_option("-i,--input", input, "Input pairs")->required();
  ext->add_option("-o,--output", output, "Pairs with edits (.jsonl)")->required();
  ext->add_option("--mode", mode, "rule or llm")->check(CLI::IsMember({"rule", "llm"}));

  auto* exp = app.add_subcommand("explain", "Generate explanations for extracted edits");
  exp->add_option("-i,--input", input, "Pairs with edits")->required();
  exp->add_option("-o,--output", output, "Explanations (.jsonl)")->required();

  auto* ee = app.add_subcommand("eval-edits", "Score predicted edits against gold edits");
  ee->add_option("--predictions", predictions, "Pairs with predicted edits")->required();
  ee->add_option("--gold", gold, "Pairs with gold edits")->required();
  ee->add_option("--adjudications", adjud, "Review verdicts (.jsonl)");
  ee->add_option("-o,--report", output, "Report JSON path")->required();

  auto* ec = app.add_subcommand("eval-coverage", "Check that every edit is explained");
  ec->add_option("--edits", edits, "Pairs with edits (defaults to the edits in the explanations file)");
  ec->add_option("--explanations", explanations, "Explanations file")->required();
  ec->add_option("-o,--report", output, "Report JSON path")->required();

  auto* rep = app.add_subcommand("report", "Summarize human annotations");
  rep->add_option("--annotations", annotations, "Annotation records (.jsonl)")->required();
  rep->add_option("--dual-ids", dual, "Pair ids rated by two annotators, one per line");
  rep->add_option("-o,--report", output, "Report JSON path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  auto opt = [](const std::string& s) { return s.empty() ? std::nullopt : std::optional<fs::path>(s); };
  try {
    CliContext ctx;
    if (!config_path.empty()) ctx.config = load_run_config(config_path);
    if (!lang.empty()) {
      try {
        ctx.config.language = parse_lang(lang);
      } catch (const Error& e) {
        throw ConfigError(e.what());
      }
    }
    if (!cache_dir.empty()) {
      ctx.config.cache_dir = fs::path(cache_dir);
    } else if (!ctx.config.cache_dir) {
      if (const char* env = std::getenv("GEE_CACHE_DIR"); env && *env) ctx.config.cache_dir = fs::path(env);
    }
    ctx.config.validate();
    ctx.provider = std::move(provider);
    ctx.out = &out;

    if (*pre) {
      cmd_preprocess(ctx, input, output, opt(stats));
    } else if (*ext) {
      cmd_extract(ctx, input, output, mode == "llm" ? ExtractMode::Llm : ExtractMode::Rule);
    } else if (*exp) {
      cmd_explain(ctx, input, output);
    } else if (*ee) {
      cmd_eval_edits(ctx, predictions, gold, opt(adjud), output);
    } else if (*ec) {
      cmd_eval_coverage(ctx, opt(edits), explanations, output);
    } else if (*rep) {
      cmd_report(ctx, annotations, opt(dual), output);
    }
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ProviderError& e) {
    err << "error: " << e.what() << '\n';
    return kExitProvider;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}

}  // namespace gee
