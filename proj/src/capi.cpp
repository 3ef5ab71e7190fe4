#include "xlogo/xlogo.h"

#include "xlogo/curriculum.hpp"
#include "xlogo/gateway.hpp"
#include "xlogo/harness.hpp"
#include "xlogo/synth.hpp"

#include <cstdlib>
#include <cstring>
#include <new>
#include <set>

struct xlogo_dataset {
    std::vector<xlogo::Record> records;
    std::vector<std::string> warnings;
};

struct xlogo_report {
    std::vector<xlogo::Record> records;
    xlogo::MetricsReport report;
};

namespace {

using nlohmann::json;

thread_local std::string g_last_error;

template <typename Fn>
xlogo_status guard(Fn&& fn) {
    try {
        g_last_error.clear();
        fn();
        return XLOGO_OK;
    } catch (const xlogo::UsageError& e) {
        g_last_error = e.what();
        return XLOGO_ERR_USAGE;
    } catch (const xlogo::DataError& e) {
        g_last_error = e.what();
        return XLOGO_ERR_DATA;
    } catch (const xlogo::ExternalError& e) {
        g_last_error = e.what();
        return XLOGO_ERR_EXTERNAL;
    } catch (const std::filesystem::filesystem_error& e) {
        g_last_error = e.what();
        return XLOGO_ERR_DATA;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return XLOGO_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return XLOGO_ERR_INTERNAL;
    }
}

char* dup_string(const std::string& s) {
    char* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (!out) throw std::bad_alloc();
    std::memcpy(out, s.data(), s.size() + 1);
    return out;
}

void set_out(char** out, const std::string& s) {
    if (out) *out = dup_string(s);
}

void require(const void* p, const char* what) {
    if (!p) throw xlogo::UsageError(std::string(what) + " must not be NULL");
}

const xlogo::Record& record_at(const xlogo_dataset* ds, size_t index) {
    require(ds, "dataset");
    if (index >= ds->records.size()) {
        throw xlogo::UsageError("record index " + std::to_string(index) + " out of range (dataset has " +
                                std::to_string(ds->records.size()) + " records)");
    }
    return ds->records[index];
}

json constraint_json(const xlogo::CodeConstraint& c) {
    json j = {{"kind", xlogo::to_string(c.kind)}};
    if (c.kind == xlogo::ConstraintKind::start_by) {
        j["prefix"] = json::array();
        for (const auto& cmd : c.prefix) j["prefix"].push_back(xlogo::print_command(cmd));
    } else {
        j["n"] = c.n.value_or(0);
    }
    return j;
}

json outcome_json(const xlogo::Outcome& o) {
    json j = {{"format", o.format_ok}, {"no_crash", o.no_crash}, {"success", o.success}};
    if (o.format_error) {
        j["format_error"] = {{"line", o.format_error->line}, {"column", o.format_error->column}, {"reason", o.format_error->reason}};
    }
    if (o.crash) j["crash"] = {{"reason", xlogo::to_string(o.crash->reason)}, {"at_command_index", o.crash->at_command_index}};
    if (o.goal_achieved) j["goal_achieved"] = *o.goal_achieved;
    if (o.constraint_report) {
        json results = json::array();
        for (const auto& r : o.constraint_report->results) {
            json c = constraint_json(r.constraint);
            c["passed"] = r.passed;
            results.push_back(std::move(c));
        }
        j["constraints"] = std::move(results);
    }
    return j;
}

xlogo::SynthParams to_params(const xlogo_synth_params& p) {
    xlogo::SynthParams out;
    require(p.difficulty, "difficulty");
    auto d = xlogo::parse_difficulty(p.difficulty);
    if (!d) throw xlogo::UsageError(std::string("unknown difficulty '") + p.difficulty + "' (expected easy, medium or hard)");
    out.difficulty = *d;
    out.count = p.count;
    out.per_combination_cap = p.per_combination_cap;
    out.min_rows = p.min_rows;
    out.max_rows = p.max_rows;
    out.min_cols = p.min_cols;
    out.max_cols = p.max_cols;
    out.distractor_density = p.distractor_density;
    out.seed = p.seed;
    out.reject_redundant = p.reject_redundant != 0;
    out.threads = p.threads;
    return out;
}

json stats_json(const xlogo::SynthStats& s) {
    return {{"reference", s.reference_id},
            {"difficulty", xlogo::to_string(s.difficulty)},
            {"code_space", s.code_space},
            {"codes", s.codes},
            {"degenerate_codes", s.degenerate_codes},
            {"infeasible_codes", s.infeasible_codes},
            {"world_attempts", s.world_attempts},
            {"unsatisfiable", s.unsatisfiable},
            {"failed_validation", s.failed_validation},
            {"rejected_redundant", s.rejected_redundant},
            {"duplicates", s.duplicates},
            {"excluded", s.excluded},
            {"pool", s.pool},
            {"kept", s.kept}};
}

xlogo_report* make_report(const xlogo_dataset* ds, const std::vector<xlogo::Prediction>& predictions, unsigned threads) {
    auto report = std::make_unique<xlogo_report>();
    report->records = ds->records;
    report->report = xlogo::evaluate_predictions(ds->records, predictions, threads);
    return report.release();
}

}  // namespace

extern "C" {

const char* xlogo_version(void) { return "1.0.0"; }

const char* xlogo_last_error(void) { return g_last_error.c_str(); }

void xlogo_free_string(char* s) { std::free(s); }

xlogo_status xlogo_dataset_load(const char* path, xlogo_dataset** out) {
    return guard([&] {
        require(path, "path");
        require(out, "out");
        auto d = xlogo::load_dataset(path);
        *out = new xlogo_dataset{std::move(d.records), std::move(d.warnings)};
    });
}

xlogo_status xlogo_dataset_parse(const char* text, xlogo_dataset** out) {
    return guard([&] {
        require(text, "text");
        require(out, "out");
        auto d = xlogo::parse_dataset(text);
        *out = new xlogo_dataset{std::move(d.records), std::move(d.warnings)};
    });
}

xlogo_status xlogo_dataset_save(const xlogo_dataset* ds, const char* path) {
    return guard([&] {
        require(ds, "dataset");
        require(path, "path");
        xlogo::save_dataset(ds->records, path);
    });
}

size_t xlogo_dataset_size(const xlogo_dataset* ds) { return ds ? ds->records.size() : 0; }

xlogo_status xlogo_dataset_record_json(const xlogo_dataset* ds, size_t index, char** out) {
    return guard([&] { set_out(out, xlogo::record_to_json(record_at(ds, index)).dump()); });
}

xlogo_status xlogo_dataset_warnings(const xlogo_dataset* ds, char** out) {
    return guard([&] {
        require(ds, "dataset");
        set_out(out, json(ds->warnings).dump());
    });
}

xlogo_status xlogo_dataset_hash(const xlogo_dataset* ds, size_t index, char** out) {
    return guard([&] { set_out(out, xlogo::canonical_hash(record_at(ds, index).pair())); });
}

void xlogo_dataset_free(xlogo_dataset* ds) { delete ds; }

xlogo_status xlogo_run(const xlogo_dataset* ds, size_t index, const char* code, char** out) {
    return guard([&] {
        const xlogo::Record& r = record_at(ds, index);
        require(code, "code");
        json j = outcome_json(xlogo::run(r.task, std::string_view(code)));
        j["id"] = r.task.id;
        j["failure_label"] = xlogo::to_string(xlogo::classify_failure(r.task, code));
        set_out(out, j.dump());
    });
}

xlogo_status xlogo_check(const xlogo_dataset* ds, size_t index, const char* code, int* ok, char** out) {
    return guard([&] {
        const xlogo::Record& r = record_at(ds, index);
        require(code, "code");
        const xlogo::ValidationReport validation = xlogo::validate_task(r.task);
        const xlogo::Outcome outcome = xlogo::run(r.task, std::string_view(code));
        json j = {{"id", r.task.id}, {"task_valid", validation.empty()}, {"validation", validation}};
        j["outcome"] = outcome_json(outcome);
        bool passed = validation.empty() && outcome.success;
        if (passed) {
            const bool redundant = xlogo::is_redundant(r.task, code);
            j["redundant"] = redundant;
            passed = !redundant;
            j["hash"] = xlogo::canonical_hash({r.task, code});
        }
        j["ok"] = passed;
        if (ok) *ok = passed ? 1 : 0;
        set_out(out, j.dump());
    });
}

xlogo_status xlogo_render_prompt(const xlogo_dataset* ds, size_t index, const char* style, char** out) {
    return guard([&] {
        const xlogo::Record& r = record_at(ds, index);
        require(style, "style");
        auto s = xlogo::parse_prompt_style(style);
        if (!s) throw xlogo::UsageError(std::string("unknown prompt style '") + style + "' (expected nl or ascii)");
        set_out(out, xlogo::render_prompt(r.task, *s));
    });
}

xlogo_status xlogo_perturb(const xlogo_dataset* ds, size_t index, const char* ops, uint64_t seed, char** out) {
    return guard([&] {
        const xlogo::Record& r = record_at(ds, index);
        require(ops, "ops");
        const xlogo::PerturbationSet set = xlogo::parse_perturbation_ops(ops);
        xlogo::Rng rng = xlogo::derive_rng(seed, xlogo::fnv1a(r.task.id), set);
        xlogo::Record perturbed = r;
        perturbed.task = xlogo::perturb(r.task, set, rng);
        set_out(out, xlogo::record_to_json(perturbed).dump());
    });
}

void xlogo_synth_params_default(xlogo_synth_params* params) {
    if (!params) return;
    const xlogo::SynthParams d;
    params->difficulty = "easy";
    params->count = d.count;
    params->per_combination_cap = d.per_combination_cap;
    params->min_rows = d.min_rows;
    params->max_rows = d.max_rows;
    params->min_cols = d.min_cols;
    params->max_cols = d.max_cols;
    params->distractor_density = d.distractor_density;
    params->seed = d.seed;
    params->reject_redundant = d.reject_redundant ? 1 : 0;
    params->threads = d.threads;
}

xlogo_status xlogo_synthesize(const xlogo_dataset* references, const xlogo_synth_params* params, xlogo_dataset** out,
                              char** manifest) {
    return guard([&] {
        require(references, "references");
        require(params, "params");
        require(out, "out");
        const xlogo::SynthParams p = to_params(*params);
        std::set<std::string> excluded;
        for (const auto& r : references->records) excluded.insert(xlogo::canonical_hash(r.pair()));

        auto result = std::make_unique<xlogo_dataset>();
        json per_reference = json::array();
        json warnings = json::array();
        for (const auto& r : references->records) {
            xlogo::SynthResult s = xlogo::synthesize(r.pair(), p, excluded);
            for (auto& pair : s.pairs) {
                excluded.insert(xlogo::canonical_hash(pair));
                result->records.push_back({std::move(pair.task), std::move(pair.code), json::object()});
            }
            per_reference.push_back(stats_json(s.stats));
            for (auto& w : s.warnings) warnings.push_back(w);
        }
        json m = {{"seed", p.seed},
                  {"params",
                   {{"difficulty", xlogo::to_string(p.difficulty)},
                    {"count", p.count},
                    {"per_combination_cap", p.per_combination_cap},
                    {"rows", {p.min_rows, p.max_rows}},
                    {"cols", {p.min_cols, p.max_cols}},
                    {"distractor_density", p.distractor_density},
                    {"reject_redundant", p.reject_redundant}}},
                  {"references", std::move(per_reference)},
                  {"total", result->records.size()},
                  {"warnings", std::move(warnings)}};
        set_out(manifest, m.dump(2));
        *out = result.release();
    });
}

xlogo_status xlogo_split(const xlogo_dataset* ds, long long train, size_t val, size_t eval, uint64_t seed,
                         xlogo_dataset** train_out, xlogo_dataset** val_out, xlogo_dataset** eval_out) {
    return guard([&] {
        require(ds, "dataset");
        require(train_out, "train_out");
        require(val_out, "val_out");
        require(eval_out, "eval_out");
        xlogo::SplitSizes sizes;
        if (train >= 0) sizes.train = static_cast<std::size_t>(train);
        sizes.val = val;
        sizes.eval = eval;
        auto parts = xlogo::split_dataset(ds->records, sizes, seed);
        auto t = std::make_unique<xlogo_dataset>(xlogo_dataset{std::move(parts.train), {}});
        auto v = std::make_unique<xlogo_dataset>(xlogo_dataset{std::move(parts.val), {}});
        auto e = std::make_unique<xlogo_dataset>(xlogo_dataset{std::move(parts.eval), {}});
        *train_out = t.release();
        *val_out = v.release();
        *eval_out = e.release();
    });
}

xlogo_status xlogo_evaluate(const xlogo_dataset* ds, const char* predictions_path, unsigned threads, xlogo_report** out) {
    return guard([&] {
        require(ds, "dataset");
        require(predictions_path, "predictions_path");
        require(out, "out");
        *out = make_report(ds, xlogo::load_predictions(predictions_path), threads);
    });
}

xlogo_status xlogo_evaluate_text(const xlogo_dataset* ds, const char* predictions_jsonl, unsigned threads,
                                 xlogo_report** out) {
    return guard([&] {
        require(ds, "dataset");
        require(predictions_jsonl, "predictions_jsonl");
        require(out, "out");
        *out = make_report(ds, xlogo::parse_predictions(predictions_jsonl), threads);
    });
}

xlogo_status xlogo_report_rates(const xlogo_report* report, double* format, double* no_crash, double* success) {
    return guard([&] {
        require(report, "report");
        if (format) *format = report->report.format_rate;
        if (no_crash) *no_crash = report->report.no_crash_rate;
        if (success) *success = report->report.success_rate;
    });
}

xlogo_status xlogo_report_json(const xlogo_report* report, char** out) {
    return guard([&] {
        require(report, "report");
        set_out(out, xlogo::report_to_json(report->report).dump(2));
    });
}

xlogo_status xlogo_report_breakdown(const xlogo_report* report, const char* dimension, char** json_out,
                                    char** table_out) {
    return guard([&] {
        require(report, "report");
        require(dimension, "dimension");
        const auto table = xlogo::breakdown(report->records, report->report, dimension);
        std::string j = xlogo::breakdown_to_json(table).dump(2);
        std::string text = xlogo::format_breakdown(table);
        set_out(json_out, j);
        set_out(table_out, text);
    });
}

void xlogo_report_free(xlogo_report* report) { delete report; }

xlogo_status xlogo_resample(const char* outcomes_path, const xlogo_resample_plan* plan, size_t** indices,
                            size_t* n_indices, char** manifest) {
    return guard([&] {
        require(outcomes_path, "outcomes_path");
        require(plan, "plan");
        require(indices, "indices");
        require(n_indices, "n_indices");
        const auto outcomes = xlogo::load_outcomes(outcomes_path);
        if (outcomes.empty()) throw xlogo::DataError(std::string(outcomes_path) + ": no outcomes");
        xlogo::ResamplePlan p{plan->beta, plan->n_draws ? plan->n_draws : outcomes.size(), plan->seed};
        const auto weights = xlogo::compute_weights(outcomes, p.beta);
        const auto drawn = xlogo::resample(outcomes.size(), weights.normalized, p);
        auto* buf = static_cast<size_t*>(std::malloc(sizeof(size_t) * drawn.size()));
        if (!buf) throw std::bad_alloc();
        std::copy(drawn.begin(), drawn.end(), buf);
        std::string m;
        try {
            m = xlogo::resample_manifest(outcomes, weights, p).dump(2);
            set_out(manifest, m);
        } catch (...) {
            std::free(buf);
            throw;
        }
        *indices = buf;
        *n_indices = drawn.size();
    });
}

void xlogo_free_indices(size_t* indices) { std::free(indices); }

void xlogo_query_config_default(xlogo_query_config* config) {
    if (!config) return;
    const xlogo::GatewayConfig d;
    config->endpoint = nullptr;
    config->model = nullptr;
    config->temperature = d.temperature;
    config->max_tokens = d.max_tokens;
    config->concurrency = d.concurrency;
    config->max_retries = d.max_retries;
    config->initial_backoff_ms = d.initial_backoff_ms;
    config->timeout_seconds = d.timeout_seconds;
    config->style = "nl";
}

xlogo_status xlogo_query(const xlogo_dataset* ds, const xlogo_query_config* config, const char* out_path, char** stats) {
    return guard([&] {
        require(ds, "dataset");
        require(config, "config");
        require(out_path, "out_path");
        if (!config->endpoint || !*config->endpoint) throw xlogo::UsageError("endpoint is required");
        if (!config->model || !*config->model) throw xlogo::UsageError("model is required");
        const char* style_name = config->style ? config->style : "nl";
        auto style = xlogo::parse_prompt_style(style_name);
        if (!style) throw xlogo::UsageError(std::string("unknown prompt style '") + style_name + "'");

        xlogo::GatewayConfig g;
        g.endpoint = config->endpoint;
        g.model = config->model;
        g.temperature = config->temperature;
        g.max_tokens = config->max_tokens;
        g.concurrency = config->concurrency;
        g.max_retries = config->max_retries;
        g.initial_backoff_ms = config->initial_backoff_ms;
        g.timeout_seconds = config->timeout_seconds;

        std::vector<std::pair<std::string, std::string>> prompts;
        for (const auto& r : ds->records) prompts.emplace_back(r.task.id, xlogo::render_prompt(r.task, *style));
        const auto result = xlogo::query_model(g, prompts, std::filesystem::path(out_path));
        set_out(stats, json{{"prompts", prompts.size()},
                            {"requests", result.stats.requests},
                            {"retries", result.stats.retries},
                            {"failures", result.stats.failures},
                            {"resumed", result.stats.resumed}}
                           .dump());
    });
}

}  // extern "C"
