// xlogo command-line tool. Talks to the library only through xlogo.h.

#include "xlogo/xlogo.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

namespace {

using nlohmann::json;

struct Failure {
    xlogo_status status;
    std::string message;
};

void check(xlogo_status s) {
    if (s != XLOGO_OK) throw Failure{s, xlogo_last_error()};
}

struct CString {
    char* p = nullptr;
    ~CString() { xlogo_free_string(p); }
    std::string str() const { return p ? p : ""; }
};

struct DatasetDeleter {
    void operator()(xlogo_dataset* d) const { xlogo_dataset_free(d); }
};
using Dataset = std::unique_ptr<xlogo_dataset, DatasetDeleter>;

struct ReportDeleter {
    void operator()(xlogo_report* r) const { xlogo_report_free(r); }
};
using Report = std::unique_ptr<xlogo_report, ReportDeleter>;

Dataset load(const std::string& path) {
    xlogo_dataset* d = nullptr;
    check(xlogo_dataset_load(path.c_str(), &d));
    Dataset out(d);
    CString warnings;
    check(xlogo_dataset_warnings(d, &warnings.p));
    for (const auto& w : json::parse(warnings.str())) std::cerr << "warning: " << path << ": " << w.get<std::string>() << "\n";
    return out;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{XLOGO_ERR_DATA, "cannot read '" + path + "'"};
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Failure{XLOGO_ERR_DATA, "cannot write '" + path.string() + "'"};
    out << text;
}

// Index of the selected record: --id wins over --index.
size_t select(const xlogo_dataset* ds, const std::string& id, size_t index) {
    const size_t n = xlogo_dataset_size(ds);
    if (id.empty()) {
        if (index >= n) throw Failure{XLOGO_ERR_USAGE, "record index " + std::to_string(index) + " out of range (" + std::to_string(n) + " records)"};
        return index;
    }
    for (size_t i = 0; i < n; ++i) {
        CString rec;
        check(xlogo_dataset_record_json(ds, i, &rec.p));
        if (json::parse(rec.str()).value("id", "") == id) return i;
    }
    throw Failure{XLOGO_ERR_DATA, "no task with id '" + id + "'"};
}

std::string pct(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f%%", 100.0 * x);
    return buf;
}

struct Options {
    bool json_out = false;

    std::string task, code, id, style = "nl";
    size_t index = 0;

    std::string reference, difficulty = "easy", out;
    size_t count = 500, cap = 3000;
    double distractors = 0.2;
    int min_rows = 2, max_rows = 9, min_cols = 2, max_cols = 9;
    unsigned threads = 0;
    bool keep_redundant = false;
    std::optional<uint64_t> seed;

    std::string in;
    long long train = -1;
    size_t val = 0, eval = 0;

    std::string dataset, predictions, breakdown;

    std::string ops;

    std::string outcomes;
    double beta = 1.0;
    size_t draws = 0;

    std::string endpoint, model;
    double temperature = 0.0;
    int max_tokens = 1024, retries = 5;
    unsigned concurrency = 4;
};

uint64_t seed_of(const Options& o) {
    if (!o.seed) throw Failure{XLOGO_ERR_USAGE, "--seed is required"};
    return *o.seed;
}

int cmd_run(const Options& o) {
    Dataset ds = load(o.task);
    const size_t i = select(ds.get(), o.id, o.index);
    const std::string code = read_file(o.code);
    CString out;
    check(xlogo_run(ds.get(), i, code.c_str(), &out.p));
    const json j = json::parse(out.str());
    if (o.json_out) {
        std::cout << j.dump(2) << "\n";
        return 0;
    }
    std::cout << "task: " << j["id"].get<std::string>() << "\n";
    if (j["success"].get<bool>()) {
        std::cout << "outcome: Success\n";
    } else if (!j["format"].get<bool>()) {
        const auto& e = j["format_error"];
        std::cout << "outcome: Format failure (line " << e["line"] << ", column " << e["column"] << ": "
                  << e["reason"].get<std::string>() << ")\n";
    } else if (!j["no_crash"].get<bool>()) {
        std::cout << "outcome: Crash (" << j["crash"]["reason"].get<std::string>() << " at command "
                  << j["crash"]["at_command_index"] << ")\n";
    } else {
        std::cout << "outcome: " << (j.value("goal_achieved", false) ? "Goal achieved, code constraints violated" : "Goal not achieved") << "\n";
    }
    if (j.contains("constraints")) {
        for (const auto& c : j["constraints"]) {
            std::cout << "constraint " << c["kind"].get<std::string>();
            if (c.contains("n")) std::cout << "(" << c["n"] << ")";
            std::cout << ": " << (c["passed"].get<bool>() ? "passed" : "failed") << "\n";
        }
    }
    std::cout << "label: " << j["failure_label"].get<std::string>() << "\n";
    return 0;
}

int cmd_check(const Options& o) {
    Dataset ds = load(o.task);
    const size_t i = select(ds.get(), o.id, o.index);
    const std::string code = read_file(o.code);
    CString out;
    int ok = 0;
    check(xlogo_check(ds.get(), i, code.c_str(), &ok, &out.p));
    const json j = json::parse(out.str());
    if (o.json_out) {
        std::cout << j.dump(2) << "\n";
    } else {
        for (const auto& v : j["validation"]) std::cout << "invalid task: " << v.get<std::string>() << "\n";
        std::cout << "task valid: " << (j["task_valid"].get<bool>() ? "yes" : "no") << "\n";
        std::cout << "solves task: " << (j["outcome"]["success"].get<bool>() ? "yes" : "no") << "\n";
        if (j.contains("redundant")) std::cout << "redundant: " << (j["redundant"].get<bool>() ? "yes" : "no") << "\n";
        if (j.contains("hash")) std::cout << "hash: " << j["hash"].get<std::string>() << "\n";
        std::cout << (ok ? "OK" : "FAILED") << "\n";
    }
    return ok ? 0 : XLOGO_ERR_DATA;
}

int cmd_synth(const Options& o) {
    Dataset refs = load(o.reference);
    xlogo_synth_params p;
    xlogo_synth_params_default(&p);
    p.difficulty = o.difficulty.c_str();
    p.count = o.count;
    p.per_combination_cap = o.cap;
    p.distractor_density = o.distractors;
    p.min_rows = o.min_rows;
    p.max_rows = o.max_rows;
    p.min_cols = o.min_cols;
    p.max_cols = o.max_cols;
    p.seed = seed_of(o);
    p.threads = o.threads;
    p.reject_redundant = o.keep_redundant ? 0 : 1;
    xlogo_dataset* raw = nullptr;
    CString manifest;
    check(xlogo_synthesize(refs.get(), &p, &raw, &manifest.p));
    Dataset out(raw);
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    const auto data_path = dir / ("synth_" + o.difficulty + ".jsonl");
    const auto manifest_path = dir / ("synth_" + o.difficulty + ".manifest.json");
    check(xlogo_dataset_save(out.get(), data_path.string().c_str()));
    write_file(manifest_path, manifest.str() + "\n");
    const json m = json::parse(manifest.str());
    for (const auto& w : m["warnings"]) std::cerr << "warning: " << w.get<std::string>() << "\n";
    if (o.json_out) {
        std::cout << json{{"dataset", data_path.string()}, {"manifest", manifest_path.string()}, {"total", m["total"]}}.dump() << "\n";
    } else {
        std::cout << "wrote " << m["total"] << " pairs to " << data_path.string() << "\n";
    }
    return 0;
}

int cmd_split(const Options& o) {
    Dataset ds = load(o.in);
    xlogo_dataset *t = nullptr, *v = nullptr, *e = nullptr;
    check(xlogo_split(ds.get(), o.train, o.val, o.eval, seed_of(o), &t, &v, &e));
    Dataset train(t), val(v), eval(e);
    const std::filesystem::path dir(o.out);
    std::filesystem::create_directories(dir);
    check(xlogo_dataset_save(train.get(), (dir / "train.jsonl").string().c_str()));
    check(xlogo_dataset_save(val.get(), (dir / "val.jsonl").string().c_str()));
    check(xlogo_dataset_save(eval.get(), (dir / "eval.jsonl").string().c_str()));
    const json sizes = {{"train", xlogo_dataset_size(train.get())},
                        {"val", xlogo_dataset_size(val.get())},
                        {"eval", xlogo_dataset_size(eval.get())}};
    if (o.json_out) std::cout << sizes.dump() << "\n";
    else std::cout << "train " << sizes["train"] << ", val " << sizes["val"] << ", eval " << sizes["eval"] << "\n";
    return 0;
}

int cmd_render(const Options& o) {
    Dataset ds = load(o.task);
    const size_t i = select(ds.get(), o.id, o.index);
    CString out;
    check(xlogo_render_prompt(ds.get(), i, o.style.c_str(), &out.p));
    std::cout << out.str();
    return 0;
}

int cmd_eval(const Options& o) {
    Dataset ds = load(o.dataset);
    xlogo_report* raw = nullptr;
    check(xlogo_evaluate(ds.get(), o.predictions.c_str(), o.threads, &raw));
    Report report(raw);
    CString rj;
    check(xlogo_report_json(report.get(), &rj.p));
    json j = json::parse(rj.str());
    CString bj, table;
    if (!o.breakdown.empty()) {
        check(xlogo_report_breakdown(report.get(), o.breakdown.c_str(), &bj.p, &table.p));
        j["breakdown"] = json::parse(bj.str());
    }
    write_file(o.out, j.dump(2) + "\n");
    if (o.json_out) {
        json summary = {{"n", j["n"]}, {"format_rate", j["format_rate"]}, {"no_crash_rate", j["no_crash_rate"]},
                        {"success_rate", j["success_rate"]}};
        if (j.contains("breakdown")) summary["breakdown"] = j["breakdown"];
        std::cout << summary.dump(2) << "\n";
        return 0;
    }
    std::cout << "tasks: " << j["n"] << "\n";
    std::cout << "format: " << pct(j["format_rate"].get<double>()) << "\n";
    std::cout << "no-crash: " << pct(j["no_crash_rate"].get<double>()) << "\n";
    std::cout << "success: " << pct(j["success_rate"].get<double>()) << "\n";
    if (table.p) std::cout << "\n" << table.str();
    return 0;
}

int cmd_perturb(const Options& o) {
    Dataset ds = load(o.task);
    const uint64_t seed = seed_of(o);
    std::string lines;
    for (size_t i = 0; i < xlogo_dataset_size(ds.get()); ++i) {
        CString rec;
        check(xlogo_perturb(ds.get(), i, o.ops.c_str(), seed, &rec.p));
        lines += rec.str() + "\n";
    }
    if (o.out.empty()) std::cout << lines;
    else write_file(o.out, lines);
    return 0;
}

int cmd_resample(const Options& o) {
    xlogo_resample_plan plan{o.beta, o.draws, seed_of(o)};
    size_t* indices = nullptr;
    size_t n = 0;
    CString manifest;
    check(xlogo_resample(o.outcomes.c_str(), &plan, &indices, &n, &manifest.p));
    std::string text;
    for (size_t i = 0; i < n; ++i) text += std::to_string(indices[i]) + "\n";
    xlogo_free_indices(indices);
    write_file(o.out, text);
    write_file(o.out + ".manifest.json", manifest.str() + "\n");
    if (o.json_out) std::cout << manifest.str() << "\n";
    else std::cout << "wrote " << n << " indices to " << o.out << "\n";
    return 0;
}

int cmd_query(const Options& o) {
    Dataset ds = load(o.dataset);
    xlogo_query_config c;
    xlogo_query_config_default(&c);
    c.endpoint = o.endpoint.c_str();
    c.model = o.model.c_str();
    c.temperature = o.temperature;
    c.max_tokens = o.max_tokens;
    c.concurrency = o.concurrency;
    c.max_retries = o.retries;
    c.style = o.style.c_str();
    CString stats;
    check(xlogo_query(ds.get(), &c, o.out.c_str(), &stats.p));
    if (o.json_out) std::cout << stats.str() << "\n";
    else std::cerr << "query finished: " << stats.str() << "\n";
    return 0;
}

void add_record_selector(CLI::App* sub, Options& o) {
    sub->add_option("--index", o.index, "Record index in the task file")->capture_default_str();
    sub->add_option("--id", o.id, "Select the record by task id");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"xlogo: visual programming tasks, emulator, synthesis and evaluation"};
    app.require_subcommand(1);
    app.fallthrough();
    app.set_config("--config", "", "Read flags from a key=value config file");
    Options o;
    app.add_flag("--json", o.json_out, "Print a machine-readable payload on stdout");

    auto* run = app.add_subcommand("run", "Execute a program on a task and report the outcome");
    run->add_option("--task", o.task, "Task file (JSON or JSONL)")->required();
    run->add_option("--code", o.code, "Program file")->required();
    add_record_selector(run, o);

    auto* chk = app.add_subcommand("check", "Validate a task and verify that the code solves it");
    chk->add_option("--task", o.task, "Task file (JSON or JSONL)")->required();
    chk->add_option("--code", o.code, "Program file")->required();
    add_record_selector(chk, o);

    auto* synth = app.add_subcommand("synth", "Synthesize task-code pairs from reference pairs");
    synth->add_option("--reference", o.reference, "Reference pairs (JSONL with code)")->required();
    synth->add_option("--difficulty", o.difficulty, "easy, medium or hard")
        ->check(CLI::IsMember({"easy", "medium", "hard"}))
        ->capture_default_str();
    synth->add_option("--count", o.count, "Pairs to keep per reference")->capture_default_str();
    synth->add_option("--seed", o.seed, "Random seed")->required();
    synth->add_option("--out", o.out, "Output directory")->required();
    synth->add_option("--cap", o.cap, "Attempts per (code, constraint, goal) combination")->capture_default_str();
    synth->add_option("--distractors", o.distractors, "Distractor density in [0, 1]")->capture_default_str();
    synth->add_option("--min-rows", o.min_rows, "Smallest grid height")->capture_default_str();
    synth->add_option("--max-rows", o.max_rows, "Largest grid height")->capture_default_str();
    synth->add_option("--min-cols", o.min_cols, "Smallest grid width")->capture_default_str();
    synth->add_option("--max-cols", o.max_cols, "Largest grid width")->capture_default_str();
    synth->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();
    synth->add_flag("--keep-redundant", o.keep_redundant, "Keep pairs that a smaller edit of the code still solves");

    auto* split = app.add_subcommand("split", "Split a dataset into train/val/eval files");
    split->add_option("--in", o.in, "Input dataset")->required();
    split->add_option("--val", o.val, "Validation size")->required();
    split->add_option("--eval", o.eval, "Evaluation size")->required();
    split->add_option("--train", o.train, "Training size (default: the rest)");
    split->add_option("--seed", o.seed, "Random seed")->required();
    split->add_option("--out", o.out, "Output directory")->required();

    auto* render = app.add_subcommand("render", "Render the model prompt for a task");
    render->add_option("--task", o.task, "Task file (JSON or JSONL)")->required();
    render->add_option("--style", o.style, "nl or ascii")->check(CLI::IsMember({"nl", "ascii"}))->capture_default_str();
    add_record_selector(render, o);

    auto* eval = app.add_subcommand("eval", "Score predictions against a dataset");
    eval->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
    eval->add_option("--predictions", o.predictions, "Predictions JSONL {\"id\", \"raw_output\"}")->required();
    eval->add_option("--out", o.out, "Report JSON path")->required();
    eval->add_option("--breakdown", o.breakdown,
                     "task_type, code_constraints, code_concepts, code_length or grid_size");
    eval->add_option("--threads", o.threads, "Worker threads (0 = all cores)")->capture_default_str();

    auto* perturb = app.add_subcommand("perturb", "Relax tasks with perturbations A, B and C");
    perturb->add_option("--task", o.task, "Task file (JSON or JSONL)")->required();
    perturb->add_option("--ops", o.ops, "Comma-separated subset of A (code constraints), B (grid constraints), C (spatial)")
        ->required();
    perturb->add_option("--seed", o.seed, "Random seed")->required();
    perturb->add_option("--out", o.out, "Output JSONL (default: stdout)");

    auto* resample = app.add_subcommand("resample", "Draw a failure-weighted resampled training index set");
    resample->add_option("--outcomes", o.outcomes, "Outcomes JSONL {\"index\", \"failed\"}")->required();
    resample->add_option("--beta", o.beta, "Extra weight of failed samples")->capture_default_str();
    resample->add_option("--draws", o.draws, "Number of draws (default: number of outcomes)");
    resample->add_option("--seed", o.seed, "Random seed")->required();
    resample->add_option("--out", o.out, "Index file; the manifest goes to <out>.manifest.json")->required();

    auto* query = app.add_subcommand("query", "Collect predictions from an OpenAI-compatible endpoint (key in MODEL_API_KEY)");
    query->add_option("--dataset", o.dataset, "Dataset (JSONL)")->required();
    query->add_option("--endpoint", o.endpoint, "Base URL, e.g. http://localhost:8000/v1")->required();
    query->add_option("--model", o.model, "Model name")->required();
    query->add_option("--out", o.out, "Predictions JSONL (resumed if present)")->required();
    query->add_option("--temperature", o.temperature, "Sampling temperature")->capture_default_str();
    query->add_option("--concurrency", o.concurrency, "Requests in flight")->capture_default_str();
    query->add_option("--max-tokens", o.max_tokens, "Completion token cap")->capture_default_str();
    query->add_option("--retries", o.retries, "Retries per request on transient errors")->capture_default_str();
    query->add_option("--style", o.style, "Prompt style, nl or ascii")->check(CLI::IsMember({"nl", "ascii"}))->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : XLOGO_ERR_USAGE;
    }

    try {
        if (*run) return cmd_run(o);
        if (*chk) return cmd_check(o);
        if (*synth) return cmd_synth(o);
        if (*split) return cmd_split(o);
        if (*render) return cmd_render(o);
        if (*eval) return cmd_eval(o);
        if (*perturb) return cmd_perturb(o);
        if (*resample) return cmd_resample(o);
        if (*query) return cmd_query(o);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        if (o.json_out) std::cout << json{{"error", f.message}, {"status", static_cast<int>(f.status)}}.dump() << "\n";
        return f.status == XLOGO_ERR_INTERNAL ? XLOGO_ERR_DATA : static_cast<int>(f.status);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return XLOGO_ERR_DATA;
    }
    return XLOGO_ERR_USAGE;
}
