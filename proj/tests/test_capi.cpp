// Exercises the shared library strictly through xlogo.h.

#include "xlogo/xlogo.h"

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>
#include <json.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

using nlohmann::json;

namespace {

std::string fixture(const char* name) { return std::string(XLOGO_FIXTURE_DIR) + "/" + name; }

std::string take(char* s) {
    std::string out = s ? s : "";
    xlogo_free_string(s);
    return out;
}

struct Loaded {
    xlogo_dataset* ds = nullptr;
    explicit Loaded(const std::string& path) { REQUIRE(xlogo_dataset_load(path.c_str(), &ds) == XLOGO_OK); }
    ~Loaded() { xlogo_dataset_free(ds); }
};

std::string code_of(const xlogo_dataset* ds, size_t i) {
    char* rec = nullptr;
    REQUIRE(xlogo_dataset_record_json(ds, i, &rec) == XLOGO_OK);
    return json::parse(take(rec)).at("code").get<std::string>();
}

std::filesystem::path temp_dir() {
    auto dir = std::filesystem::temp_directory_path() / "xlogo_capi_tests";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("version and datasets") {
    CHECK(std::string(xlogo_version()) == "1.0.0");
    Loaded f(fixture("figure2.jsonl"));
    CHECK(xlogo_dataset_size(f.ds) == 5);
    char* h = nullptr;
    REQUIRE(xlogo_dataset_hash(f.ds, 0, &h) == XLOGO_OK);
    CHECK(take(h).size() == 64);

    xlogo_dataset* bad = nullptr;
    CHECK(xlogo_dataset_load(fixture("missing.jsonl").c_str(), &bad) == XLOGO_ERR_DATA);
    CHECK(std::string(xlogo_last_error()).find("missing.jsonl") != std::string::npos);
    CHECK(xlogo_dataset_parse("{\"id\": 1}\n", &bad) == XLOGO_ERR_DATA);
    CHECK(xlogo_dataset_record_json(f.ds, 99, &h) == XLOGO_ERR_USAGE);
    CHECK(xlogo_dataset_load(nullptr, &bad) == XLOGO_ERR_USAGE);

    xlogo_dataset* empty = nullptr;
    REQUIRE(xlogo_dataset_parse("", &empty) == XLOGO_OK);
    CHECK(xlogo_dataset_size(empty) == 0);
    xlogo_dataset_free(empty);
}

TEST_CASE("run and check") {
    Loaded f(fixture("figure2.jsonl"));
    for (size_t i = 0; i < xlogo_dataset_size(f.ds); ++i) {
        char* out = nullptr;
        REQUIRE(xlogo_run(f.ds, i, code_of(f.ds, i).c_str(), &out) == XLOGO_OK);
        const json j = json::parse(take(out));
        CHECK(j["success"] == true);
        CHECK(j["failure_label"] == "Success");
        int ok = 0;
        REQUIRE(xlogo_check(f.ds, i, code_of(f.ds, i).c_str(), &ok, &out) == XLOGO_OK);
        const json c = json::parse(take(out));
        CHECK(ok == 1);
        CHECK(c["redundant"] == false);
    }
    char* out = nullptr;
    REQUIRE(xlogo_run(f.ds, 0, "def Run():\n  jump()", &out) == XLOGO_OK);
    const json j = json::parse(take(out));
    CHECK(j["format"] == false);
    CHECK(j["format_error"]["reason"] == "unknown command");
    int ok = 1;
    REQUIRE(xlogo_check(f.ds, 0, "def Run():\n  move_forward()", &ok, &out) == XLOGO_OK);
    take(out);
    CHECK(ok == 0);
}

TEST_CASE("render and perturb") {
    Loaded f(fixture("figure2.jsonl"));
    char* out = nullptr;
    REQUIRE(xlogo_render_prompt(f.ds, 4, "nl", &out) == XLOGO_OK);
    CHECK(take(out).find("with just 6 commands") != std::string::npos);
    CHECK(xlogo_render_prompt(f.ds, 4, "html", &out) == XLOGO_ERR_USAGE);
    REQUIRE(xlogo_perturb(f.ds, 4, "A,B", 1, &out) == XLOGO_OK);
    const json p = json::parse(take(out));
    CHECK(p["constraints"].empty());
    CHECK(p["grid"]["forbidden"].empty());
    CHECK(xlogo_perturb(f.ds, 4, "Z", 1, &out) == XLOGO_ERR_USAGE);
}

TEST_CASE("synthesize and split") {
    xlogo_dataset* refs = nullptr;
    Loaded f(fixture("figure2.jsonl"));
    char* rec = nullptr;
    REQUIRE(xlogo_dataset_record_json(f.ds, 4, &rec) == XLOGO_OK);
    REQUIRE(xlogo_dataset_parse(take(rec).c_str(), &refs) == XLOGO_OK);

    xlogo_synth_params p;
    xlogo_synth_params_default(&p);
    CHECK(p.count == 500);
    CHECK(p.per_combination_cap == 3000);
    p.count = 40;
    p.seed = 8;
    p.difficulty = "medium";
    xlogo_dataset* out = nullptr;
    char* manifest = nullptr;
    REQUIRE(xlogo_synthesize(refs, &p, &out, &manifest) == XLOGO_OK);
    const json m = json::parse(take(manifest));
    CHECK(m["total"] == 40);
    CHECK(xlogo_dataset_size(out) == 40);

    xlogo_dataset *t = nullptr, *v = nullptr, *e = nullptr;
    REQUIRE(xlogo_split(out, -1, 5, 10, 1, &t, &v, &e) == XLOGO_OK);
    CHECK(xlogo_dataset_size(t) == 25);
    CHECK(xlogo_dataset_size(v) == 5);
    CHECK(xlogo_dataset_size(e) == 10);
    xlogo_dataset *t2 = nullptr, *v2 = nullptr, *e2 = nullptr;
    CHECK(xlogo_split(out, -1, 30, 30, 1, &t2, &v2, &e2) == XLOGO_ERR_DATA);

    p.difficulty = "extreme";
    CHECK(xlogo_synthesize(refs, &p, &out, &manifest) == XLOGO_ERR_USAGE);
    xlogo_dataset_free(t);
    xlogo_dataset_free(v);
    xlogo_dataset_free(e);
    xlogo_dataset_free(out);
    xlogo_dataset_free(refs);
}

TEST_CASE("evaluate and breakdown") {
    Loaded f(fixture("basic85.jsonl"));
    std::string preds;
    for (size_t i = 0; i < xlogo_dataset_size(f.ds); i += 2) {
        char* rec = nullptr;
        REQUIRE(xlogo_dataset_record_json(f.ds, i, &rec) == XLOGO_OK);
        const json r = json::parse(take(rec));
        preds += json{{"id", r["id"]}, {"raw_output", r["code"]}}.dump() + "\n";
    }
    xlogo_report* rep = nullptr;
    REQUIRE(xlogo_evaluate_text(f.ds, preds.c_str(), 2, &rep) == XLOGO_OK);
    double fmt = 0, nc = 0, s = 0;
    REQUIRE(xlogo_report_rates(rep, &fmt, &nc, &s) == XLOGO_OK);
    CHECK(s == doctest::Approx(43.0 / 85));
    char *bj = nullptr, *table = nullptr;
    REQUIRE(xlogo_report_breakdown(rep, "task_type", &bj, &table) == XLOGO_OK);
    const json b = json::parse(take(bj));
    CHECK(b["groups"][1]["label"] == "Draw");
    CHECK(b["groups"][1]["n"] == 33);
    CHECK(take(table).find("Total") != std::string::npos);
    CHECK(xlogo_report_breakdown(rep, "mood", &bj, nullptr) == XLOGO_ERR_USAGE);
    char* rj = nullptr;
    REQUIRE(xlogo_report_json(rep, &rj) == XLOGO_OK);
    CHECK(json::parse(take(rj))["n"] == 85);
    xlogo_report_free(rep);

    CHECK(xlogo_evaluate_text(f.ds, "{\"id\": \"ghost\", \"raw_output\": \"\"}\n", 1, &rep) == XLOGO_ERR_DATA);
}

TEST_CASE("resample") {
    const auto path = temp_dir() / "outcomes.jsonl";
    {
        std::ofstream out(path);
        for (int i = 0; i < 10; ++i) out << json{{"index", i}, {"failed", i < 5}}.dump() << "\n";
    }
    xlogo_resample_plan plan{1.0, 0, 3};
    size_t* idx = nullptr;
    size_t n = 0;
    char* manifest = nullptr;
    REQUIRE(xlogo_resample(path.string().c_str(), &plan, &idx, &n, &manifest) == XLOGO_OK);
    CHECK(n == 10);
    for (size_t i = 0; i < n; ++i) CHECK(idx[i] < 10);
    xlogo_free_indices(idx);
    CHECK(json::parse(take(manifest))["failed"] == 5);
    plan.beta = -1;
    CHECK(xlogo_resample(path.string().c_str(), &plan, &idx, &n, &manifest) == XLOGO_ERR_USAGE);
}

TEST_CASE("query requires its key") {
    Loaded f(fixture("figure2.jsonl"));
    unsetenv("MODEL_API_KEY");
    xlogo_query_config c;
    xlogo_query_config_default(&c);
    c.endpoint = "http://127.0.0.1:9/v1";
    c.model = "m";
    char* stats = nullptr;
    CHECK(xlogo_query(f.ds, &c, (temp_dir() / "q.jsonl").string().c_str(), &stats) == XLOGO_ERR_USAGE);
    CHECK(std::string(xlogo_last_error()).find("MODEL_API_KEY") != std::string::npos);
}
