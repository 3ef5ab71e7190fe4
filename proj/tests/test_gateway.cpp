#include "xlogo/gateway.hpp"

#include <doctest.h>
#include <httplib.h>

#include <atomic>
#include <cstdlib>
#include <thread>

using namespace xlogo;
using nlohmann::json;

namespace {

// Minimal chat-completions server. `fail_first` requests answer with
// `fail_status` before it starts echoing `reply`.
class MockServer {
public:
    MockServer(std::string reply, int fail_first = 0, int fail_status = 500)
        : reply_(std::move(reply)), fail_first_(fail_first), fail_status_(fail_status) {
        server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
            const int n = hits++;
            last_auth = req.get_header_value("Authorization");
            last_body = req.body;
            if (n < fail_first_) {
                res.status = fail_status_;
                return;
            }
            const json j = {{"choices", json::array({{{"message", {{"role", "assistant"}, {"content", reply_}}}}})}};
            res.set_content(j.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~MockServer() {
        server_.stop();
        thread_.join();
    }

    std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

    std::atomic<int> hits{0};
    std::string last_auth;
    std::string last_body;

private:
    httplib::Server server_;
    std::string reply_;
    int fail_first_;
    int fail_status_;
    int port_ = 0;
    std::thread thread_;
};

GatewayConfig config_for(const MockServer& s, std::vector<std::string>* log) {
    GatewayConfig c;
    c.endpoint = s.endpoint();
    c.model = "mock-model";
    c.concurrency = 1;
    c.initial_backoff_ms = 1;
    c.timeout_seconds = 5;
    c.api_key_env = "XLOGO_TEST_API_KEY";
    c.log = [log](const std::string& line) {
        if (log) log->push_back(line);
    };
    return c;
}

const std::string kCanned = "```python\ndef Run():\n  move_forward()\n```";

}  // namespace

TEST_CASE("gateway echoes the canned program") {
    setenv("XLOGO_TEST_API_KEY", "secret", 1);
    MockServer server(kCanned);
    const auto r = query_model(config_for(server, nullptr), {{"a", "prompt a"}, {"b", "prompt b"}});
    REQUIRE(r.predictions.size() == 2);
    CHECK(r.predictions[0].task_id == "a");
    CHECK(r.predictions[0].raw_output == kCanned);
    CHECK(r.predictions[1].raw_output == kCanned);
    CHECK(r.stats.requests == 2);
    CHECK(server.last_auth == "Bearer secret");
    const json body = json::parse(server.last_body);
    CHECK(body["model"] == "mock-model");
    CHECK(body["temperature"] == 0.0);
    CHECK(body["messages"][0]["role"] == "user");
}

TEST_CASE("gateway retries transient failures") {
    setenv("XLOGO_TEST_API_KEY", "secret", 1);
    MockServer server(kCanned, 3, 500);
    std::vector<std::string> log;
    const auto r = query_model(config_for(server, &log), {{"a", "prompt"}});
    REQUIRE(r.predictions.size() == 1);
    CHECK(r.predictions[0].raw_output == kCanned);
    CHECK(r.stats.retries == 3);
    CHECK(r.stats.requests == 4);
    CHECK(log.size() == 3);
}

TEST_CASE("gateway gives up after the retry budget") {
    setenv("XLOGO_TEST_API_KEY", "secret", 1);
    MockServer server(kCanned, 100, 503);
    auto cfg = config_for(server, nullptr);
    cfg.max_retries = 2;
    CHECK_THROWS_AS(query_model(cfg, {{"a", "prompt"}}), ExternalError);
    CHECK(server.hits == 3);
}

TEST_CASE("gateway configuration errors") {
    MockServer server(kCanned, 100, 401);
    unsetenv("XLOGO_TEST_API_KEY");
    try {
        query_model(config_for(server, nullptr), {{"a", "prompt"}});
        FAIL("expected a usage error");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()).find("XLOGO_TEST_API_KEY") != std::string::npos);
    }
    setenv("XLOGO_TEST_API_KEY", "wrong", 1);
    CHECK_THROWS_AS(query_model(config_for(server, nullptr), {{"a", "prompt"}}), ExternalError);
    CHECK(server.hits == 1);
    auto cfg = config_for(server, nullptr);
    cfg.endpoint = "ftp://example";
    CHECK_THROWS_AS(query_model(cfg, {{"a", "prompt"}}), UsageError);
}

TEST_CASE("gateway resumes from a partial file") {
    setenv("XLOGO_TEST_API_KEY", "secret", 1);
    MockServer server(kCanned);
    const auto dir = std::filesystem::temp_directory_path() / "xlogo_gateway_tests";
    std::filesystem::create_directories(dir);
    const auto out = dir / "preds.jsonl";
    save_predictions({{"b", "earlier answer"}, {"c", ""}}, out);
    const auto r = query_model(config_for(server, nullptr), {{"a", "pa"}, {"b", "pb"}, {"c", "pc"}}, out);
    CHECK(r.stats.resumed == 1);
    CHECK(server.hits == 2);
    const auto saved = load_predictions(out);
    REQUIRE(saved.size() == 3);
    CHECK(saved[0].task_id == "a");
    CHECK(saved[1].raw_output == "earlier answer");
    CHECK(saved[2].raw_output == kCanned);
}
