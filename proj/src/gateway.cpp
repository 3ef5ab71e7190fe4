#include <httplib.h>

#include "xlogo/gateway.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <thread>

namespace xlogo {

using nlohmann::json;

namespace {

struct Endpoint {
    std::string origin;  // scheme://host[:port]
    std::string path;
};

Endpoint split_endpoint(const std::string& url) {
    const auto scheme = url.find("://");
    if (scheme == std::string::npos) throw UsageError("endpoint must start with http:// or https://: '" + url + "'");
    const std::string proto = url.substr(0, scheme);
    if (proto != "http" && proto != "https") throw UsageError("unsupported endpoint scheme '" + proto + "'");
    const auto slash = url.find('/', scheme + 3);
    Endpoint e;
    e.origin = url.substr(0, slash);
    e.path = slash == std::string::npos ? "" : url.substr(slash);
    while (!e.path.empty() && e.path.back() == '/') e.path.pop_back();
    if (!e.path.ends_with("/chat/completions")) e.path += "/chat/completions";
    return e;
}

enum class Attempt { Ok, Transient, Fatal, Auth };

struct Response {
    Attempt kind = Attempt::Fatal;
    std::string text;
    std::string error;
};

Response send_once(httplib::Client& client, const std::string& path, const std::string& body) {
    auto res = client.Post(path, body, "application/json");
    if (!res) return {Attempt::Transient, {}, "connection error: " + httplib::to_string(res.error())};
    if (res->status == 401 || res->status == 403) return {Attempt::Auth, {}, "HTTP " + std::to_string(res->status)};
    if (res->status == 429 || res->status >= 500) return {Attempt::Transient, {}, "HTTP " + std::to_string(res->status)};
    if (res->status != 200) return {Attempt::Fatal, {}, "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200)};
    json j = json::parse(res->body, nullptr, false);
    if (j.is_discarded()) return {Attempt::Fatal, {}, "response is not JSON"};
    try {
        const json& content = j.at("choices").at(0).at("message").at("content");
        return {Attempt::Ok, content.is_string() ? content.get<std::string>() : std::string(), {}};
    } catch (const json::exception&) {
        return {Attempt::Fatal, {}, "response lacks choices[0].message.content"};
    }
}

}  // namespace

QueryResult query_model(const GatewayConfig& config, const std::vector<std::pair<std::string, std::string>>& prompts,
                        const std::optional<std::filesystem::path>& out) {
    const char* key = std::getenv(config.api_key_env.c_str());
    if (!key || !*key) throw UsageError("environment variable " + config.api_key_env + " is not set");
    if (config.model.empty()) throw UsageError("model name is required");
    if (config.concurrency == 0) throw UsageError("concurrency must be >= 1");
    const Endpoint endpoint = split_endpoint(config.endpoint);
    const std::string api_key = key;
    auto log = config.log ? config.log : [](const std::string& line) { std::cerr << line << "\n"; };

    QueryResult result;
    result.predictions.resize(prompts.size());
    for (std::size_t i = 0; i < prompts.size(); ++i) result.predictions[i].task_id = prompts[i].first;

    // Resume: reuse non-empty predictions from an earlier partial run.
    std::vector<bool> done(prompts.size(), false);
    if (out && std::filesystem::exists(*out)) {
        std::map<std::string, std::string> previous;
        for (auto& p : load_predictions(*out)) previous[p.task_id] = std::move(p.raw_output);
        for (std::size_t i = 0; i < prompts.size(); ++i) {
            if (auto it = previous.find(prompts[i].first); it != previous.end() && !it->second.empty()) {
                result.predictions[i].raw_output = it->second;
                done[i] = true;
                ++result.stats.resumed;
            }
        }
    }

    std::mutex mu;
    std::ofstream append;
    if (out) {
        if (out->has_parent_path()) std::filesystem::create_directories(out->parent_path());
        append.open(*out, std::ios::app | std::ios::binary);
        if (!append) throw DataError("cannot write '" + out->string() + "'");
    }

    std::atomic<std::size_t> next{0};
    std::atomic<bool> auth_failed{false};
    std::atomic<std::size_t> requests{0}, retries{0}, failures{0}, successes{0};
    std::string auth_error;

    auto worker = [&] {
        httplib::Client client(endpoint.origin);
        client.set_bearer_token_auth(api_key);
        client.set_connection_timeout(config.timeout_seconds, 0);
        client.set_read_timeout(config.timeout_seconds, 0);
        client.set_write_timeout(config.timeout_seconds, 0);
        for (std::size_t i = next++; i < prompts.size() && !auth_failed; i = next++) {
            if (done[i]) continue;
            const json body = {{"model", config.model},
                               {"messages", json::array({{{"role", "user"}, {"content", prompts[i].second}}})},
                               {"temperature", config.temperature},
                               {"max_tokens", config.max_tokens}};
            const std::string payload = body.dump();
            Response r;
            for (int attempt = 0;; ++attempt) {
                ++requests;
                r = send_once(client, endpoint.path, payload);
                if (r.kind != Attempt::Transient || attempt >= config.max_retries) break;
                ++retries;
                const auto delay = std::min<long long>(30'000, static_cast<long long>(config.initial_backoff_ms) << attempt);
                {
                    std::lock_guard lock(mu);
                    log("retry " + std::to_string(attempt + 1) + " for '" + prompts[i].first + "' after " + r.error);
                }
                std::this_thread::sleep_for(std::chrono::milliseconds(delay));
            }
            std::lock_guard lock(mu);
            if (r.kind == Attempt::Auth) {
                auth_failed = true;
                auth_error = r.error;
                return;
            }
            if (r.kind == Attempt::Ok) {
                ++successes;
                result.predictions[i].raw_output = r.text;
            } else {
                ++failures;
                log("request for '" + prompts[i].first + "' failed: " + r.error);
            }
            if (append && r.kind == Attempt::Ok) {
                append << json{{"id", prompts[i].first}, {"raw_output", result.predictions[i].raw_output}}.dump() << "\n";
                append.flush();
            }
        }
    };

    const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(config.concurrency, std::max<std::size_t>(1, prompts.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    if (append.is_open()) append.close();

    result.stats.requests = requests;
    result.stats.retries = retries;
    result.stats.failures = failures;
    if (auth_failed) throw ExternalError("authentication rejected by " + config.endpoint + " (" + auth_error + ")");
    if (failures > 0 && successes == 0 && result.stats.resumed == 0) {
        throw ExternalError("every request to " + config.endpoint + " failed");
    }
    if (out) save_predictions(result.predictions, *out);
    return result;
}

}  // namespace xlogo
