#pragma once

// Client for OpenAI-compatible chat-completion endpoints.

#include "xlogo/harness.hpp"

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace xlogo {

struct GatewayConfig {
    // Base URL such as "http://localhost:8000/v1"; "/chat/completions" is appended
    // unless the URL already ends with it.
    std::string endpoint;
    std::string model;
    double temperature = 0.0;
    int max_tokens = 1024;
    unsigned concurrency = 4;
    int max_retries = 5;
    int initial_backoff_ms = 500;
    int timeout_seconds = 120;
    std::string api_key_env = "MODEL_API_KEY";
    // Receives one line per retry or failed request. Defaults to stderr.
    std::function<void(const std::string&)> log;
};

struct QueryStats {
    std::size_t requests = 0;
    std::size_t retries = 0;
    std::size_t failures = 0;
    std::size_t resumed = 0;
};

struct QueryResult {
    std::vector<Prediction> predictions;  // prompt order
    QueryStats stats;
};

// Sends one single-turn request per prompt. When `out` is given, predictions
// are appended to it as they complete, ids already present are skipped, and
// the file is rewritten in prompt order at the end. Throws UsageError when the
// API key variable is unset and ExternalError on authentication failures or
// when every request fails.
QueryResult query_model(const GatewayConfig& config, const std::vector<std::pair<std::string, std::string>>& prompts,
                        const std::optional<std::filesystem::path>& out = std::nullopt);

}  // namespace xlogo
