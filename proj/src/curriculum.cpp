#include "xlogo/curriculum.hpp"

#include "xlogo/harness.hpp"
#include "xlogo/random.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace xlogo {

using nlohmann::json;

Weights compute_weights(const std::vector<SampleOutcome>& outcomes, double beta) {
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw UsageError("beta must be a finite value >= 0");
    const std::size_t n = outcomes.size();
    std::vector<int> failed(n, -1);
    for (const auto& o : outcomes) {
        if (o.index >= n) throw DataError("outcome index " + std::to_string(o.index) + " out of range for " + std::to_string(n) + " samples");
        if (failed[o.index] != -1) throw DataError("outcome index " + std::to_string(o.index) + " appears twice");
        failed[o.index] = o.failed ? 1 : 0;
    }
    Weights w;
    w.raw.resize(n);
    const double inv = n ? 1.0 / static_cast<double>(n) : 0.0;
    std::size_t n_failed = 0;
    for (std::size_t i = 0; i < n; ++i) {
        w.raw[i] = inv * (1.0 + beta * failed[i]);
        n_failed += static_cast<std::size_t>(failed[i]);
    }
    // Normalising the per-class values directly keeps the failed:passed ratio
    // exactly 1 + beta.
    const double total = static_cast<double>(n - n_failed) + (1.0 + beta) * static_cast<double>(n_failed);
    const double pass_w = 1.0 / total;
    const double fail_w = (1.0 + beta) / total;
    w.normalized.resize(n);
    for (std::size_t i = 0; i < n; ++i) w.normalized[i] = failed[i] ? fail_w : pass_w;
    return w;
}

std::vector<std::size_t> resample(std::size_t dataset_size, const std::vector<double>& weights, const ResamplePlan& plan) {
    if (weights.size() != dataset_size) throw DataError("weights size does not match dataset size");
    if (plan.n_draws < 1) throw UsageError("number of draws must be >= 1");
    if (!(plan.beta >= 0.0)) throw UsageError("beta must be >= 0");
    if (std::any_of(weights.begin(), weights.end(), [](double w) { return !(w >= 0.0) || !std::isfinite(w); })) {
        throw DataError("weights must be finite and non-negative");
    }
    std::vector<double> cumulative(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
    const double sum = cumulative.empty() ? 0.0 : cumulative.back();
    if (std::abs(sum - 1.0) > 1e-9) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "weights sum to " << sum << ", expected 1";
        throw DataError(msg.str());
    }

    Rng rng = derive_rng(plan.seed, 0x726573616d706c65ULL);
    std::vector<std::size_t> out;
    out.reserve(plan.n_draws);
    for (std::size_t d = 0; d < plan.n_draws; ++d) {
        const double u = uniform_unit(rng) * sum;
        auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        std::size_t idx = static_cast<std::size_t>(it - cumulative.begin());
        if (idx >= weights.size()) idx = weights.size() - 1;
        // Zero-weight entries share their cumulative value with a predecessor
        // and are never hit by upper_bound except at the tail.
        while (weights[idx] == 0.0 && idx > 0) --idx;
        out.push_back(idx);
    }
    return out;
}

std::vector<SampleOutcome> parse_outcomes(std::string_view jsonl) {
    std::vector<SampleOutcome> out;
    std::istringstream in{std::string(jsonl)};
    std::string row;
    std::size_t line = 0;
    while (std::getline(in, row)) {
        ++line;
        if (row.find_first_not_of(" \t\r") == std::string::npos) continue;
        const std::string where = "outcomes line " + std::to_string(line);
        json j = json::parse(row, nullptr, false);
        if (j.is_discarded() || !j.is_object()) throw DataError(where + ": malformed JSON");
        auto index = j.find("index");
        auto failed = j.find("failed");
        if (index == j.end() || !index->is_number_unsigned()) throw DataError(where + ": 'index' must be a non-negative integer");
        if (failed == j.end() || !failed->is_boolean()) throw DataError(where + ": 'failed' must be a boolean");
        out.push_back({index->get<std::size_t>(), failed->get<bool>()});
    }
    return out;
}

std::vector<SampleOutcome> load_outcomes(const std::filesystem::path& path) {
    try {
        return parse_outcomes(read_text_file(path));
    } catch (const DataError& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

json resample_manifest(const std::vector<SampleOutcome>& outcomes, const Weights& weights, const ResamplePlan& plan) {
    const auto failed = static_cast<std::size_t>(
        std::count_if(outcomes.begin(), outcomes.end(), [](const SampleOutcome& o) { return o.failed; }));
    json j = {{"beta", plan.beta},
              {"seed", plan.seed},
              {"n_draws", plan.n_draws},
              {"dataset_size", outcomes.size()},
              {"failed", failed},
              {"passed", outcomes.size() - failed},
              {"with_replacement", true}};
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        const char* key = outcomes[i].failed ? "weight_failed" : "weight_passed";
        if (!j.contains(key)) j[key] = weights.normalized[outcomes[i].index];
    }
    return j;
}

}  // namespace xlogo
