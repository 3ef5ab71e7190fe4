#pragma once

// Emulator-driven resampling of training data: tasks whose predicted code
// failed get weight 1 + beta, passing tasks weight 1.

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

namespace xlogo {

struct SampleOutcome {
    std::size_t index = 0;
    bool failed = false;
};

struct ResamplePlan {
    double beta = 1.0;
    std::size_t n_draws = 1;
    std::uint64_t seed = 0;
};

struct Weights {
    std::vector<double> raw;         // (1 + beta * failed) / |D|
    std::vector<double> normalized;  // raw / sum(raw)
};

// Outcomes must cover 0..n-1 exactly once (any order). Throws UsageError for
// beta < 0 and DataError for a bad cover.
Weights compute_weights(const std::vector<SampleOutcome>& outcomes, double beta);

// n_draws independent categorical draws with replacement. Throws DataError when
// the weights do not sum to 1 within 1e-9 or their count differs from
// dataset_size.
std::vector<std::size_t> resample(std::size_t dataset_size, const std::vector<double>& weights, const ResamplePlan& plan);

std::vector<SampleOutcome> parse_outcomes(std::string_view jsonl);
std::vector<SampleOutcome> load_outcomes(const std::filesystem::path& path);

nlohmann::json resample_manifest(const std::vector<SampleOutcome>& outcomes, const Weights& weights,
                                 const ResamplePlan& plan);

}  // namespace xlogo
