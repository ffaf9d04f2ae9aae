#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "riskfusion/errors.hpp"
#include "riskfusion/sensor.hpp"
#include "riskfusion/solver.hpp"

namespace riskfusion::cli {

/// Config rejected at load; `field()` names the offending key.
class ConfigError : public ParameterError {
public:
    ConfigError(std::string field, const std::string& message)
        : ParameterError("config field '" + field + "': " + message), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct RunConfig {
    Matrix2 observation_matrix{{{0.8, 0.2}, {0.2, 0.8}}};
    double alpha = 0.9;
    double beta = 0.1;
    double rho = 0.7;
    RewardCase reward_case = RewardCase::SelfInterested;
    double epsilon = 1e-3;
    std::size_t grid_points = 1001;
    double tolerance = 1e-10;
    std::size_t max_iters = 100000;
    int horizon = 200;
    std::size_t n_traces = 1000;
    std::uint64_t seed = 20240601;
    double initial_belief = 0.5;
    std::vector<double> alphas{0.9, 0.3};
    std::size_t dense_prices = 10000;
    std::size_t verify_samples = 10000;
    std::filesystem::path output_dir = "out";

    FusionModel model() const;
    FusionModel model_with_alpha(double a) const;
    BeliefGrid grid() const { return BeliefGrid(grid_points); }
    SolverOptions solver_options() const { return {tolerance, max_iters}; }

    /// Re-checks every field; throws ConfigError.
    void validate() const;

    friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Flat `key = value` text; `;` or `#` start comment lines; lists are comma separated.
/// Keys absent from the text keep their defaults. Unknown keys are rejected.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path& path);

/// Canonical text for a config; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

std::string_view reward_case_key(RewardCase c) noexcept;

} // namespace riskfusion::cli
