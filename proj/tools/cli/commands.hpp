#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cli/config.hpp"
#include "riskfusion/simulation.hpp"
#include "riskfusion/solver.hpp"

namespace riskfusion::cli {

enum ExitCode : int {
    kOk = 0,
    kValidationError = 1,
    kNumericalFailure = 2,
    kVerificationFailure = 3,
};

/// Progress sink; a null stream keeps commands quiet.
struct Log {
    std::ostream* out = nullptr;
    template <class T>
    const Log& operator<<(const T& x) const {
        if (out) *out << x;
        return *this;
    }
};

/// Reading back a CSV this tool wrote, or a grid that does not match the config.
class InputError : public ParameterError {
public:
    using ParameterError::ParameterError;
};

void write_value_csv(const std::filesystem::path& path, const ValueFunction& value);
void write_policy_csv(const std::filesystem::path& path, const Policy& policy);
Policy read_policy_csv(const std::filesystem::path& path, const BeliefGrid& expected_grid);
std::string thresholds_json(const Thresholds& t, std::size_t iterations, double residual);
std::string trace_json(const Trace& trace);
std::string ensemble_csv(const EnsembleSummary& summary);

/// solve: value.csv, policy.csv, thresholds.json.
SolveResult cmd_solve(const RunConfig& config, const Log& log = {});

/// simulate: traces.jsonl, ensemble.csv. Defaults to <output_dir>/policy.csv.
EnsembleSummary cmd_simulate(const RunConfig& config, const std::optional<std::filesystem::path>& policy_file,
                             const Log& log = {});

struct CheckResult {
    std::string name;
    bool passed = false;
    double worst = 0.0;      ///< largest violation measure seen (signed where meaningful)
    double tolerance = 0.0;
    std::optional<double> worst_belief;
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::string detail;
};

struct VerifyReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

/// Runs the invariant battery on the configured instance.
VerifyReport run_verification(const RunConfig& config, const Log& log = {});
std::string verify_json(const VerifyReport& report);

/// verify: verify.json; returns the report so the caller can map exit status.
VerifyReport cmd_verify(const RunConfig& config, const Log& log = {});

struct SweepRow {
    double alpha = 0.0;
    std::optional<Thresholds> thresholds;
    std::string status; ///< "ok" or "error: <reason>"
};

/// sweep-alpha: sweep.csv; one row per alpha, failed solves keep an error status.
std::vector<SweepRow> cmd_sweep_alpha(const RunConfig& config, const std::vector<double>& alphas,
                                      const Log& log = {});
std::string sweep_csv(const std::vector<SweepRow>& rows);

/// Maps exceptions from the commands to exit codes and prints them to `err`.
int exit_code_for_current_exception(std::ostream& err);

} // namespace riskfusion::cli
