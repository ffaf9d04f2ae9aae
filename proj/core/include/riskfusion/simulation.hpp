#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "riskfusion/filter.hpp"
#include "riskfusion/sensor.hpp"
#include "riskfusion/solver.hpp"

namespace riskfusion {

/// Price the policy posts at an arbitrary belief: the choice is read at the
/// nearest grid point, the numeric price is that choice's menu price at the
/// belief itself. Choices whose price is infeasible at the exact belief fall
/// back LowPrice -> HighPrice -> CutOffPrice.
struct PolicyPrice {
    PriceChoice choice;
    double menu_price;   ///< unclamped; the price process checked for the super-martingale property
    double posted_price; ///< clamped to [0, 1]; what sensors see
};

PolicyPrice policy_price(const Policy& policy, Belief belief, const FusionModel& model);

struct TraceStep {
    int k = 0;
    PriceChoice choice = PriceChoice::CutOffPrice;
    double price = 0.0;      ///< posted
    double menu_price = 0.0;
    Level observation = Level::Low;
    Action action = Action::DontUtilize;
    PriceRegime regime = PriceRegime::CutOff;
    Belief posterior{0.0};
};

struct Trace {
    std::uint64_t seed = 0;
    Level true_state = Level::Low;
    Belief initial{0.5};
    std::vector<TraceStep> steps;
    std::optional<int> cascade_onset; ///< first k whose regime is Herding or CutOff
};

/// One closed-loop run: x is drawn once from `initial`, then each sensor sees
/// the policy price, draws y from row x of B, acts, and the public belief is filtered.
Trace simulate_trace(const Policy& policy, const FusionModel& model, Belief initial, int horizon,
                     std::uint64_t seed);

/// Trace i uses RandomStream::stream_seed(seed, i).
std::vector<Trace> simulate_ensemble(const Policy& policy, const FusionModel& model, Belief initial,
                                     int horizon, std::size_t n_traces, std::uint64_t seed);

/// Re-filters a trace's (price, action) sequence from its initial belief.
std::vector<Belief> replay_posteriors(const Trace& trace, const FusionModel& model);

/// E[u_{k+1} | F_k] for the policy's menu prices at `belief`.
double expected_next_price(Belief belief, const Policy& policy, const FusionModel& model);

struct SupermartingaleReport {
    std::size_t checked = 0;
    std::size_t violations = 0;
    double max_excess = -1.0;          ///< max of E[u'] - u - tolerance over checked beliefs
    std::optional<double> worst_belief;
    double max_increase = 0.0;         ///< max of E[u'] - u (before tolerance)
};

SupermartingaleReport supermartingale_check(const Policy& policy, const FusionModel& model);

struct MartingaleReport {
    std::size_t checked = 0;
    double max_deviation = 0.0;
    std::optional<double> worst_belief;
};

/// max |sum_a sigma(pi,a) T(pi,a) - pi| over grid beliefs whose social-learning
/// interval is non-empty, evaluated with the social-learning likelihoods.
MartingaleReport belief_martingale_check(const BeliefGrid& grid, const ObservationModel& model,
                                         RiskAversion alpha);

struct EnsembleSummary {
    std::size_t n_traces = 0;
    std::size_t horizon = 0;
    std::vector<double> mean_price;       ///< posted
    std::vector<double> mean_menu_price;
    std::vector<double> mean_p_high;      ///< posterior after step k
    std::vector<double> utilize_frequency;
    std::vector<std::size_t> cascade_onsets; ///< traces whose cascade starts at step k
    std::size_t never_cascaded = 0;
    /// Paired change of the menu price from step k to k+1 and its standard error;
    /// one entry fewer than the per-step series.
    std::vector<double> menu_price_drift;
    std::vector<double> menu_price_drift_se;
};

/// Throws ParameterError for an empty input or traces of unequal length.
EnsembleSummary ensemble_stats(std::span<const Trace> traces);

} // namespace riskfusion
