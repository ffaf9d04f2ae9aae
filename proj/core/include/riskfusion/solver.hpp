#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "riskfusion/filter.hpp"
#include "riskfusion/sensor.hpp"

namespace riskfusion {

enum class RewardCase { SelfInterested, Altruistic };

std::string_view to_string(RewardCase c) noexcept;

struct ControllerParams {
    double beta = 0.1;    ///< service cost, (0, 1)
    double rho = 0.7;     ///< discount, [0, 1)
    RewardCase reward_case = RewardCase::SelfInterested;
    double epsilon = 1e-3; ///< offset above u_high used for the cut-off price

    void validate() const;
};

/// Everything the controller's problem depends on besides the belief.
struct FusionModel {
    ObservationModel observations;
    RiskAversion alpha;
    ControllerParams controller;
};

/// Uniform grid on p_high in [0, 1], endpoints included.
class BeliefGrid {
public:
    explicit BeliefGrid(std::size_t n_points);

    std::size_t size() const noexcept { return points_.size(); }
    double step() const noexcept { return 1.0 / static_cast<double>(points_.size() - 1); }
    double operator[](std::size_t i) const noexcept { return points_[i]; }
    std::span<const double> points() const noexcept { return points_; }

    std::size_t nearest_index(double p_high) const noexcept;

    /// Linear interpolation of grid-indexed values at p_high.
    double interpolate(std::span<const double> values, double p_high) const noexcept;

    friend bool operator==(const BeliefGrid& a, const BeliefGrid& b) { return a.points_ == b.points_; }

private:
    std::vector<double> points_;
};

struct ValueFunction {
    BeliefGrid grid;
    std::vector<double> values;

    double at(double p_high) const noexcept { return grid.interpolate(values, p_high); }
    double at(Belief b) const noexcept { return at(b.p_high()); }
};

enum class PriceChoice { CutOffPrice, HighPrice, LowPrice };

std::string_view to_string(PriceChoice c) noexcept;
std::optional<PriceChoice> parse_price_choice(std::string_view s) noexcept;

/// Menu price of a choice before clamping: u_high + eps, u_high or u_low.
double menu_price(PriceChoice choice, const PriceThresholds& thresholds, double epsilon) noexcept;

/// Menu price clamped to [0, 1].
double posted_price(PriceChoice choice, const PriceThresholds& thresholds, double epsilon) noexcept;

struct Policy {
    BeliefGrid grid;
    std::vector<PriceChoice> choices;
    std::vector<double> prices; ///< posted prices at the grid points
};

/// Region boundaries read off a solved policy. Empty optionals mean the region
/// does not occur on the grid.
struct Thresholds {
    std::optional<double> pi_star;        ///< first belief leaving the cut-off region
    std::optional<double> pi_double_star; ///< first herding (LowPrice) belief, self-interested
    std::optional<double> pi_hat_star;    ///< first HighPrice belief, altruistic
    std::optional<double> delta_star;     ///< first belief where the u_high price is feasible
    std::optional<double> gamma_star;     ///< first belief where the HighPrice branch value is >= 0
};

/// Expected reward for posting `price` to the next sensor at `prior`.
double instantaneous_reward(Belief prior, const FusionModel& model, double price);

/// Sum over actions of sigma(pi, a) V(T(pi, a)) with the social-learning likelihoods.
double expected_continuation(Belief prior, const ValueFunction& value, const ObservationModel& model);

/// Q(pi, u) in the piecewise form: herding uses V at the frozen belief, social
/// learning the filtered continuation, cut-off returns 0. When the social-learning
/// interval is empty (u_low == u_high) the price u_high touches both branches and
/// the larger value is returned.
double q_value(Belief prior, const ValueFunction& value, const FusionModel& model, double price);

/// Branch values of the finite price menu at one belief. An entry is empty when
/// its price is infeasible in [0, 1] or, for LowPrice, absent from the reward case.
struct MenuValues {
    PriceThresholds thresholds;
    std::optional<double> cut_off;
    std::optional<double> high;
    std::optional<double> low; ///< herding fixed point (u_low - beta) / (1 - rho)

    /// Best entry, ties resolved LowPrice over HighPrice over CutOffPrice.
    std::pair<PriceChoice, double> best() const;
};

MenuValues menu_values(Belief prior, const ValueFunction& value, const FusionModel& model);

/// Value of the HighPrice branch regardless of feasibility.
double high_price_branch(Belief prior, const ValueFunction& value, const FusionModel& model);

struct SolverOptions {
    double tolerance = 1e-10;
    std::size_t max_iters = 100000;
};

struct SolveResult {
    ValueFunction value;
    Policy policy;
    std::size_t iterations = 0;
    double residual = 0.0;
};

/// Jacobi value iteration over the finite menu. Throws ParameterError for a
/// non-TP2 model and ConvergenceError when max_iters is exhausted.
SolveResult value_iteration(const BeliefGrid& grid, const FusionModel& model,
                            const SolverOptions& options = {});

Thresholds extract_thresholds(const SolveResult& solved, const FusionModel& model);

struct DenseOptimum {
    double best_price;
    double best_q;
};

/// Brute-force maximization of q_value over n_prices uniform prices in [0, 1].
DenseOptimum dense_price_oracle(Belief prior, const ValueFunction& value, const FusionModel& model,
                                std::size_t n_prices);

} // namespace riskfusion
