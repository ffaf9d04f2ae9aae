#include "riskfusion/solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riskfusion/errors.hpp"

namespace riskfusion {

std::string_view to_string(RewardCase c) noexcept {
    return c == RewardCase::Altruistic ? "Altruistic" : "SelfInterested";
}

void ControllerParams::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
    if (!(rho >= 0.0 && rho < 1.0)) throw ParameterError("rho must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw ParameterError("epsilon must be strictly positive");
}

BeliefGrid::BeliefGrid(std::size_t n_points) {
    if (n_points < 2) throw ParameterError("belief grid needs at least 2 points");
    points_.resize(n_points);
    const double denom = static_cast<double>(n_points - 1);
    for (std::size_t i = 0; i < n_points; ++i) points_[i] = static_cast<double>(i) / denom;
}

std::size_t BeliefGrid::nearest_index(double p_high) const noexcept {
    const double x = std::round(std::clamp(p_high, 0.0, 1.0) * static_cast<double>(size() - 1));
    return std::min(static_cast<std::size_t>(x), size() - 1);
}

double BeliefGrid::interpolate(std::span<const double> values, double p_high) const noexcept {
    const std::size_t n = size();
    if (p_high <= 0.0) return values.front();
    if (p_high >= 1.0) return values.back();
    const double x = p_high * static_cast<double>(n - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(x), n - 2);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * values[i] + w * values[i + 1];
}

std::string_view to_string(PriceChoice c) noexcept {
    switch (c) {
    case PriceChoice::CutOffPrice: return "CutOffPrice";
    case PriceChoice::HighPrice: return "HighPrice";
    case PriceChoice::LowPrice: return "LowPrice";
    }
    return "?";
}

std::optional<PriceChoice> parse_price_choice(std::string_view s) noexcept {
    for (auto c : {PriceChoice::CutOffPrice, PriceChoice::HighPrice, PriceChoice::LowPrice})
        if (s == to_string(c)) return c;
    return std::nullopt;
}

double menu_price(PriceChoice choice, const PriceThresholds& thresholds, double epsilon) noexcept {
    switch (choice) {
    case PriceChoice::CutOffPrice: return thresholds.u_high + epsilon;
    case PriceChoice::HighPrice: return thresholds.u_high;
    case PriceChoice::LowPrice: return thresholds.u_low;
    }
    return thresholds.u_high + epsilon;
}

double posted_price(PriceChoice choice, const PriceThresholds& thresholds, double epsilon) noexcept {
    return std::clamp(menu_price(choice, thresholds, epsilon), 0.0, 1.0);
}

namespace {

double utilize_probability(Belief prior, const ObservationModel& model) noexcept {
    return action_probability(prior, PriceRegime::SocialLearning, model, Action::Utilize);
}

double social_learning_value(Belief prior, const ValueFunction& value, const FusionModel& model,
                             double price) {
    const auto& c = model.controller;
    const double ev = expected_continuation(prior, value, model.observations);
    if (c.reward_case == RewardCase::SelfInterested)
        return (price - c.beta) * utilize_probability(prior, model.observations) + c.rho * ev;
    return (price - c.beta) + c.rho * ev;
}

} // namespace

double instantaneous_reward(Belief prior, const FusionModel& model, double price) {
    const auto& c = model.controller;
    const auto regime = regime_of_price(prior, model.observations, model.alpha, price);
    if (c.reward_case == RewardCase::SelfInterested) {
        switch (regime) {
        case PriceRegime::Herding: return price - c.beta;
        case PriceRegime::SocialLearning:
            return (price - c.beta) * utilize_probability(prior, model.observations);
        case PriceRegime::CutOff: return 0.0;
        }
    }
    return regime == PriceRegime::SocialLearning ? price - c.beta : 0.0;
}

double expected_continuation(Belief prior, const ValueFunction& value, const ObservationModel& model) {
    double ev = 0.0;
    for (Action a : kActions) {
        const double sigma = action_probability(prior, PriceRegime::SocialLearning, model, a);
        if (sigma > 0.0)
            ev += sigma * value.at(belief_transition(prior, PriceRegime::SocialLearning, model, a));
    }
    return ev;
}

double q_value(Belief prior, const ValueFunction& value, const FusionModel& model, double price) {
    const auto& c = model.controller;
    const auto th = price_thresholds(prior, model.observations, model.alpha);
    if (price > th.u_high) return 0.0;

    auto herding = [&] {
        return c.reward_case == RewardCase::SelfInterested ? (price - c.beta) + c.rho * value.at(prior)
                                                           : 0.0;
    };
    if (th.u_low == th.u_high && price == th.u_high)
        return std::max(herding(), social_learning_value(prior, value, model, price));
    if (regime_of_price(th, price) == PriceRegime::Herding) return herding();
    return social_learning_value(prior, value, model, price);
}

double high_price_branch(Belief prior, const ValueFunction& value, const FusionModel& model) {
    const auto th = price_thresholds(prior, model.observations, model.alpha);
    return social_learning_value(prior, value, model, th.u_high);
}

std::pair<PriceChoice, double> MenuValues::best() const {
    std::optional<std::pair<PriceChoice, double>> best;
    auto consider = [&](PriceChoice choice, const std::optional<double>& q) {
        if (q && (!best || *q >= best->second)) best = {choice, *q};
    };
    consider(PriceChoice::CutOffPrice, cut_off);
    consider(PriceChoice::HighPrice, high);
    consider(PriceChoice::LowPrice, low);
    if (!best) throw InvariantViolation("empty price menu");
    return *best;
}

MenuValues menu_values(Belief prior, const ValueFunction& value, const FusionModel& model) {
    const auto& c = model.controller;
    MenuValues menu{price_thresholds(prior, model.observations, model.alpha), {}, {}, {}};
    const auto& th = menu.thresholds;

    if (th.u_high < 1.0) menu.cut_off = 0.0;
    if (th.u_high >= 0.0) menu.high = social_learning_value(prior, value, model, th.u_high);
    if (c.reward_case == RewardCase::SelfInterested && th.u_low >= 0.0)
        menu.low = (th.u_low - c.beta) / (1.0 - c.rho);
    return menu;
}

SolveResult value_iteration(const BeliefGrid& grid, const FusionModel& model,
                            const SolverOptions& options) {
    model.controller.validate();
    if (!(options.tolerance > 0.0)) throw ParameterError("tolerance must be positive");
    if (!check_tp2(model.observations))
        throw ParameterError("observation matrix violates TP2 (negative determinant)");

    const std::size_t n = grid.size();
    ValueFunction current{grid, std::vector<double>(n, 0.0)};
    std::vector<double> next(n);
    std::vector<PriceChoice> choices(n);
    std::vector<double> prices(n);

    double residual = 0.0;
    for (std::size_t iter = 1; iter <= options.max_iters; ++iter) {
        residual = 0.0;
        // Jacobi sweep: every point reads the previous snapshot only.
        for (std::size_t i = 0; i < n; ++i) {
            const Belief b(grid[i]);
            const auto menu = menu_values(b, current, model);
            const auto [choice, q] = menu.best();
            next[i] = q;
            choices[i] = choice;
            prices[i] = posted_price(choice, menu.thresholds, model.controller.epsilon);
            residual = std::max(residual, std::abs(q - current.values[i]));
        }
        current.values.swap(next);
        if (residual <= options.tolerance) {
            return SolveResult{std::move(current), Policy{grid, std::move(choices), std::move(prices)},
                               iter, residual};
        }
    }
    throw ConvergenceError("value iteration did not converge within " +
                               std::to_string(options.max_iters) + " iterations (residual " +
                               std::to_string(residual) + ")",
                           residual);
}

Thresholds extract_thresholds(const SolveResult& solved, const FusionModel& model) {
    const auto& grid = solved.policy.grid;
    const auto& choices = solved.policy.choices;
    Thresholds t;

    auto first_where = [&](auto&& pred) -> std::optional<double> {
        for (std::size_t i = 0; i < grid.size(); ++i) {
            try {
                if (pred(i)) return grid[i];
            } catch (const DegenerateUpdateError&) {
                // Belief where an observation is impossible; the condition is undefined there.
            }
        }
        return std::nullopt;
    };

    t.pi_star = first_where([&](std::size_t i) { return choices[i] != PriceChoice::CutOffPrice; });
    if (model.controller.reward_case == RewardCase::SelfInterested)
        t.pi_double_star = first_where([&](std::size_t i) { return choices[i] == PriceChoice::LowPrice; });
    else
        t.pi_hat_star = first_where([&](std::size_t i) { return choices[i] == PriceChoice::HighPrice; });

    // eta^{y=High}(High) >= 1 - alpha  <=>  u_high >= 0.
    t.delta_star = first_where([&](std::size_t i) {
        const auto eta = private_belief_update(Belief(grid[i]), model.observations, Level::High);
        return eta.p_high() >= 1.0 - model.alpha.alpha();
    });
    t.gamma_star = first_where([&](std::size_t i) {
        return high_price_branch(Belief(grid[i]), solved.value, model) >= 0.0;
    });
    return t;
}

DenseOptimum dense_price_oracle(Belief prior, const ValueFunction& value, const FusionModel& model,
                                std::size_t n_prices) {
    if (n_prices < 100) throw ParameterError("dense price oracle needs at least 100 prices");
    DenseOptimum best{0.0, q_value(prior, value, model, 0.0)};
    const double denom = static_cast<double>(n_prices - 1);
    for (std::size_t j = 1; j < n_prices; ++j) {
        const double u = static_cast<double>(j) / denom;
        const double q = q_value(prior, value, model, u);
        if (q > best.best_q) best = {u, q};
    }
    return best;
}

} // namespace riskfusion
