#include "riskfusion/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "riskfusion/errors.hpp"
#include "riskfusion/rng.hpp"

namespace riskfusion {

PolicyPrice policy_price(const Policy& policy, Belief belief, const FusionModel& model) {
    if (policy.choices.size() != policy.grid.size())
        throw ParameterError("policy is not defined on every grid point");

    const auto th = price_thresholds(belief, model.observations, model.alpha);
    PriceChoice choice = policy.choices[policy.grid.nearest_index(belief.p_high())];
    if (choice == PriceChoice::LowPrice && th.u_low < 0.0) choice = PriceChoice::HighPrice;
    if (choice == PriceChoice::HighPrice && th.u_high < 0.0) choice = PriceChoice::CutOffPrice;

    const double eps = model.controller.epsilon;
    return {choice, menu_price(choice, th, eps), posted_price(choice, th, eps)};
}

Trace simulate_trace(const Policy& policy, const FusionModel& model, Belief initial, int horizon,
                     std::uint64_t seed) {
    if (horizon < 1) throw ParameterError("horizon must be at least 1");

    RandomStream rng(seed);
    Trace trace;
    trace.seed = seed;
    trace.initial = initial;
    trace.true_state = rng.bernoulli(initial.p_high()) ? Level::High : Level::Low;
    trace.steps.reserve(static_cast<std::size_t>(horizon));

    const auto& obs = model.observations;
    Belief belief = initial;
    for (int k = 1; k <= horizon; ++k) {
        const auto price = policy_price(policy, belief, model);
        const Level y =
            rng.bernoulli(obs.likelihood(trace.true_state, Level::High)) ? Level::High : Level::Low;
        const Action a = sensor_action(belief, obs, y, model.alpha, price.posted_price);
        const PriceRegime regime = regime_of_price(belief, obs, model.alpha, price.posted_price);

        Belief posterior = belief;
        try {
            posterior = belief_transition(belief, regime, obs, a);
        } catch (const ZeroProbabilityActionError& e) {
            throw InvariantViolation("step " + std::to_string(k) + ": sensor took an action the " +
                                     "filter assigns zero probability (" + e.what() + ")");
        }

        if (!trace.cascade_onset && regime != PriceRegime::SocialLearning) trace.cascade_onset = k;
        trace.steps.push_back({k, price.choice, price.posted_price, price.menu_price, y, a, regime,
                               posterior});
        belief = posterior;
    }
    return trace;
}

std::vector<Trace> simulate_ensemble(const Policy& policy, const FusionModel& model, Belief initial,
                                     int horizon, std::size_t n_traces, std::uint64_t seed) {
    std::vector<Trace> traces;
    traces.reserve(n_traces);
    for (std::size_t i = 0; i < n_traces; ++i)
        traces.push_back(
            simulate_trace(policy, model, initial, horizon, RandomStream::stream_seed(seed, i)));
    return traces;
}

std::vector<Belief> replay_posteriors(const Trace& trace, const FusionModel& model) {
    std::vector<Belief> out;
    out.reserve(trace.steps.size());
    Belief belief = trace.initial;
    for (const auto& step : trace.steps) {
        const auto regime = regime_of_price(belief, model.observations, model.alpha, step.price);
        belief = belief_transition(belief, regime, model.observations, step.action);
        out.push_back(belief);
    }
    return out;
}

double expected_next_price(Belief belief, const Policy& policy, const FusionModel& model) {
    const auto now = policy_price(policy, belief, model);
    const auto regime = regime_of_price(belief, model.observations, model.alpha, now.posted_price);
    if (regime != PriceRegime::SocialLearning) return now.menu_price;

    double expected = 0.0;
    for (Action a : kActions) {
        const double sigma = action_probability(belief, regime, model.observations, a);
        if (sigma > 0.0) {
            const Belief next = belief_transition(belief, regime, model.observations, a);
            expected += sigma * policy_price(policy, next, model).menu_price;
        }
    }
    return expected;
}

SupermartingaleReport supermartingale_check(const Policy& policy, const FusionModel& model) {
    const auto& grid = policy.grid;
    const std::size_t n = grid.size();
    constexpr double kRounding = 1e-12;

    // Largest threshold change across the grid cells touching index j: the
    // price error of snapping a belief to grid point j.
    std::vector<std::optional<PriceThresholds>> th(n);
    for (std::size_t i = 0; i < n; ++i) {
        try {
            th[i] = price_thresholds(Belief(grid[i]), model.observations, model.alpha);
        } catch (const DegenerateUpdateError&) {
        }
    }
    auto cell_change = [&](std::size_t i, std::size_t j) {
        if (!th[i] || !th[j]) return 0.0;
        return std::max(std::abs(th[i]->u_high - th[j]->u_high), std::abs(th[i]->u_low - th[j]->u_low));
    };
    auto snap_slack = [&](std::size_t j) {
        double s = 0.0;
        if (j > 0) s = std::max(s, cell_change(j - 1, j));
        if (j + 1 < n) s = std::max(s, cell_change(j, j + 1));
        return s;
    };

    SupermartingaleReport report;
    for (std::size_t i = 0; i < n; ++i) {
        if (policy.choices[i] == PriceChoice::CutOffPrice) continue;
        const Belief b(grid[i]);
        const auto now = policy_price(policy, b, model);
        const auto regime = regime_of_price(b, model.observations, model.alpha, now.posted_price);

        double tolerance = kRounding;
        if (regime == PriceRegime::SocialLearning) {
            double slack = 0.0;
            for (Action a : kActions) {
                if (action_probability(b, regime, model.observations, a) > 0.0) {
                    const Belief next = belief_transition(b, regime, model.observations, a);
                    slack = std::max(slack, snap_slack(grid.nearest_index(next.p_high())));
                }
            }
            tolerance += model.controller.epsilon + slack;
        }

        const double increase = expected_next_price(b, policy, model) - now.menu_price;
        const double excess = increase - tolerance;
        ++report.checked;
        report.max_increase = std::max(report.max_increase, increase);
        if (excess > 0.0) ++report.violations;
        if (!report.worst_belief || excess > report.max_excess) {
            report.max_excess = excess;
            report.worst_belief = grid[i];
        }
    }
    return report;
}

MartingaleReport belief_martingale_check(const BeliefGrid& grid, const ObservationModel& model,
                                         RiskAversion alpha) {
    MartingaleReport report;
    constexpr auto regime = PriceRegime::SocialLearning;
    for (double p : grid.points()) {
        const Belief b(p);
        PriceThresholds th{};
        try {
            th = price_thresholds(b, model, alpha);
        } catch (const DegenerateUpdateError&) {
            continue;
        }
        if (!(th.u_low < th.u_high)) continue;

        double mean = 0.0;
        for (Action a : kActions) {
            const double sigma = action_probability(b, regime, model, a);
            if (sigma > 0.0) mean += sigma * belief_transition(b, regime, model, a).p_high();
        }
        const double dev = std::abs(mean - p);
        ++report.checked;
        if (!report.worst_belief || dev > report.max_deviation) {
            report.max_deviation = dev;
            report.worst_belief = p;
        }
    }
    return report;
}

EnsembleSummary ensemble_stats(std::span<const Trace> traces) {
    if (traces.empty()) throw ParameterError("ensemble_stats needs at least one trace");
    const std::size_t horizon = traces.front().steps.size();
    for (const auto& t : traces)
        if (t.steps.size() != horizon) throw ParameterError("traces have different horizons");

    EnsembleSummary s;
    s.n_traces = traces.size();
    s.horizon = horizon;
    s.mean_price.assign(horizon, 0.0);
    s.mean_menu_price.assign(horizon, 0.0);
    s.mean_p_high.assign(horizon, 0.0);
    s.utilize_frequency.assign(horizon, 0.0);
    s.cascade_onsets.assign(horizon, 0);

    const double n = static_cast<double>(traces.size());
    for (const auto& t : traces) {
        for (std::size_t k = 0; k < horizon; ++k) {
            const auto& step = t.steps[k];
            s.mean_price[k] += step.price;
            s.mean_menu_price[k] += step.menu_price;
            s.mean_p_high[k] += step.posterior.p_high();
            if (step.action == Action::Utilize) s.utilize_frequency[k] += 1.0;
        }
        if (t.cascade_onset)
            ++s.cascade_onsets[static_cast<std::size_t>(*t.cascade_onset - 1)];
        else
            ++s.never_cascaded;
    }
    for (std::size_t k = 0; k < horizon; ++k) {
        s.mean_price[k] /= n;
        s.mean_menu_price[k] /= n;
        s.mean_p_high[k] /= n;
        s.utilize_frequency[k] /= n;
    }

    if (horizon > 1) {
        s.menu_price_drift.assign(horizon - 1, 0.0);
        s.menu_price_drift_se.assign(horizon - 1, 0.0);
        for (std::size_t k = 0; k + 1 < horizon; ++k) {
            double sum = 0.0;
            for (const auto& t : traces) sum += t.steps[k + 1].menu_price - t.steps[k].menu_price;
            const double mean = sum / n;
            double ss = 0.0;
            for (const auto& t : traces) {
                const double d = t.steps[k + 1].menu_price - t.steps[k].menu_price - mean;
                ss += d * d;
            }
            s.menu_price_drift[k] = mean;
            s.menu_price_drift_se[k] = traces.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
        }
    }
    return s;
}

} // namespace riskfusion
