#include "riskfusion/sensor.hpp"

#include <cmath>
#include <string>

#include "riskfusion/errors.hpp"

namespace riskfusion {

std::string_view to_string(Level l) noexcept { return l == Level::High ? "High" : "Low"; }

std::string_view to_string(Action a) noexcept {
    return a == Action::Utilize ? "Utilize" : "DontUtilize";
}

Belief::Belief(double p_high) : p_high_(p_high) {
    if (!(p_high >= 0.0 && p_high <= 1.0))
        throw ParameterError("belief p_high must lie in [0, 1], got " + std::to_string(p_high));
}

ObservationModel::ObservationModel(const Matrix2& b) : b_(b) {
    for (const auto& row : b_) {
        for (double v : row) {
            if (!(v >= 0.0 && v <= 1.0))
                throw ParameterError("observation probabilities must lie in [0, 1]");
        }
        if (std::abs(row[0] + row[1] - 1.0) > 1e-12)
            throw ParameterError("observation matrix rows must sum to 1");
    }
}

ObservationModel ObservationModel::symmetric(double accuracy) {
    return ObservationModel(Matrix2{{{accuracy, 1.0 - accuracy}, {1.0 - accuracy, accuracy}}});
}

RiskAversion::RiskAversion(double alpha) : alpha_(alpha) {
    if (!(alpha > 0.0 && alpha <= 1.0))
        throw ParameterError("risk aversion alpha must lie in (0, 1], got " + std::to_string(alpha));
}

Belief private_belief_update(Belief prior, const ObservationModel& model, Level y) {
    const double high = model.likelihood(Level::High, y) * prior.p_high();
    const double low = model.likelihood(Level::Low, y) * prior.p_low();
    const double norm = high + low;
    if (!(norm > 0.0))
        throw DegenerateUpdateError("observation " + std::string(to_string(y)) +
                                    " has zero probability under the prior");
    return Belief(high / norm);
}

double cvar(const CostPair& cost, Belief dist, RiskAversion alpha) {
    const double a = alpha.alpha();
    if (cost[0] == cost[1]) return cost[0];

    const bool low_is_max = cost[0] > cost[1];
    const double c_max = low_is_max ? cost[0] : cost[1];
    const double c_min = low_is_max ? cost[1] : cost[0];
    const double p_max = low_is_max ? dist.p_low() : dist.p_high();

    // The alpha-tail is either entirely the worst atom or the worst atom
    // topped up with mass from the other one.
    if (p_max >= a) return c_max;
    return (p_max * c_max + (a - p_max) * c_min) / a;
}

PriceThresholds price_thresholds(Belief prior, const ObservationModel& model, RiskAversion alpha) {
    const double eta_low_obs = private_belief_update(prior, model, Level::Low).p_low();
    const double eta_high_obs = private_belief_update(prior, model, Level::High).p_low();
    return {1.0 - eta_low_obs / alpha.alpha(), 1.0 - eta_high_obs / alpha.alpha()};
}

Action sensor_action(Belief prior, const ObservationModel& model, Level y, RiskAversion alpha,
                     double price) {
    const double eta_low = private_belief_update(prior, model, y).p_low();
    const double threshold = 1.0 - eta_low / alpha.alpha();
    return price <= threshold ? Action::Utilize : Action::DontUtilize;
}

bool check_tp2(const ObservationModel& model) noexcept { return model.determinant() >= -1e-12; }

} // namespace riskfusion
