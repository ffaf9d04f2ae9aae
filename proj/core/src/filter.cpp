#include "riskfusion/filter.hpp"

#include <cmath>
#include <string>

#include "riskfusion/errors.hpp"

namespace riskfusion {

std::string_view to_string(PriceRegime r) noexcept {
    switch (r) {
    case PriceRegime::Herding: return "Herding";
    case PriceRegime::SocialLearning: return "SocialLearning";
    case PriceRegime::CutOff: return "CutOff";
    }
    return "?";
}

PriceRegime regime_of_price(const PriceThresholds& thresholds, double price) noexcept {
    if (price <= thresholds.u_low) return PriceRegime::Herding;
    if (price <= thresholds.u_high) return PriceRegime::SocialLearning;
    return PriceRegime::CutOff;
}

PriceRegime regime_of_price(Belief prior, const ObservationModel& model, RiskAversion alpha,
                            double price) {
    return regime_of_price(price_thresholds(prior, model, alpha), price);
}

ActionLikelihood action_likelihood(PriceRegime regime, const ObservationModel& model) noexcept {
    switch (regime) {
    case PriceRegime::Herding: return {Matrix2{{{0.0, 1.0}, {0.0, 1.0}}}};
    case PriceRegime::SocialLearning: return {model.matrix()};
    case PriceRegime::CutOff: break;
    }
    return {Matrix2{{{1.0, 0.0}, {1.0, 0.0}}}};
}

double action_probability(Belief prior, PriceRegime regime, const ObservationModel& model,
                          Action a) noexcept {
    const auto r = action_likelihood(regime, model);
    return r(Level::Low, a) * prior.p_low() + r(Level::High, a) * prior.p_high();
}

Belief belief_transition(Belief prior, PriceRegime regime, const ObservationModel& model, Action a) {
    const auto r = action_likelihood(regime, model);
    const double high = r(Level::High, a) * prior.p_high();
    const double low = r(Level::Low, a) * prior.p_low();
    const double norm = high + low;
    if (!(norm > 0.0))
        throw ZeroProbabilityActionError("action " + std::string(to_string(a)) +
                                         " has zero probability in regime " +
                                         std::string(to_string(regime)));
    return Belief(high / norm);
}

bool blackwell_check(const ObservationModel& model) noexcept {
    const Matrix2& rh = model.matrix();
    const Matrix2 q{{{1.0, 0.0}, {1.0, 0.0}}};
    const Matrix2 rl = q;
    for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
            const double prod = rh[i][0] * q[0][j] + rh[i][1] * q[1][j];
            if (std::abs(prod - rl[i][j]) > 1e-12) return false;
        }
    }
    return true;
}

} // namespace riskfusion
