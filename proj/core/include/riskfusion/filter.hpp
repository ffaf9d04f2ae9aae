#pragma once

#include <string_view>

#include "riskfusion/sensor.hpp"

namespace riskfusion {

/// How the posted price splits the sensor population at a given public belief.
///   Herding         u <= u_low            every sensor utilizes
///   SocialLearning  u_low < u <= u_high   sensors follow their private observation
///   CutOff          u > u_high            no sensor utilizes
enum class PriceRegime { Herding, SocialLearning, CutOff };

std::string_view to_string(PriceRegime r) noexcept;

/// r[i][a] = P(a | x = i) under a regime.
struct ActionLikelihood {
    Matrix2 r;

    double operator()(Level state, Action a) const noexcept {
        return r[index_of(state)][index_of(a)];
    }
};

PriceRegime regime_of_price(const PriceThresholds& thresholds, double price) noexcept;
PriceRegime regime_of_price(Belief prior, const ObservationModel& model, RiskAversion alpha,
                            double price);

ActionLikelihood action_likelihood(PriceRegime regime, const ObservationModel& model) noexcept;

/// sigma(pi, a): probability that the next sensor takes action a.
double action_probability(Belief prior, PriceRegime regime, const ObservationModel& model,
                          Action a) noexcept;

/// Social learning filter T(pi, a). Herding and CutOff return the prior unchanged
/// for the action that occurs with probability one, and throw
/// ZeroProbabilityActionError for the other.
Belief belief_transition(Belief prior, PriceRegime regime, const ObservationModel& model, Action a);

/// Checks R^L = R^H Q with R^H = B, R^L = Q = [[1,0],[1,0]], entrywise to 1e-12.
bool blackwell_check(const ObservationModel& model) noexcept;

} // namespace riskfusion
