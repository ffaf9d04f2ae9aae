#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace riskfusion {

/// Two-level quantity used for both the hidden quality x and a private observation y.
/// Low = 1, High = 2; array index is value - 1 everywhere.
enum class Level : int { Low = 1, High = 2 };

/// Sensor decision. DontUtilize = 1, Utilize = 2.
enum class Action : int { DontUtilize = 1, Utilize = 2 };

constexpr std::size_t index_of(Level l) noexcept { return static_cast<std::size_t>(l) - 1; }
constexpr std::size_t index_of(Action a) noexcept { return static_cast<std::size_t>(a) - 1; }

inline constexpr std::array<Level, 2> kLevels{Level::Low, Level::High};
inline constexpr std::array<Action, 2> kActions{Action::DontUtilize, Action::Utilize};

std::string_view to_string(Level l) noexcept;
std::string_view to_string(Action a) noexcept;

/// Point of the 2-simplex, stored as the mass on the High state.
class Belief {
public:
    explicit Belief(double p_high);

    double p_high() const noexcept { return p_high_; }
    double p_low() const noexcept { return 1.0 - p_high_; }
    double operator[](Level l) const noexcept { return l == Level::High ? p_high_ : 1.0 - p_high_; }

    bool is_pure() const noexcept { return p_high_ == 0.0 || p_high_ == 1.0; }

    friend bool operator==(const Belief&, const Belief&) = default;

private:
    double p_high_;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

/// Row-stochastic observation likelihoods, b[i][j] = P(y = j+1 | x = i+1).
/// Construction checks stochasticity only; TP2 is a separate predicate because
/// some callers (tests, config validation) need to reason about non-TP2 matrices.
class ObservationModel {
public:
    explicit ObservationModel(const Matrix2& b);

    double likelihood(Level state, Level observation) const noexcept {
        return b_[index_of(state)][index_of(observation)];
    }
    const Matrix2& matrix() const noexcept { return b_; }
    double determinant() const noexcept { return b_[0][0] * b_[1][1] - b_[0][1] * b_[1][0]; }

    static ObservationModel symmetric(double accuracy);

private:
    Matrix2 b_;
};

/// CVaR level alpha in (0, 1]; alpha = 1 is risk neutral.
class RiskAversion {
public:
    explicit RiskAversion(double alpha);
    double alpha() const noexcept { return alpha_; }

private:
    double alpha_;
};

/// Cost indexed by state: {cost if x = Low, cost if x = High}.
using CostPair = std::array<double, 2>;

/// c(x, a) = u - v(x) with v(Low) = 0, v(High) = 1 when utilizing, zero otherwise.
struct CostTable {
    double price;

    CostPair cost(Action a) const noexcept {
        if (a == Action::DontUtilize) return {0.0, 0.0};
        return {price, price - 1.0};
    }
};

/// Prices at which a sensor with observation Low (u_low) or High (u_high) is
/// indifferent between utilizing or not. Unclamped; either may be negative.
struct PriceThresholds {
    double u_low;
    double u_high;
};

/// Bayes fusion of a private observation with the public prior.
/// Throws DegenerateUpdateError when the observation has zero probability under the prior.
Belief private_belief_update(Belief prior, const ObservationModel& model, Level y);

/// CVaR_alpha of the two-point cost distribution {cost[0] w.p. dist(Low), cost[1] w.p. dist(High)}.
double cvar(const CostPair& cost, Belief dist, RiskAversion alpha);

PriceThresholds price_thresholds(Belief prior, const ObservationModel& model, RiskAversion alpha);

/// Utilize iff u <= 1 - eta^y(Low)/alpha (equality resolves to Utilize).
Action sensor_action(Belief prior, const ObservationModel& model, Level y, RiskAversion alpha,
                     double price);

/// Total positivity of order two, with 1e-12 slack for construction rounding.
bool check_tp2(const ObservationModel& model) noexcept;

} // namespace riskfusion
