#pragma once

// Hand-rolled reference computations used as test oracles. Written from the
// model definitions directly; none of them call into the library.

#include <algorithm>
#include <array>
#include <utility>
#include <vector>

namespace oracle {

using Mat = std::array<std::array<double, 2>, 2>;

// P(x = High | y) from the joint table P(x, y) = prior(x) B[x][y]. y is 0 (Low) or 1 (High).
inline double bayes_high(double prior_high, const Mat& b, int y) {
    const double joint_low = (1.0 - prior_high) * b[0][y];
    const double joint_high = prior_high * b[1][y];
    return joint_high / (joint_low + joint_high);
}

// Rockafellar-Uryasev: min_z z + E[(c - z)^+] / alpha; for a discrete law the
// minimum sits on an atom, so enumerating the atoms is exact.
inline double cvar_ru(std::array<double, 2> cost, std::array<double, 2> prob, double alpha) {
    double best = 1e300;
    for (double z : cost) {
        double tail = 0.0;
        for (int i = 0; i < 2; ++i) tail += prob[i] * std::max(cost[i] - z, 0.0);
        best = std::min(best, z + tail / alpha);
    }
    return best;
}

// Tail average: mean of the worst alpha-mass of outcomes, filled greedily from the top.
inline double cvar_tail(std::array<double, 2> cost, std::array<double, 2> prob, double alpha) {
    std::vector<std::pair<double, double>> atoms{{cost[0], prob[0]}, {cost[1], prob[1]}};
    std::sort(atoms.begin(), atoms.end(), [](auto a, auto b) { return a.first > b.first; });
    double left = alpha, acc = 0.0;
    for (auto [c, p] : atoms) {
        const double take = std::min(p, left);
        acc += take * c;
        left -= take;
    }
    return acc / alpha;
}

// Sensor indicator from the private posterior: Utilize iff u <= 1 - P(Low | y) / alpha.
inline double utilize_threshold(double prior_high, const Mat& b, int y, double alpha) {
    return 1.0 - (1.0 - bayes_high(prior_high, b, y)) / alpha;
}

// Action likelihood P(a | x) for a given price, marginalising the private
// observation through the sensor's threshold rule. a is 0 (DontUtilize) or 1 (Utilize).
inline Mat action_likelihood(double prior_high, const Mat& b, double alpha, double price) {
    Mat r{};
    for (int x = 0; x < 2; ++x)
        for (int y = 0; y < 2; ++y) {
            const int a = price <= utilize_threshold(prior_high, b, y, alpha) ? 1 : 0;
            r[x][a] += b[x][y];
        }
    return r;
}

// P(a) and P(High | a) by enumerating the (x, y) joint table at a given price.
inline std::pair<double, double> filter(double prior_high, const Mat& b, double alpha, double price,
                                        int a) {
    const Mat r = action_likelihood(prior_high, b, alpha, price);
    const double low = (1.0 - prior_high) * r[0][a];
    const double high = prior_high * r[1][a];
    return {low + high, high / (low + high)};
}

} // namespace oracle
