// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit if any fails.
// Reference instance: B = [[0.8,0.2],[0.2,0.8]], rho = 0.7, beta = 0.1,
// 1001-point grid, tolerance 1e-10.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "riskfusion/filter.hpp"
#include "riskfusion/simulation.hpp"
#include "riskfusion/solver.hpp"
#include "support/oracles.hpp"

using namespace riskfusion;
namespace fs = std::filesystem;

namespace {

constexpr double kAlphas[] = {0.3, 0.9, 1.0};
constexpr RewardCase kCases[] = {RewardCase::SelfInterested, RewardCase::Altruistic};

FusionModel reference(double alpha, RewardCase rc) {
    return FusionModel{ObservationModel::symmetric(0.8), RiskAversion(alpha),
                       ControllerParams{0.1, 0.7, rc, 1e-3}};
}

const char* name(RewardCase rc) { return rc == RewardCase::SelfInterested ? "SI" : "Alt"; }

const SolveResult& solved(double alpha, RewardCase rc) {
    static std::map<std::pair<double, int>, SolveResult> cache;
    const auto key = std::make_pair(alpha, static_cast<int>(rc));
    auto it = cache.find(key);
    if (it == cache.end())
        it = cache.emplace(key, value_iteration(BeliefGrid(1001), reference(alpha, rc), {1e-10, 100000})).first;
    return it->second;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3g", x);
    return buf;
}

struct Outcome {
    bool pass;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double time_limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o{false, ""};
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::string timing;
    if (time_limit_s > 0) {
        timing = "  [" + fmt(secs) + " s, limit " + fmt(time_limit_s) + " s]";
        if (secs >= time_limit_s) {
            o.pass = false;
            o.detail += "; over time limit";
        }
    }
    if (!o.pass) ++failures;
    std::printf("%s  %2d  %-28s %s%s\n", o.pass ? "PASS" : "FAIL", id, title, o.detail.c_str(), timing.c_str());
    std::fflush(stdout);
}

oracle::Mat random_tp2(std::mt19937_64& g) {
    std::uniform_real_distribution<double> u(0.5, 1.0);
    const double b00 = u(g), b11 = u(g);
    return {{{b00, 1.0 - b00}, {1.0 - b11, b11}}};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

} // namespace

int main() {
    std::printf("acceptance suite (reference: symmetric B 0.8, rho 0.7, beta 0.1, grid 1001, tol 1e-10)\n");

    criterion(1, "cvar_oracle_equivalence", 1.0, [] {
        std::mt19937_64 g(101);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        double worst = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const double alpha = 1.0 - u(g);
            const double p = i % 10 == 0 ? alpha : u(g);
            const double price = 2 * u(g) - 0.5;
            // Utilize costs (u, u-1); random pairs cover the rest of the domain.
            const std::array<double, 2> c = i % 2 ? std::array<double, 2>{price, price - 1}
                                                  : std::array<double, 2>{4 * u(g) - 2, 4 * u(g) - 2};
            const double got = cvar(c, Belief(p), RiskAversion(alpha));
            worst = std::max(worst, std::abs(got - oracle::cvar_ru(c, {1 - p, p}, alpha)));
        }
        return Outcome{worst <= 1e-12, "10^4 instances, max|diff| = " + fmt(worst) + " (tol 1e-12)"};
    });

    criterion(2, "sensor_threshold_equivalence", 1.0, [] {
        std::mt19937_64 g(202);
        std::uniform_real_distribution<double> u(0.0, 1.0);
        int mismatches = 0, ties = 0;
        double eta_gap = 0.0;
        for (int i = 0; i < 10000; ++i) {
            const auto m = random_tp2(g);
            const ObservationModel model(m);
            const double p = u(g), alpha = 1.0 - u(g);
            const int y = i % 2;
            const Level level = y ? Level::High : Level::Low;
            const double eta_low = private_belief_update(Belief(p), model, level).p_low();
            eta_gap = std::max(eta_gap, std::abs(eta_low - (1.0 - oracle::bayes_high(p, m, y))));
            const double threshold = 1.0 - eta_low / alpha;
            double price = 2 * u(g) - 0.5;
            if (i % 4 == 0) {
                price = threshold;
                ++ties;
            }
            const Action want = price <= threshold ? Action::Utilize : Action::DontUtilize;
            if (sensor_action(Belief(p), model, level, RiskAversion(alpha), price) != want) ++mismatches;
        }
        const bool ok = mismatches == 0 && eta_gap <= 1e-12;
        return Outcome{ok, "10^4 instances (" + std::to_string(ties) + " exact ties), mismatches = " +
                               std::to_string(mismatches) + ", posterior gap vs hand Bayes = " + fmt(eta_gap)};
    });

    criterion(3, "belief_martingale", 0, [] {
        double worst = 0.0;
        std::size_t checked = 0;
        for (double a : kAlphas) {
            const auto r = belief_martingale_check(BeliefGrid(1001), ObservationModel::symmetric(0.8), RiskAversion(a));
            worst = std::max(worst, r.max_deviation);
            checked += r.checked;
        }
        return Outcome{worst <= 1e-12 && checked > 0,
                       std::to_string(checked) + " grid beliefs, max deviation = " + fmt(worst) + " (tol 1e-12)"};
    });

    criterion(4, "menu_sufficiency", 30.0, [] {
        constexpr std::size_t kDense = 10000;
        const double tol = 1.0 / (kDense - 1) + 1e-12;
        double worst = 0.0;
        std::string where;
        for (auto rc : kCases)
            for (double a : kAlphas) {
                const auto& s = solved(a, rc);
                const auto model = reference(a, rc);
                for (std::size_t i = 0; i < s.value.grid.size(); ++i) {
                    const Belief b(s.value.grid[i]);
                    const double menu = menu_values(b, s.value, model).best().second;
                    const double dense = dense_price_oracle(b, s.value, model, kDense).best_q;
                    const double gap = std::abs(menu - dense);
                    if (gap > worst) {
                        worst = gap;
                        where = std::string(name(rc)) + " a=" + fmt(a) + " p=" + fmt(b.p_high());
                    }
                }
            }
        return Outcome{worst <= tol, "6 instances x 1001 beliefs, max|menu - dense| = " + fmt(worst) + " at " +
                                         where + " (tol " + fmt(tol) + ")"};
    });

    criterion(5, "value_monotone_convex", 0, [] {
        std::string detail;
        bool ok = true;
        for (auto rc : kCases)
            for (double a : kAlphas) {
                const auto& v = solved(a, rc).value.values;
                double min_d1 = 0.0, min_d2 = 0.0;
                for (std::size_t i = 1; i < v.size(); ++i) min_d1 = std::min(min_d1, v[i] - v[i - 1]);
                for (std::size_t i = 1; i + 1 < v.size(); ++i)
                    min_d2 = std::min(min_d2, v[i - 1] - 2 * v[i] + v[i + 1]);
                const bool inst = min_d1 >= -1e-8 && min_d2 >= -1e-8;
                ok = ok && inst;
                detail += std::string(name(rc)) + " a=" + fmt(a) + (inst ? " ok" : " d2min=" + fmt(min_d2)) +
                          (min_d1 >= -1e-8 ? "" : " d1min=" + fmt(min_d1)) + "; ";
            }
        return Outcome{ok, detail + "(tol -1e-8)"};
    });

    criterion(6, "policy_structure", 0, [] {
        bool ok = true;
        std::string detail;
        for (auto rc : kCases)
            for (double a : kAlphas) {
                const auto& s = solved(a, rc);
                const auto& c = s.policy.choices;
                bool ordered = true;
                for (std::size_t i = 1; i < c.size(); ++i)
                    if (static_cast<int>(c[i]) < static_cast<int>(c[i - 1])) ordered = false;
                if (rc == RewardCase::Altruistic)
                    for (auto x : c)
                        if (x == PriceChoice::LowPrice) ordered = false;
                const auto t = extract_thresholds(s, reference(a, rc));
                bool cross = t.pi_star && t.delta_star && t.gamma_star &&
                             std::abs(*t.pi_star - std::max(*t.delta_star, *t.gamma_star)) <= 1e-3 + 1e-12;
                ok = ok && ordered && cross;
                detail += std::string(name(rc)) + " a=" + fmt(a) + " pi*=" + (t.pi_star ? fmt(*t.pi_star) : "none") +
                          (ordered ? "" : " INTERLEAVED") + (cross ? "" : " CROSSCHECK") + "; ";
            }
        return Outcome{ok, detail + "(cross-check tol one grid step)"};
    });

    criterion(7, "herding_fixed_point", 0, [] {
        double worst = 0.0;
        std::size_t n = 0;
        for (auto rc : kCases)
            for (double a : kAlphas) {
                const auto& s = solved(a, rc);
                const auto model = reference(a, rc);
                for (std::size_t i = 0; i < s.policy.choices.size(); ++i) {
                    if (s.policy.choices[i] != PriceChoice::LowPrice) continue;
                    const double ul = price_thresholds(Belief(s.value.grid[i]), model.observations, model.alpha).u_low;
                    worst = std::max(worst, std::abs(s.value.values[i] - (ul - 0.1) / (1 - 0.7)));
                    ++n;
                }
            }
        return Outcome{worst <= 1e-8 && n > 0,
                       std::to_string(n) + " LowPrice beliefs, max|V - fixed point| = " + fmt(worst) + " (tol 1e-8)"};
    });

    criterion(8, "price_supermartingale", 60.0, [] {
        std::size_t violations = 0, checked = 0;
        double max_excess = -1.0;
        for (auto rc : kCases)
            for (double a : kAlphas) {
                const auto r = supermartingale_check(solved(a, rc).policy, reference(a, rc));
                violations += r.violations;
                checked += r.checked;
                max_excess = std::max(max_excess, r.max_excess);
            }
        // Ensemble: 10^4 traces of the SI alpha = 0.9 policy from p = 0.5.
        const auto model = reference(0.9, RewardCase::SelfInterested);
        const auto traces =
            simulate_ensemble(solved(0.9, RewardCase::SelfInterested).policy, model, Belief(0.5), 200, 10000, 20240601);
        const auto s = ensemble_stats(traces);
        std::size_t rises = 0;
        double worst_z = -1e300;
        for (std::size_t k = 0; k < s.menu_price_drift.size(); ++k) {
            const double se = s.menu_price_drift_se[k];
            if (s.menu_price_drift[k] > 3.0 * se) ++rises;
            if (se > 0) worst_z = std::max(worst_z, s.menu_price_drift[k] / se);
        }
        const bool ok = violations == 0 && rises == 0;
        return Outcome{ok, "analytic: " + std::to_string(checked) + " beliefs, " + std::to_string(violations) +
                               " violations (max excess " + fmt(max_excess) + "); ensemble 10^4 x 200: " +
                               std::to_string(rises) + " steps rising > 3 SE (max drift/SE " + fmt(worst_z) + ")"};
    });

    criterion(9, "risk_aversion_widens_cutoff", 0, [] {
        const auto lo = extract_thresholds(solved(0.3, RewardCase::SelfInterested), reference(0.3, RewardCase::SelfInterested));
        const auto hi = extract_thresholds(solved(0.9, RewardCase::SelfInterested), reference(0.9, RewardCase::SelfInterested));
        const bool ok = lo.pi_star && hi.pi_star && *lo.pi_star >= *hi.pi_star;
        return Outcome{ok, "pi*(0.3) = " + (lo.pi_star ? fmt(*lo.pi_star) : "none") +
                               ", pi*(0.9) = " + (hi.pi_star ? fmt(*hi.pi_star) : "none")};
    });

    criterion(10, "blackwell_identity", 0, [] {
        std::mt19937_64 g(1010);
        double worst = 0.0;
        bool lib = true;
        for (int n = 0; n < 100; ++n) {
            const auto b = random_tp2(g);
            const oracle::Mat q{{{1, 0}, {1, 0}}}, rl{{{1, 0}, {1, 0}}};
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j)
                    worst = std::max(worst, std::abs(b[i][0] * q[0][j] + b[i][1] * q[1][j] - rl[i][j]));
            lib = lib && blackwell_check(ObservationModel(b));
        }
        return Outcome{worst <= 1e-12 && lib, "100 random TP2 matrices, max|R^H Q - R^L| = " + fmt(worst)};
    });

    criterion(11, "determinism", 0, [] {
#ifdef RISKFUSION_TOOL_PATH
        const auto root = fs::temp_directory_path() / "riskfusion_acceptance";
        fs::remove_all(root);
        fs::create_directories(root);
        std::ofstream(root / "run.cfg") << "observation_matrix = 0.8, 0.2, 0.2, 0.8\nalpha = 0.9\nbeta = 0.1\n"
                                           "rho = 0.7\nreward_case = self_interested\nn_traces = 500\n";
        for (const char* run : {"a", "b"}) {
            const std::string base = std::string(RISKFUSION_TOOL_PATH) + " --config " + (root / "run.cfg").string() +
                                     " --out " + (root / run).string() + " --seed 7 --quiet ";
            for (const char* cmd : {"solve", "simulate"}) {
                const int st = std::system((base + cmd).c_str());
                if (!WIFEXITED(st) || WEXITSTATUS(st) != 0)
                    return Outcome{false, std::string(cmd) + " exited abnormally"};
            }
        }
        int same = 0;
        std::string diff;
        for (const char* f : {"value.csv", "policy.csv", "thresholds.json", "traces.jsonl", "ensemble.csv"}) {
            const auto a = slurp(root / "a" / f), b = slurp(root / "b" / f);
            if (!a.empty() && a == b)
                ++same;
            else
                diff += std::string(" ") + f;
        }
        return Outcome{same == 5, std::to_string(same) + "/5 output files byte-identical" + diff};
#else
        return Outcome{false, "tool path not configured"};
#endif
    });

    std::printf("%s: %d of 11 criteria failed\n", failures ? "FAILED" : "OK", failures);
    return failures ? 1 : 0;
}
