#include "cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cli/format.hpp"
#include "riskfusion/errors.hpp"
#include "riskfusion/rng.hpp"

namespace riskfusion::cli {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

void write_file(const fs::path& path, const std::string& contents) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    out << contents;
    if (!out) throw std::runtime_error("failed writing " + path.string());
}

ordered_json optional_json(const std::optional<double>& x) {
    return x ? ordered_json(*x) : ordered_json(nullptr);
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    return out;
}

double parse_cell(const std::string& cell, const fs::path& path, std::size_t line) {
    std::size_t used = 0;
    double x = 0.0;
    try {
        x = std::stod(cell, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != cell.size())
        throw InputError(path.string() + ":" + std::to_string(line) + ": bad number '" + cell + "'");
    return x;
}

// Rockafellar-Uryasev: the minimizing z sits on one of the cost atoms.
double cvar_by_atoms(const CostPair& cost, Belief dist, double alpha) {
    const double p[2] = {dist.p_low(), dist.p_high()};
    double best = 0.0;
    bool first = true;
    for (const double z : cost) {
        double tail = 0.0;
        for (int i = 0; i < 2; ++i) tail += p[i] * std::max(cost[i] - z, 0.0);
        const double v = z + tail / alpha;
        if (first || v < best) best = v;
        first = false;
    }
    return best;
}

CheckResult named(std::string name) {
    CheckResult r;
    r.name = std::move(name);
    return r;
}

CheckResult finish(CheckResult r) {
    r.passed = r.violations == 0;
    return r;
}

void record(CheckResult& r, double measure, std::optional<double> at) {
    ++r.checked;
    if (measure > r.worst || r.checked == 1) {
        r.worst = measure;
        r.worst_belief = at;
    }
    if (measure > r.tolerance) ++r.violations;
}

CheckResult check_tp2_entry(const FusionModel& model) {
    auto r = named("tp2");
    r.checked = 1;
    r.worst = -model.observations.determinant();
    r.tolerance = 1e-12;
    r.violations = check_tp2(model.observations) ? 0 : 1;
    r.detail = "negative determinant of B";
    return finish(r);
}

CheckResult check_cvar_oracle(std::size_t samples, std::uint64_t seed) {
    auto r = named("cvar_oracle");
    r.tolerance = 1e-12;
    r.detail = "|closed-form CVaR - atom enumeration| on random two-point costs";
    RandomStream rng(RandomStream::stream_seed(seed, 0xC0FFEE));
    for (std::size_t i = 0; i < samples; ++i) {
        const double alpha = 1.0 - rng.uniform();
        double p = rng.uniform();
        if (i % 7 == 0) p = alpha; // tail boundary
        CostPair cost{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
        if (i % 11 == 0) cost[1] = cost[0];
        const double got = cvar(cost, Belief(p), RiskAversion(alpha));
        record(r, std::abs(got - cvar_by_atoms(cost, Belief(p), alpha)), std::nullopt);
    }
    return finish(r);
}

CheckResult check_sensor_threshold(std::size_t samples, std::uint64_t seed) {
    auto r = named("sensor_threshold");
    r.tolerance = 0.5;
    r.detail = "disagreements between sensor_action and the private-belief threshold test";
    RandomStream rng(RandomStream::stream_seed(seed, 0x5E45));
    for (std::size_t i = 0; i < samples; ++i) {
        const double b00 = 0.5 + 0.5 * rng.uniform();
        const double b11 = 0.5 + 0.5 * rng.uniform();
        const ObservationModel model(Matrix2{{{b00, 1.0 - b00}, {1.0 - b11, b11}}});
        const Belief prior(0.001 + 0.998 * rng.uniform());
        const Level y = rng.bernoulli(0.5) ? Level::High : Level::Low;
        const double alpha = 1.0 - rng.uniform();
        const double eta_low = private_belief_update(prior, model, y).p_low();
        const double threshold = 1.0 - eta_low / alpha;
        const double price = i % 4 == 0 ? threshold : 2.0 * rng.uniform() - 0.5;
        const Action expected = price <= threshold ? Action::Utilize : Action::DontUtilize;
        const Action got = sensor_action(prior, model, y, RiskAversion(alpha), price);
        record(r, got == expected ? 0.0 : 1.0, prior.p_high());
    }
    return finish(r);
}

CheckResult check_menu_sufficiency(const SolveResult& s, const FusionModel& model, std::size_t n_prices) {
    auto r = named("menu_sufficiency");
    // Q is 1-Lipschitz in the price inside each regime, so one dense step bounds the gap.
    r.tolerance = 1.0 / static_cast<double>(n_prices - 1) + 1e-9;
    r.detail = "|finite-menu max Q - dense price sweep max Q|";
    const auto& grid = s.value.grid;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const Belief b(grid[i]);
        const double menu = menu_values(b, s.value, model).best().second;
        const double dense = dense_price_oracle(b, s.value, model, n_prices).best_q;
        record(r, std::abs(menu - dense), grid[i]);
    }
    return finish(r);
}

CheckResult check_belief_martingale(const BeliefGrid& grid, const FusionModel& model) {
    const auto m = belief_martingale_check(grid, model.observations, model.alpha);
    auto r = named("belief_martingale");
    r.tolerance = 1e-12;
    r.checked = m.checked;
    r.worst = m.max_deviation;
    r.worst_belief = m.worst_belief;
    r.violations = m.max_deviation > r.tolerance ? 1 : 0;
    r.detail = "|sum_a sigma(pi,a) T(pi,a) - pi|";
    return finish(r);
}

CheckResult check_value_monotone(const ValueFunction& v) {
    auto r = named("value_monotone");
    r.tolerance = 1e-8;
    r.detail = "largest decrease V(i) - V(i+1)";
    for (std::size_t i = 0; i + 1 < v.values.size(); ++i)
        record(r, v.values[i] - v.values[i + 1], v.grid[i]);
    return finish(r);
}

CheckResult check_value_convex(const ValueFunction& v) {
    auto r = named("value_convex");
    r.tolerance = 1e-8;
    r.detail = "largest negative second difference";
    for (std::size_t i = 1; i + 1 < v.values.size(); ++i)
        record(r, 0.0 - (v.values[i - 1] - 2.0 * v.values[i] + v.values[i + 1]), v.grid[i]);
    return finish(r);
}

CheckResult check_policy_structure(const Policy& p, RewardCase reward_case) {
    auto r = named("policy_structure");
    r.tolerance = 0.5;
    r.detail = reward_case == RewardCase::SelfInterested
                   ? "order breaks in the CutOff/HighPrice/LowPrice partition"
                   : "order breaks in the CutOff/HighPrice partition or LowPrice rows";
    for (std::size_t i = 0; i < p.choices.size(); ++i) {
        bool bad = i > 0 && static_cast<int>(p.choices[i]) < static_cast<int>(p.choices[i - 1]);
        if (reward_case == RewardCase::Altruistic && p.choices[i] == PriceChoice::LowPrice) bad = true;
        record(r, bad ? 1.0 : 0.0, p.grid[i]);
    }
    return finish(r);
}

CheckResult check_threshold_crosscheck(const Thresholds& t, const BeliefGrid& grid) {
    auto r = named("threshold_crosscheck");
    r.tolerance = grid.step() + 1e-12;
    r.detail = "|pi_star - max(delta_star, gamma_star)|";
    r.checked = 1;
    std::optional<double> expected;
    if (t.delta_star && t.gamma_star)
        expected = std::max(*t.delta_star, *t.gamma_star);
    if (!expected && !t.pi_star) return finish(r);
    if (!expected || !t.pi_star) {
        r.worst = 1.0;
        r.violations = 1;
        return finish(r);
    }
    r.worst = std::abs(*t.pi_star - *expected);
    r.worst_belief = t.pi_star;
    if (r.worst > r.tolerance) r.violations = 1;
    return finish(r);
}

CheckResult check_herding_fixed_point(const SolveResult& s, const FusionModel& model) {
    auto r = named("herding_fixed_point");
    r.tolerance = 1e-8;
    r.detail = "|V - (u_low - beta) / (1 - rho)| on LowPrice beliefs";
    const auto& c = model.controller;
    for (std::size_t i = 0; i < s.policy.choices.size(); ++i) {
        if (s.policy.choices[i] != PriceChoice::LowPrice) continue;
        const double u_low = price_thresholds(Belief(s.value.grid[i]), model.observations, model.alpha).u_low;
        record(r, std::abs(s.value.values[i] - (u_low - c.beta) / (1.0 - c.rho)), s.value.grid[i]);
    }
    return finish(r);
}

CheckResult check_supermartingale(const Policy& p, const FusionModel& model) {
    const auto m = supermartingale_check(p, model);
    auto r = named("supermartingale");
    r.checked = m.checked;
    r.violations = m.violations;
    r.worst = m.max_excess;
    r.worst_belief = m.worst_belief;
    r.tolerance = 0.0;
    r.detail = "E[u_next] - u - (epsilon + grid-snap slack); max raw increase " +
               format_double(m.max_increase);
    return finish(r);
}

} // namespace

void write_value_csv(const fs::path& path, const ValueFunction& value) {
    std::string s = "p_high,value\n";
    for (std::size_t i = 0; i < value.values.size(); ++i)
        s += format_double(value.grid[i]) + "," + format_double(value.values[i]) + "\n";
    write_file(path, s);
}

void write_policy_csv(const fs::path& path, const Policy& policy) {
    std::string s = "p_high,choice,price\n";
    for (std::size_t i = 0; i < policy.choices.size(); ++i)
        s += format_double(policy.grid[i]) + "," + std::string(to_string(policy.choices[i])) + "," +
             format_double(policy.prices[i]) + "\n";
    write_file(path, s);
}

Policy read_policy_csv(const fs::path& path, const BeliefGrid& expected_grid) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError("cannot open policy file " + path.string());
    std::string line;
    if (!std::getline(in, line) || line != "p_high,choice,price")
        throw InputError(path.string() + ": expected header p_high,choice,price");

    Policy policy{expected_grid, {}, {}};
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        if (cells.size() != 3)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": expected 3 columns");
        const std::size_t i = policy.choices.size();
        const double p = parse_cell(cells[0], path, line_no);
        if (i >= expected_grid.size() || p != expected_grid[i])
            throw InputError(path.string() + ": policy grid does not match grid_points = " +
                             std::to_string(expected_grid.size()));
        const auto choice = parse_price_choice(cells[1]);
        if (!choice)
            throw InputError(path.string() + ":" + std::to_string(line_no) + ": unknown choice '" +
                             cells[1] + "'");
        policy.choices.push_back(*choice);
        policy.prices.push_back(parse_cell(cells[2], path, line_no));
    }
    if (policy.choices.size() != expected_grid.size())
        throw InputError(path.string() + ": policy grid does not match grid_points = " +
                         std::to_string(expected_grid.size()));
    return policy;
}

std::string thresholds_json(const Thresholds& t, std::size_t iterations, double residual) {
    ordered_json j;
    j["pi_star"] = optional_json(t.pi_star);
    j["pi_double_star"] = optional_json(t.pi_double_star);
    j["pi_hat_star"] = optional_json(t.pi_hat_star);
    j["delta_star"] = optional_json(t.delta_star);
    j["gamma_star"] = optional_json(t.gamma_star);
    j["iterations"] = iterations;
    j["residual"] = residual;
    return j.dump(2) + "\n";
}

std::string trace_json(const Trace& trace) {
    ordered_json j;
    j["seed"] = trace.seed;
    j["true_state"] = static_cast<int>(trace.true_state);
    j["initial"] = trace.initial.p_high();
    j["cascade_onset"] = trace.cascade_onset ? ordered_json(*trace.cascade_onset) : ordered_json(nullptr);
    ordered_json k = ordered_json::array(), choice = ordered_json::array(), price = ordered_json::array(),
                 menu = ordered_json::array(), obs = ordered_json::array(), act = ordered_json::array(),
                 regime = ordered_json::array(), post = ordered_json::array();
    for (const auto& s : trace.steps) {
        k.push_back(s.k);
        choice.push_back(std::string(to_string(s.choice)));
        price.push_back(s.price);
        menu.push_back(s.menu_price);
        obs.push_back(static_cast<int>(s.observation));
        act.push_back(static_cast<int>(s.action));
        regime.push_back(std::string(to_string(s.regime)));
        post.push_back(s.posterior.p_high());
    }
    j["k"] = std::move(k);
    j["choice"] = std::move(choice);
    j["price"] = std::move(price);
    j["menu_price"] = std::move(menu);
    j["observation"] = std::move(obs);
    j["action"] = std::move(act);
    j["regime"] = std::move(regime);
    j["posterior"] = std::move(post);
    return j.dump();
}

std::string ensemble_csv(const EnsembleSummary& s) {
    std::string out = "k,mean_price,mean_menu_price,mean_p_high,utilize_frequency,dont_utilize_frequency,"
                      "cascade_onsets,cascaded_fraction,menu_price_drift,menu_price_drift_se\n";
    std::size_t cascaded = 0;
    const double n = static_cast<double>(s.n_traces);
    for (std::size_t k = 0; k < s.horizon; ++k) {
        cascaded += s.cascade_onsets[k];
        const bool has_drift = k < s.menu_price_drift.size();
        out += std::to_string(k + 1) + "," + format_double(s.mean_price[k]) + "," +
               format_double(s.mean_menu_price[k]) + "," + format_double(s.mean_p_high[k]) + "," +
               format_double(s.utilize_frequency[k]) + "," + format_double(1.0 - s.utilize_frequency[k]) +
               "," + std::to_string(s.cascade_onsets[k]) + "," +
               format_double(static_cast<double>(cascaded) / n) + "," +
               (has_drift ? format_double(s.menu_price_drift[k]) : std::string("NA")) + "," +
               (has_drift ? format_double(s.menu_price_drift_se[k]) : std::string("NA")) + "\n";
    }
    return out;
}

SolveResult cmd_solve(const RunConfig& config, const Log& log) {
    config.validate();
    const auto model = config.model();
    log << "solving " << reward_case_key(config.reward_case) << " alpha=" << format_double(config.alpha)
        << " on " << config.grid_points << " grid points\n";
    auto solved = value_iteration(config.grid(), model, config.solver_options());
    const auto t = extract_thresholds(solved, model);
    write_value_csv(config.output_dir / "value.csv", solved.value);
    write_policy_csv(config.output_dir / "policy.csv", solved.policy);
    write_file(config.output_dir / "thresholds.json", thresholds_json(t, solved.iterations, solved.residual));
    log << "converged in " << solved.iterations << " sweeps, residual " << format_double(solved.residual)
        << "\npi_star = " << format_optional(t.pi_star) << "\n";
    return solved;
}

EnsembleSummary cmd_simulate(const RunConfig& config, const std::optional<fs::path>& policy_file,
                             const Log& log) {
    config.validate();
    const auto model = config.model();
    const auto path = policy_file.value_or(config.output_dir / "policy.csv");
    const auto policy = read_policy_csv(path, config.grid());
    log << "simulating " << config.n_traces << " traces of " << config.horizon << " steps, seed "
        << config.seed << "\n";
    const auto traces = simulate_ensemble(policy, model, Belief(config.initial_belief), config.horizon,
                                          config.n_traces, config.seed);
    std::string jsonl;
    for (const auto& t : traces) jsonl += trace_json(t) + "\n";
    write_file(config.output_dir / "traces.jsonl", jsonl);
    auto summary = ensemble_stats(traces);
    write_file(config.output_dir / "ensemble.csv", ensemble_csv(summary));
    log << "never cascaded: " << summary.never_cascaded << " of " << summary.n_traces << "\n";
    return summary;
}

bool VerifyReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

VerifyReport run_verification(const RunConfig& config, const Log& log) {
    config.validate();
    const auto model = config.model();
    VerifyReport report;
    auto add = [&](CheckResult r) {
        log << (r.passed ? "PASS " : "FAIL ") << r.name << "  worst " << format_double(r.worst) << "\n";
        report.checks.push_back(std::move(r));
    };

    add(check_tp2_entry(model));
    add(check_cvar_oracle(config.verify_samples, config.seed));
    add(check_sensor_threshold(config.verify_samples, config.seed));
    add(check_belief_martingale(config.grid(), model));

    const auto solved = value_iteration(config.grid(), model, config.solver_options());
    const auto t = extract_thresholds(solved, model);
    add(check_menu_sufficiency(solved, model, config.dense_prices));
    add(check_value_monotone(solved.value));
    add(check_value_convex(solved.value));
    add(check_policy_structure(solved.policy, config.reward_case));
    add(check_threshold_crosscheck(t, config.grid()));
    add(check_herding_fixed_point(solved, model));
    add(check_supermartingale(solved.policy, model));
    return report;
}

std::string verify_json(const VerifyReport& report) {
    ordered_json j;
    j["passed"] = report.passed();
    ordered_json checks = ordered_json::array();
    for (const auto& c : report.checks) {
        ordered_json e;
        e["name"] = c.name;
        e["passed"] = c.passed;
        e["checked"] = c.checked;
        e["violations"] = c.violations;
        e["worst"] = c.worst;
        e["worst_belief"] = optional_json(c.worst_belief);
        e["tolerance"] = c.tolerance;
        e["detail"] = c.detail;
        checks.push_back(std::move(e));
    }
    j["checks"] = std::move(checks);
    return j.dump(2) + "\n";
}

VerifyReport cmd_verify(const RunConfig& config, const Log& log) {
    auto report = run_verification(config, log);
    write_file(config.output_dir / "verify.json", verify_json(report));
    return report;
}

std::vector<SweepRow> cmd_sweep_alpha(const RunConfig& config, const std::vector<double>& alphas,
                                      const Log& log) {
    config.validate();
    if (alphas.empty()) throw ConfigError("alphas", "needs at least one value");
    for (const double a : alphas) (void)RiskAversion(a);

    std::vector<SweepRow> rows;
    for (const double a : alphas) {
        SweepRow row{a, std::nullopt, "ok"};
        try {
            const auto model = config.model_with_alpha(a);
            const auto solved = value_iteration(config.grid(), model, config.solver_options());
            row.thresholds = extract_thresholds(solved, model);
        } catch (const ConvergenceError& e) {
            row.status = "error: no convergence";
        } catch (const std::domain_error& e) {
            row.status = std::string("error: ") + e.what();
        }
        log << "alpha=" << format_double(a) << "  " << row.status << "\n";
        rows.push_back(std::move(row));
    }
    write_file(config.output_dir / "sweep.csv", sweep_csv(rows));
    return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
    std::string s = "alpha,pi_star,pi_double_star,pi_hat_star,status\n";
    for (const auto& r : rows) {
        std::string status = r.status;
        std::replace(status.begin(), status.end(), ',', ';');
        s += format_double(r.alpha) + ",";
        if (r.thresholds)
            s += format_optional(r.thresholds->pi_star) + "," + format_optional(r.thresholds->pi_double_star) +
                 "," + format_optional(r.thresholds->pi_hat_star);
        else
            s += "NA,NA,NA";
        s += "," + status + "\n";
    }
    return s;
}

int exit_code_for_current_exception(std::ostream& err) {
    try {
        throw;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const ParameterError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    } catch (const ConvergenceError& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const std::domain_error& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const InvariantViolation& e) {
        err << "numerical failure: " << e.what() << "\n";
        return kNumericalFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kValidationError;
    }
}

} // namespace riskfusion::cli
