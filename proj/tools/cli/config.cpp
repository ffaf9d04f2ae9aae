#include "cli/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "cli/format.hpp"

namespace riskfusion::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double parse_double(const std::string& field, std::string_view text) {
    text = trim(text);
    double x = 0.0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size())
        throw ConfigError(field, "expected a number, got '" + std::string(text) + "'");
    return x;
}

template <class Int>
Int parse_integer(const std::string& field, std::string_view text) {
    text = trim(text);
    Int x = 0;
    const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
    if (text.empty() || ec != std::errc{} || end != text.data() + text.size())
        throw ConfigError(field, "expected a non-negative integer, got '" + std::string(text) + "'");
    return x;
}

std::vector<double> parse_list(const std::string& field, std::string_view text) {
    std::vector<double> out;
    if (trim(text).empty()) return out;
    std::size_t start = 0;
    while (true) {
        const auto comma = text.find(',', start);
        out.push_back(parse_double(field, text.substr(start, comma - start)));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    return out;
}

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) s += ", ";
        s += format_double(xs[i]);
    }
    return s;
}

RewardCase parse_reward_case(std::string_view text) {
    text = trim(text);
    if (text == "self_interested") return RewardCase::SelfInterested;
    if (text == "altruistic") return RewardCase::Altruistic;
    throw ConfigError("reward_case", "expected self_interested or altruistic, got '" +
                                         std::string(text) + "'");
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
    static const std::map<std::string, Setter, std::less<>> table = {
        {"observation_matrix",
         [](RunConfig& c, const std::string& v) {
             const auto xs = parse_list("observation_matrix", v);
             if (xs.size() != 4)
                 throw ConfigError("observation_matrix", "expected 4 comma-separated entries (row major)");
             c.observation_matrix = {{{xs[0], xs[1]}, {xs[2], xs[3]}}};
         }},
        {"alpha", [](RunConfig& c, const std::string& v) { c.alpha = parse_double("alpha", v); }},
        {"beta", [](RunConfig& c, const std::string& v) { c.beta = parse_double("beta", v); }},
        {"rho", [](RunConfig& c, const std::string& v) { c.rho = parse_double("rho", v); }},
        {"reward_case", [](RunConfig& c, const std::string& v) { c.reward_case = parse_reward_case(v); }},
        {"epsilon", [](RunConfig& c, const std::string& v) { c.epsilon = parse_double("epsilon", v); }},
        {"grid_points",
         [](RunConfig& c, const std::string& v) { c.grid_points = parse_integer<std::size_t>("grid_points", v); }},
        {"tolerance", [](RunConfig& c, const std::string& v) { c.tolerance = parse_double("tolerance", v); }},
        {"max_iters",
         [](RunConfig& c, const std::string& v) { c.max_iters = parse_integer<std::size_t>("max_iters", v); }},
        {"horizon", [](RunConfig& c, const std::string& v) { c.horizon = parse_integer<int>("horizon", v); }},
        {"n_traces",
         [](RunConfig& c, const std::string& v) { c.n_traces = parse_integer<std::size_t>("n_traces", v); }},
        {"seed", [](RunConfig& c, const std::string& v) { c.seed = parse_integer<std::uint64_t>("seed", v); }},
        {"initial_belief",
         [](RunConfig& c, const std::string& v) { c.initial_belief = parse_double("initial_belief", v); }},
        {"alphas", [](RunConfig& c, const std::string& v) { c.alphas = parse_list("alphas", v); }},
        {"dense_prices",
         [](RunConfig& c, const std::string& v) { c.dense_prices = parse_integer<std::size_t>("dense_prices", v); }},
        {"verify_samples",
         [](RunConfig& c, const std::string& v) {
             c.verify_samples = parse_integer<std::size_t>("verify_samples", v);
         }},
        {"output_dir",
         [](RunConfig& c, const std::string& v) {
             if (trim(v).empty()) throw ConfigError("output_dir", "must not be empty");
             c.output_dir = std::string(trim(v));
         }},
    };
    return table;
}

template <class F>
void check(const std::string& field, F&& f) {
    try {
        f();
    } catch (const ConfigError&) {
        throw;
    } catch (const std::exception& e) {
        throw ConfigError(field, e.what());
    }
}

} // namespace

std::string_view reward_case_key(RewardCase c) noexcept {
    return c == RewardCase::SelfInterested ? "self_interested" : "altruistic";
}

FusionModel RunConfig::model_with_alpha(double a) const {
    return FusionModel{ObservationModel(observation_matrix), RiskAversion(a),
                       ControllerParams{beta, rho, reward_case, epsilon}};
}

FusionModel RunConfig::model() const { return model_with_alpha(alpha); }

void RunConfig::validate() const {
    check("observation_matrix", [&] {
        const ObservationModel m(observation_matrix);
        if (!check_tp2(m)) throw ParameterError("matrix is not TP2 (determinant < 0)");
    });
    check("alpha", [&] { (void)RiskAversion{alpha}; });
    if (!(beta > 0.0 && beta < 1.0)) throw ConfigError("beta", "must lie in (0, 1)");
    if (!(rho >= 0.0 && rho < 1.0)) throw ConfigError("rho", "must lie in [0, 1)");
    if (!(epsilon > 0.0)) throw ConfigError("epsilon", "must be strictly positive");
    if (grid_points < 2) throw ConfigError("grid_points", "need at least 2 points");
    if (!(tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
    if (max_iters < 1) throw ConfigError("max_iters", "must be at least 1");
    if (horizon < 1) throw ConfigError("horizon", "must be at least 1");
    if (n_traces < 1) throw ConfigError("n_traces", "must be at least 1");
    check("initial_belief", [&] { (void)Belief{initial_belief}; });
    for (const double a : alphas) check("alphas", [&] { (void)RiskAversion{a}; });
    if (dense_prices < 100) throw ConfigError("dense_prices", "need at least 100 prices");
    if (verify_samples < 1) throw ConfigError("verify_samples", "must be at least 1");
}

RunConfig parse_config(std::string_view text) {
    // ini_parser only knows ';' comments; drop '#' lines first.
    std::string cleaned;
    std::size_t start = 0;
    while (start <= text.size()) {
        auto end = text.find('\n', start);
        if (end == std::string_view::npos) end = text.size();
        const auto line = text.substr(start, end - start);
        if (trim(line).rfind('#', 0) != 0) {
            cleaned.append(line);
            cleaned.push_back('\n');
        }
        start = end + 1;
    }

    boost::property_tree::ptree tree;
    std::istringstream in(cleaned);
    try {
        boost::property_tree::ini_parser::read_ini(in, tree);
    } catch (const boost::property_tree::ini_parser_error& e) {
        throw ConfigError("line " + std::to_string(e.line()), e.message());
    }

    RunConfig config;
    for (const auto& [key, node] : tree) {
        if (!node.empty()) throw ConfigError(key, "sections are not supported");
        const auto it = setters().find(key);
        if (it == setters().end()) throw ConfigError(key, "unknown key");
        it->second(config, node.data());
    }
    config.validate();
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("--config", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string emit_config(const RunConfig& c) {
    const auto& b = c.observation_matrix;
    std::ostringstream out;
    out << "observation_matrix = " << join({b[0][0], b[0][1], b[1][0], b[1][1]}) << '\n'
        << "alpha = " << format_double(c.alpha) << '\n'
        << "beta = " << format_double(c.beta) << '\n'
        << "rho = " << format_double(c.rho) << '\n'
        << "reward_case = " << reward_case_key(c.reward_case) << '\n'
        << "epsilon = " << format_double(c.epsilon) << '\n'
        << "grid_points = " << c.grid_points << '\n'
        << "tolerance = " << format_double(c.tolerance) << '\n'
        << "max_iters = " << c.max_iters << '\n'
        << "horizon = " << c.horizon << '\n'
        << "n_traces = " << c.n_traces << '\n'
        << "seed = " << c.seed << '\n'
        << "initial_belief = " << format_double(c.initial_belief) << '\n'
        << "alphas = " << join(c.alphas) << '\n'
        << "dense_prices = " << c.dense_prices << '\n'
        << "verify_samples = " << c.verify_samples << '\n'
        << "output_dir = " << c.output_dir.string() << '\n';
    return out.str();
}

} // namespace riskfusion::cli
