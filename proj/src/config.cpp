#include "fairpol/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "fairpol/errors.hpp"

namespace fairpol {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double to_double(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const double x = std::stod(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
    }
}

long to_long(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const long x = std::stol(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return x;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects an integer, got '" + v + "'");
    }
}

std::uint64_t to_uint64(const std::string& key, const std::string& v) {
    try {
        std::size_t used = 0;
        const unsigned long long x = std::stoull(v, &used);
        if (used != v.size()) throw std::invalid_argument(v);
        return static_cast<std::uint64_t>(x);
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "' expects an unsigned integer, got '" + v +
                          "'");
    }
}

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + key + "' expects true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
    std::vector<std::string> parts;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) parts.push_back(item);
    }
    return parts;
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "command", "data", "output_dir", "seed", "threads",
        "policy.kind", "policy.use_attribute", "policy.b_max", "policy.capacity",
        "measure.kind", "measure.absolute", "measure.envy_second_term",
        "estimation.folds", "estimation.ridge", "estimation.clip", "estimation.pooling",
        "frontier.grid_n", "frontier.lambda",
        "solver.max_seconds", "solver.max_nodes", "solver.target_gap",
        "sim.n", "sim.replications", "sim.p1", "sim.support", "sim.noise_sd", "sim.methods",
        "sim.kappas",
        "ewm.omega",
        "evaluate.beta0", "evaluate.beta1", "evaluate.phi", "evaluate.p1", "evaluate.p0",
    };
    return keys;
}

std::string format_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

}  // namespace

double RunConfig::resolve_lambda(std::size_t n) const {
    if (lambda_) return *lambda_;
    // Default slackness of order 1e-6: lambda / sqrt(n) = 1e-6.
    return 1e-6 * std::sqrt(static_cast<double>(n));
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::map<std::string, std::string> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) +
                              ": expected 'key = value'");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config file '" + path + "' line " + std::to_string(line_no) +
                              ": empty key");
        }
        kv[key] = value;
    }
    return kv;
}

void apply_overrides(std::map<std::string, std::string>& kv,
                     const std::vector<std::pair<std::string, std::string>>& overrides) {
    for (const auto& [key, value] : overrides) kv[key] = value;
}

RunConfig parse_config(const std::map<std::string, std::string>& kv) {
    for (const auto& [key, value] : kv) {
        (void)value;
        if (known_keys().count(key) == 0) {
            throw ConfigError("unknown config key '" + key + "'");
        }
    }
    auto get = [&](const char* key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end() || it->second.empty()) return {};
        return it->second;
    };

    RunConfig rc;
    if (auto v = get("command")) {
        if (*v != "estimate" && *v != "frontier" && *v != "simulate" && *v != "evaluate") {
            throw ConfigError("config key 'command' must be one of estimate, frontier, "
                              "simulate, evaluate; got '" + *v + "'");
        }
        rc.command = *v;
    }
    if (auto v = get("data")) rc.data_path = *v;
    if (auto v = get("output_dir")) rc.output_dir = *v;
    if (auto v = get("seed")) rc.seed = to_uint64("seed", *v);
    if (auto v = get("threads")) {
        rc.threads = static_cast<int>(to_long("threads", *v));
        if (rc.threads < 1) throw ConfigError("config key 'threads' must be at least 1");
    }

    if (auto v = get("policy.kind")) rc.policy.kind = policy_kind_from_string(*v);
    if (auto v = get("policy.use_attribute")) {
        rc.policy.use_attribute = to_bool("policy.use_attribute", *v);
    }
    if (auto v = get("policy.b_max")) {
        rc.policy.coefficient_box = to_double("policy.b_max", *v);
        if (!(rc.policy.coefficient_box > 0.0)) {
            throw ConfigError("config key 'policy.b_max' must be positive");
        }
    }
    if (auto v = get("policy.capacity")) {
        const double cap = to_double("policy.capacity", *v);
        if (!(cap > 0.0)) throw ConfigError("config key 'policy.capacity' must be positive");
        rc.policy.capacity = cap;
    }

    if (auto v = get("measure.kind")) rc.measure = unfairness_kind_from_string(*v);
    if (auto v = get("measure.absolute")) rc.measure_absolute = to_bool("measure.absolute", *v);
    if (auto v = get("measure.envy_second_term")) {
        rc.envy_second_term = envy_second_term_from_string(*v);
    }

    if (auto v = get("estimation.folds")) {
        rc.folds = static_cast<int>(to_long("estimation.folds", *v));
        if (rc.folds < 2) throw ConfigError("config key 'estimation.folds' must be at least 2");
    }
    if (auto v = get("estimation.ridge")) {
        rc.ridge = to_double("estimation.ridge", *v);
        if (rc.ridge < 0.0) throw ConfigError("config key 'estimation.ridge' must be >= 0");
    }
    if (auto v = get("estimation.clip")) {
        rc.clip = to_double("estimation.clip", *v);
        if (!(rc.clip > 0.0 && rc.clip < 0.5)) {
            throw ConfigError("config key 'estimation.clip' must lie in (0, 0.5)");
        }
    }
    if (auto v = get("estimation.pooling")) rc.pooling = pooling_from_string(*v);

    if (auto v = get("frontier.grid_n")) {
        const long N = to_long("frontier.grid_n", *v);
        if (N < 1) throw ConfigError("config key 'frontier.grid_n' must be at least 1");
        rc.grid_n = static_cast<int>(N);
    }
    if (auto v = get("frontier.lambda")) {
        const double lam = to_double("frontier.lambda", *v);
        if (lam < 0.0) throw ConfigError("config key 'frontier.lambda' must be >= 0");
        rc.lambda_ = lam;
    }

    if (auto v = get("solver.max_seconds")) {
        rc.solver.max_seconds = to_double("solver.max_seconds", *v);
        if (!(rc.solver.max_seconds > 0.0)) {
            throw ConfigError("config key 'solver.max_seconds' must be positive");
        }
    }
    if (auto v = get("solver.max_nodes")) {
        rc.solver.max_nodes = to_long("solver.max_nodes", *v);
        if (rc.solver.max_nodes < 1) {
            throw ConfigError("config key 'solver.max_nodes' must be at least 1");
        }
    }
    if (auto v = get("solver.target_gap")) {
        rc.solver.target_gap = to_double("solver.target_gap", *v);
        if (rc.solver.target_gap < 0.0) {
            throw ConfigError("config key 'solver.target_gap' must be >= 0");
        }
    }

    if (auto v = get("sim.n")) {
        const long n = to_long("sim.n", *v);
        if (n < 2) throw ConfigError("config key 'sim.n' must be at least 2");
        rc.sim_n = static_cast<std::size_t>(n);
    }
    if (auto v = get("sim.replications")) {
        rc.sim_replications = static_cast<int>(to_long("sim.replications", *v));
        if (rc.sim_replications < 1) {
            throw ConfigError("config key 'sim.replications' must be at least 1");
        }
    }
    if (auto v = get("sim.p1")) {
        rc.sim_p1 = to_double("sim.p1", *v);
        if (!(rc.sim_p1 > 0.0 && rc.sim_p1 < 1.0)) {
            throw ConfigError("config key 'sim.p1' must lie in (0,1)");
        }
    }
    if (auto v = get("sim.support")) {
        rc.sim_support = static_cast<int>(to_long("sim.support", *v));
        if (rc.sim_support < 2) throw ConfigError("config key 'sim.support' must be at least 2");
    }
    if (auto v = get("sim.noise_sd")) {
        rc.sim_noise_sd = to_double("sim.noise_sd", *v);
        if (rc.sim_noise_sd < 0.0) throw ConfigError("config key 'sim.noise_sd' must be >= 0");
    }
    if (auto v = get("sim.methods")) {
        rc.sim_methods = split_list(*v);
        if (rc.sim_methods.empty()) {
            throw ConfigError("config key 'sim.methods' must name at least one method");
        }
        for (const std::string& m : rc.sim_methods) {
            if (m != "fpt" && m != "ewm" && m != "constrained_ewm") {
                throw ConfigError("config key 'sim.methods' allows fpt, ewm, constrained_ewm; "
                                  "got '" + m + "'");
            }
        }
    }
    if (auto v = get("sim.kappas")) {
        rc.kappas.clear();
        for (const std::string& item : split_list(*v)) {
            const double k = to_double("sim.kappas", item);
            if (k < 0.0) throw ConfigError("config key 'sim.kappas' entries must be >= 0");
            rc.kappas.push_back(k);
        }
        if (rc.kappas.empty()) {
            throw ConfigError("config key 'sim.kappas' must list at least one value");
        }
    }
    if (auto v = get("ewm.omega")) {
        const double w = to_double("ewm.omega", *v);
        if (!(w > 0.0 && w < 1.0)) throw ConfigError("config key 'ewm.omega' must lie in (0,1)");
        rc.omega = w;
    }

    const bool any_eval = get("evaluate.beta0") || get("evaluate.beta1") || get("evaluate.phi") ||
                          get("evaluate.p1") || get("evaluate.p0");
    if (any_eval) {
        RuleCoefficients c;
        if (auto v = get("evaluate.beta0")) c.beta0 = to_double("evaluate.beta0", *v);
        if (auto v = get("evaluate.beta1")) c.beta1 = to_double("evaluate.beta1", *v);
        if (auto v = get("evaluate.phi")) {
            for (const std::string& item : split_list(*v)) {
                c.phi.push_back(to_double("evaluate.phi", item));
            }
        }
        if (auto v = get("evaluate.p1")) c.p1 = to_double("evaluate.p1", *v);
        if (auto v = get("evaluate.p0")) c.p0 = to_double("evaluate.p0", *v);
        rc.eval_coefficients = std::move(c);
    }
    return rc;
}

std::string render_config(const RunConfig& rc, bool include_output_dir) {
    std::ostringstream out;
    out << "command = " << rc.command << "\n";
    out << "data = " << rc.data_path << "\n";
    if (include_output_dir) out << "output_dir = " << rc.output_dir << "\n";
    out << "seed = " << rc.seed << "\n";
    out << "threads = " << rc.threads << "\n";
    out << "policy.kind = " << to_string(rc.policy.kind) << "\n";
    out << "policy.use_attribute = " << (rc.policy.use_attribute ? "true" : "false") << "\n";
    out << "policy.b_max = " << format_double(rc.policy.coefficient_box) << "\n";
    out << "policy.capacity = "
        << (rc.policy.capacity ? format_double(*rc.policy.capacity) : std::string()) << "\n";
    out << "measure.kind = " << to_string(rc.measure) << "\n";
    out << "measure.absolute = " << (rc.measure_absolute ? "true" : "false") << "\n";
    out << "measure.envy_second_term = " << to_string(rc.envy_second_term) << "\n";
    out << "estimation.folds = " << rc.folds << "\n";
    out << "estimation.ridge = " << format_double(rc.ridge) << "\n";
    out << "estimation.clip = " << format_double(rc.clip) << "\n";
    out << "estimation.pooling = " << to_string(rc.pooling) << "\n";
    out << "frontier.grid_n = " << (rc.grid_n ? std::to_string(*rc.grid_n) : std::string())
        << "\n";
    out << "frontier.lambda = " << (rc.lambda_ ? format_double(*rc.lambda_) : std::string())
        << "\n";
    out << "solver.max_seconds = " << format_double(rc.solver.max_seconds) << "\n";
    out << "solver.max_nodes = " << rc.solver.max_nodes << "\n";
    out << "solver.target_gap = " << format_double(rc.solver.target_gap) << "\n";
    out << "sim.n = " << rc.sim_n << "\n";
    out << "sim.replications = " << rc.sim_replications << "\n";
    out << "sim.p1 = " << format_double(rc.sim_p1) << "\n";
    out << "sim.support = " << rc.sim_support << "\n";
    out << "sim.noise_sd = " << format_double(rc.sim_noise_sd) << "\n";
    {
        out << "sim.methods = ";
        for (std::size_t i = 0; i < rc.sim_methods.size(); ++i) {
            out << (i ? "," : "") << rc.sim_methods[i];
        }
        out << "\n";
    }
    {
        out << "sim.kappas = ";
        for (std::size_t i = 0; i < rc.kappas.size(); ++i) {
            out << (i ? "," : "") << format_double(rc.kappas[i]);
        }
        out << "\n";
    }
    out << "ewm.omega = " << (rc.omega ? format_double(*rc.omega) : std::string()) << "\n";
    if (rc.eval_coefficients) {
        const RuleCoefficients& c = *rc.eval_coefficients;
        out << "evaluate.beta0 = " << format_double(c.beta0) << "\n";
        out << "evaluate.beta1 = " << format_double(c.beta1) << "\n";
        out << "evaluate.phi = ";
        for (std::size_t i = 0; i < c.phi.size(); ++i) {
            out << (i ? "," : "") << format_double(c.phi[i]);
        }
        out << "\n";
        out << "evaluate.p1 = " << format_double(c.p1) << "\n";
        out << "evaluate.p0 = " << format_double(c.p0) << "\n";
    }
    return out.str();
}

}  // namespace fairpol
