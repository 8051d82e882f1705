#pragma once
// Flat dotted-key run configuration.
//
// A config file is "key = value" lines (# comments, blank lines ignored);
// command-line flags override file values key by key. Unknown keys are
// rejected by name. The resolved configuration renders back to the same
// format with a stable key order, and that echo reloads to an identical run.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fairpol/lp.hpp"
#include "fairpol/nuisance.hpp"
#include "fairpol/policy.hpp"
#include "fairpol/unfairness.hpp"

namespace fairpol {

struct RunConfig {
    std::string command;  // estimate | frontier | simulate | evaluate
    std::string data_path;
    std::string output_dir = ".";
    std::uint64_t seed = 71406201;
    int threads = 1;

    PolicyClass policy;
    UnfairnessKind measure = UnfairnessKind::PredictionDisparity;
    bool measure_absolute = false;
    EnvySecondTerm envy_second_term = EnvySecondTerm::AsPrinted;

    int folds = 5;
    double ridge = 0.1;
    double clip = 0.01;
    Pooling pooling = Pooling::Separate;

    std::optional<int> grid_n;       // frontier.grid_n override
    std::optional<double> lambda_;   // frontier.lambda; default lambda/sqrt(n) = 1e-6
    double resolve_lambda(std::size_t n) const;

    SolverLimits solver;

    std::size_t sim_n = 400;
    int sim_replications = 100;
    double sim_p1 = 0.5;
    int sim_support = 40;
    double sim_noise_sd = 1.0;
    std::vector<std::string> sim_methods{"fpt", "ewm", "constrained_ewm"};
    std::vector<double> kappas{1.0, 10.0};
    std::optional<double> omega;  // ewm weight; defaults to the group-1 share

    std::optional<RuleCoefficients> eval_coefficients;  // evaluate.* block
};

/// Reads one config file into a key-value map (later duplicates win).
std::map<std::string, std::string> read_config_file(const std::string& path);

/// Applies flag overrides (same key names) on top of file values.
void apply_overrides(std::map<std::string, std::string>& kv,
                     const std::vector<std::pair<std::string, std::string>>& overrides);

/// Validates and types the flat map. Throws ConfigError naming any unknown
/// key or out-of-range value.
RunConfig parse_config(const std::map<std::string, std::string>& kv);

/// Stable-order "key = value" rendering; reloading it reproduces the run.
/// Serializes the resolved configuration in parse_config's key = value
/// format. `include_output_dir` distinguishes the standalone echo file (which
/// records where the run wrote) from the copy embedded in analysis documents,
/// which must stay byte-identical across output locations.
std::string render_config(const RunConfig& rc, bool include_output_dir = true);

}  // namespace fairpol
