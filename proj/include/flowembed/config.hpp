#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flowembed/certify.hpp"

namespace flowembed {

/// Full experiment description parsed from a single JSON file. Every
/// field has a materialized default so an output header reproduces the
/// exact run.
struct ExperimentConfig {
    MapSpec map = MapSpec::identity(1);
    Domain domain{{-1.0}, {1.0}, 0.5};
    SampleGrid grid;
    IntegratorConfig integrator;

    struct Run {
        int m_max = 0;  // certify: 0 = sweep up to m_star
        std::vector<int> m_values = {1, 2, 3};
        double mu0 = 0.25;
        int sample_count = 9;
        std::vector<double> h_values;
        double safety_factor = 1.25;
        std::optional<double> epsilon_override;
        double fd_step = 1e-5;
        double order_tol = 0.5;  // mu-check: allowed |order - (m+1)|
        double slope_tol = 0.3;  // slope: allowed |slope - (m+1)|
        std::string output;      // empty = stdout
    } run;

    CertifyConfig certify_config() const;
};

/// Parses the JSON text, applying `key.path=value` overrides first.
/// Unknown keys, malformed values and violated module preconditions
/// all raise ConfigError.
ExperimentConfig load_config(const std::string& json_text,
                             const std::vector<std::string>& overrides = {});

/// Effective configuration flattened to sorted dot-path key/value pairs
/// for the output metadata block.
std::vector<std::pair<std::string, std::string>> flatten_config(
    const ExperimentConfig& cfg);

/// Command-specific precondition checks (certify rejects inadmissible
/// (epsilon, delta); mu-check validates mu0; slope needs >= 3 h values).
void validate_for_command(const ExperimentConfig& cfg, const std::string& command);

}  // namespace flowembed
