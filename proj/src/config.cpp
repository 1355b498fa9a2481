#include "flowembed/config.hpp"

#include <cmath>
#include <sstream>

#include <json.hpp>

#include "flowembed/csv.hpp"

namespace flowembed {

using nlohmann::json;

CertifyConfig ExperimentConfig::certify_config() const {
    CertifyConfig cfg;
    cfg.grid = grid;
    cfg.integrator = integrator;
    cfg.safety_factor = run.safety_factor;
    cfg.epsilon_override = run.epsilon_override;
    return cfg;
}

namespace {

json default_json() {
    return json{
        {"map",
         {{"family", "identity"},
          {"dimension", 1},
          {"c", json::array()},
          {"lambda", 1.0},
          {"field", "pendulum"},
          {"h", 0.01},
          {"eps_p", 0.01}}},
        {"domain", {{"lower", {-1.0}}, {"upper", {1.0}}, {"delta", 0.5}}},
        {"grid", {{"real_points_per_axis", 21}, {"complex_ring_samples", 8}}},
        {"integrator",
         {{"abs_tol", 1e-13}, {"rel_tol", 1e-13}, {"max_steps", 100000}, {"min_step", 1e-12}}},
        {"run",
         {{"m_max", 0},
          {"m_values", {1, 2, 3}},
          {"mu0", 0.25},
          {"sample_count", 9},
          {"h_values", json::array()},
          {"safety_factor", 1.25},
          {"epsilon_override", nullptr},
          {"fd_step", 1e-5},
          {"order_tol", 0.5},
          {"slope_tol", 0.3},
          {"output", ""}}}};
}

void merge_checked(json& base, const json& user, const std::string& path) {
    for (auto it = user.begin(); it != user.end(); ++it) {
        const std::string key_path = path.empty() ? it.key() : path + "." + it.key();
        if (!base.contains(it.key()))
            throw ConfigError("unknown configuration key: " + key_path);
        if (base[it.key()].is_object() && it->is_object())
            merge_checked(base[it.key()], *it, key_path);
        else
            base[it.key()] = *it;
    }
}

void apply_override(json& root, const std::string& entry) {
    const std::size_t eq = entry.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override must look like key.path=value: " + entry);
    const std::string path = entry.substr(0, eq);
    const std::string raw = entry.substr(eq + 1);

    json* node = &root;
    std::istringstream is(path);
    std::string part;
    std::vector<std::string> parts;
    while (std::getline(is, part, '.')) parts.push_back(part);
    if (parts.empty()) throw ConfigError("override has an empty key path: " + entry);
    for (std::size_t i = 0; i + 1 < parts.size(); ++i) {
        if (!node->contains(parts[i]) || !(*node)[parts[i]].is_object())
            throw ConfigError("override path does not exist: " + path);
        node = &(*node)[parts[i]];
    }
    if (!node->contains(parts.back()))
        throw ConfigError("override path does not exist: " + path);

    json value = json::parse(raw, nullptr, false);
    if (value.is_discarded()) value = raw;  // plain string value
    (*node)[parts.back()] = value;
}

template <typename T>
T get_as(const json& j, const std::string& key, const char* what) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + "." + key + ": " + e.what());
    }
}

MapSpec build_map(const json& j) {
    const std::string family = get_as<std::string>(j, "family", "map");
    try {
        if (family == "identity") return MapSpec::identity(get_as<int>(j, "dimension", "map"));
        if (family == "translation")
            return MapSpec::translation(get_as<std::vector<double>>(j, "c", "map"));
        if (family == "linear_scalar")
            return MapSpec::linear_scalar(get_as<double>(j, "lambda", "map"));
        if (family == "euler_step")
            return MapSpec::euler_step(builtin_field_from_name(get_as<std::string>(j, "field", "map")),
                                       get_as<double>(j, "h", "map"));
        if (family == "std_symplectic")
            return MapSpec::std_symplectic(get_as<double>(j, "eps_p", "map"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("map: ") + e.what());
    }
    throw ConfigError("map.family must be one of identity, translation, linear_scalar, "
                      "euler_step, std_symplectic (got '" + family + "')");
}

}  // namespace

ExperimentConfig load_config(const std::string& json_text,
                             const std::vector<std::string>& overrides) {
    json root = default_json();
    json user = json::parse(json_text, nullptr, false);
    if (user.is_discarded()) throw ConfigError("configuration is not valid JSON");
    if (!user.is_object()) throw ConfigError("configuration root must be a JSON object");
    merge_checked(root, user, "");
    for (const std::string& ov : overrides) apply_override(root, ov);

    ExperimentConfig cfg;
    cfg.map = build_map(root["map"]);

    const json& jd = root["domain"];
    try {
        cfg.domain = Domain(get_as<std::vector<double>>(jd, "lower", "domain"),
                            get_as<std::vector<double>>(jd, "upper", "domain"),
                            get_as<double>(jd, "delta", "domain"));
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }
    if (cfg.domain.dim() != cfg.map.dimension())
        throw ConfigError("domain dimension " + std::to_string(cfg.domain.dim()) +
                          " does not match map dimension " + std::to_string(cfg.map.dimension()));

    const json& jg = root["grid"];
    cfg.grid.real_points_per_axis = get_as<int>(jg, "real_points_per_axis", "grid");
    cfg.grid.complex_ring_samples = get_as<int>(jg, "complex_ring_samples", "grid");
    if (cfg.grid.real_points_per_axis < 2)
        throw ConfigError("grid.real_points_per_axis must be >= 2");
    if (cfg.grid.complex_ring_samples < 0)
        throw ConfigError("grid.complex_ring_samples must be >= 0");

    const json& ji = root["integrator"];
    cfg.integrator.abs_tol = get_as<double>(ji, "abs_tol", "integrator");
    cfg.integrator.rel_tol = get_as<double>(ji, "rel_tol", "integrator");
    cfg.integrator.max_steps = get_as<int>(ji, "max_steps", "integrator");
    cfg.integrator.min_step = get_as<double>(ji, "min_step", "integrator");
    if (!(cfg.integrator.abs_tol > 0) || cfg.integrator.abs_tol > 1e-3 ||
        !(cfg.integrator.rel_tol > 0) || cfg.integrator.rel_tol > 1e-3)
        throw ConfigError("integrator tolerances must lie in (0, 1e-3]");
    if (cfg.integrator.max_steps < 10) throw ConfigError("integrator.max_steps must be >= 10");
    if (!(cfg.integrator.min_step > 0)) throw ConfigError("integrator.min_step must be positive");

    const json& jr = root["run"];
    cfg.run.m_max = get_as<int>(jr, "m_max", "run");
    cfg.run.m_values = get_as<std::vector<int>>(jr, "m_values", "run");
    cfg.run.mu0 = get_as<double>(jr, "mu0", "run");
    cfg.run.sample_count = get_as<int>(jr, "sample_count", "run");
    cfg.run.h_values = get_as<std::vector<double>>(jr, "h_values", "run");
    cfg.run.safety_factor = get_as<double>(jr, "safety_factor", "run");
    if (!jr.at("epsilon_override").is_null())
        cfg.run.epsilon_override = get_as<double>(jr, "epsilon_override", "run");
    cfg.run.fd_step = get_as<double>(jr, "fd_step", "run");
    cfg.run.order_tol = get_as<double>(jr, "order_tol", "run");
    cfg.run.slope_tol = get_as<double>(jr, "slope_tol", "run");
    cfg.run.output = get_as<std::string>(jr, "output", "run");

    if (cfg.run.m_max < 0) throw ConfigError("run.m_max must be >= 0");
    for (int m : cfg.run.m_values)
        if (m < 1) throw ConfigError("run.m_values entries must be >= 1");
    if (!(cfg.run.mu0 > 0)) throw ConfigError("run.mu0 must be positive");
    if (cfg.run.sample_count < 1) throw ConfigError("run.sample_count must be >= 1");
    if (!(cfg.run.safety_factor >= 1.0)) throw ConfigError("run.safety_factor must be >= 1");
    if (cfg.run.epsilon_override && !(*cfg.run.epsilon_override >= 0))
        throw ConfigError("run.epsilon_override must be >= 0");
    if (!(cfg.run.fd_step > 0)) throw ConfigError("run.fd_step must be positive");
    if (!(cfg.run.order_tol > 0) || !(cfg.run.slope_tol > 0))
        throw ConfigError("run.order_tol and run.slope_tol must be positive");

    return cfg;
}

std::vector<std::pair<std::string, std::string>> flatten_config(const ExperimentConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> out;
    auto add = [&out](const std::string& key, const std::string& value) {
        out.emplace_back(key, value);
    };
    auto add_d = [&add](const std::string& key, double v) { add(key, csv::format_double(v)); };
    auto add_vec = [&add](const std::string& key, const std::vector<double>& v) {
        std::string s = "[";
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) s += ",";
            s += csv::format_double(v[i]);
        }
        add(key, s + "]");
    };

    add("map.family", cfg.map.family_name());
    std::visit(
        [&](const auto& fam) {
            using T = std::decay_t<decltype(fam)>;
            if constexpr (std::is_same_v<T, Identity>) {
                add("map.dimension", std::to_string(fam.dimension));
            } else if constexpr (std::is_same_v<T, Translation>) {
                add_vec("map.c", fam.shift);
            } else if constexpr (std::is_same_v<T, LinearScalar>) {
                add_d("map.lambda", fam.lambda);
            } else if constexpr (std::is_same_v<T, EulerStep>) {
                add("map.field", builtin_field_name(fam.field));
                add_d("map.h", fam.step);
            } else {
                add_d("map.eps_p", fam.kick);
            }
        },
        cfg.map.family);

    add_vec("domain.lower", cfg.domain.lower);
    add_vec("domain.upper", cfg.domain.upper);
    add_d("domain.delta", cfg.domain.delta);
    add("grid.real_points_per_axis", std::to_string(cfg.grid.real_points_per_axis));
    add("grid.complex_ring_samples", std::to_string(cfg.grid.complex_ring_samples));
    add_d("integrator.abs_tol", cfg.integrator.abs_tol);
    add_d("integrator.rel_tol", cfg.integrator.rel_tol);
    add("integrator.max_steps", std::to_string(cfg.integrator.max_steps));
    add_d("integrator.min_step", cfg.integrator.min_step);
    add("run.m_max", std::to_string(cfg.run.m_max));
    {
        std::string s = "[";
        for (std::size_t i = 0; i < cfg.run.m_values.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(cfg.run.m_values[i]);
        }
        add("run.m_values", s + "]");
    }
    add_d("run.mu0", cfg.run.mu0);
    add("run.sample_count", std::to_string(cfg.run.sample_count));
    add_vec("run.h_values", cfg.run.h_values);
    add_d("run.safety_factor", cfg.run.safety_factor);
    add("run.epsilon_override",
        cfg.run.epsilon_override ? csv::format_double(*cfg.run.epsilon_override) : "none");
    add_d("run.fd_step", cfg.run.fd_step);
    add_d("run.order_tol", cfg.run.order_tol);
    add_d("run.slope_tol", cfg.run.slope_tol);
    add("run.output", cfg.run.output.empty() ? "-" : cfg.run.output);
    return out;
}

void validate_for_command(const ExperimentConfig& cfg, const std::string& command) {
    if (command == "certify") {
        // Bound certification stands on the admissibility hypothesis;
        // reject configurations that violate it outright.
        const double eps_used = cfg.run.epsilon_override
                                    ? *cfg.run.epsilon_override
                                    : estimate_epsilon(AnyMap{cfg.map}, cfg.domain, cfg.grid) *
                                          cfg.run.safety_factor;
        if (eps_used > 0.0) {
            const OrderPlan plan = plan_order(eps_used, cfg.domain.delta);
            if (!plan.admissible) {
                std::ostringstream os;
                os << "certify requires epsilon/delta <= 1/(6e): got ratio "
                   << csv::format_double(plan.ratio) << " > "
                   << csv::format_double(admissibility_threshold())
                   << " (epsilon_used = " << csv::format_double(eps_used)
                   << ", delta = " << csv::format_double(cfg.domain.delta) << ")";
                throw ConfigError(os.str());
            }
        }
    } else if (command == "mu-check") {
        const double eps_used = cfg.run.epsilon_override
                                    ? *cfg.run.epsilon_override
                                    : estimate_epsilon(AnyMap{cfg.map}, cfg.domain, cfg.grid) *
                                          cfg.run.safety_factor;
        if (eps_used > 0.0) {
            for (int m : cfg.run.m_values) {
                const double radius = mu_radius(eps_used, cfg.domain.delta, m);
                if (cfg.run.mu0 > radius / 8.0)
                    throw ConfigError("mu-check requires mu0 <= mu_m/8; for m = " +
                                      std::to_string(m) + " that is " +
                                      csv::format_double(radius / 8.0));
            }
        }
    } else if (command == "slope") {
        if (!std::holds_alternative<EulerStep>(cfg.map.family))
            throw ConfigError("slope requires map.family = euler_step (the h sweep rescales "
                              "its displacement)");
        if (cfg.run.h_values.size() < 3)
            throw ConfigError("slope requires run.h_values with at least 3 entries in "
                              "geometric progression");
    } else if (command != "field-export") {
        throw ConfigError("unknown command: " + command);
    }
}

}  // namespace flowembed
