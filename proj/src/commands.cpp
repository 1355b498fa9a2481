#include "flowembed/commands.hpp"

#include <algorithm>
#include <cmath>

namespace flowembed::cmd {

namespace {

csv::Table base_table(const ExperimentConfig& cfg, const std::string& command) {
    csv::Table t;
    t.metadata.emplace_back("command", command);
    for (auto& kv : flatten_config(cfg)) t.metadata.push_back(std::move(kv));
    return t;
}

}  // namespace

CommandResult certify(const ExperimentConfig& cfg) {
    csv::Table t = base_table(cfg, "certify");
    t.header = {"m", "epsilon_used", "delta", "measured_error", "bound_poly", "bound_exp",
                "n_samples", "integrator_discrepancy", "tolerance_limited", "satisfied"};

    const SweepResult sweep =
        order_sweep(AnyMap{cfg.map}, cfg.domain, cfg.certify_config(), cfg.run.m_max);

    bool violation = false, runtime_failure = false;
    for (const ErrorReport& r : sweep.reports) {
        if (!r.note.empty()) runtime_failure = true;
        if (r.note.empty() && !r.tolerance_limited && !r.satisfied()) violation = true;
        t.rows.push_back({std::to_string(r.m), csv::format_double(r.epsilon_used),
                          csv::format_double(r.delta), csv::format_double(r.measured_error),
                          csv::format_double(r.bound_poly), csv::format_optional(r.bound_exp),
                          std::to_string(r.n_samples),
                          csv::format_double(r.integrator_discrepancy),
                          csv::format_bool(r.tolerance_limited), csv::format_bool(r.satisfied())});
    }

    int code = kExitOk;
    if (violation) code = kExitViolation;
    if (runtime_failure) code = kExitRuntime;
    return {std::move(t), code};
}

CommandResult mu_check(const ExperimentConfig& cfg) {
    csv::Table t = base_table(cfg, "mu-check");
    t.header = {"m", "mu0", "E_mu0", "E_half", "E_quarter", "observed_order", "inconclusive"};

    bool violation = false;
    for (int m : cfg.run.m_values) {
        const OrderEstimate est = mu_order_check(cfg.map, m, cfg.domain, cfg.certify_config(),
                                                 cfg.run.sample_count, cfg.run.mu0);
        if (!est.inconclusive &&
            std::abs(est.observed_order - static_cast<double>(m + 1)) > cfg.run.order_tol)
            violation = true;
        t.rows.push_back({std::to_string(est.m), csv::format_double(est.mu_values[0]),
                          csv::format_double(est.errors[0]), csv::format_double(est.errors[1]),
                          csv::format_double(est.errors[2]),
                          csv::format_double(est.observed_order),
                          csv::format_bool(est.inconclusive)});
    }
    return {std::move(t), violation ? kExitViolation : kExitOk};
}

CommandResult field_export(const ExperimentConfig& cfg) {
    csv::Table t = base_table(cfg, "field-export");
    const int n = cfg.domain.dim();
    for (int i = 0; i < n; ++i) t.header.push_back("x" + std::to_string(i));
    for (int i = 0; i < n; ++i) t.header.push_back("X" + std::to_string(i));
    t.header.push_back("m");

    const std::vector<Point> pts = real_grid(cfg.domain, cfg.grid);
    for (int m : cfg.run.m_values) {
        const InterpField field{AnyMap{cfg.map}, m};
        for (const Point& x : pts) {
            const CVec value = field_eval(field, x);
            std::vector<std::string> row;
            row.reserve(static_cast<std::size_t>(2 * n + 1));
            for (int i = 0; i < n; ++i) row.push_back(csv::format_double(x.coords[i].real()));
            for (int i = 0; i < n; ++i) row.push_back(csv::format_double(value[i].real()));
            row.push_back(std::to_string(m));
            t.rows.push_back(std::move(row));
        }
    }
    return {std::move(t), kExitOk};
}

CommandResult slope(const ExperimentConfig& cfg) {
    csv::Table t = base_table(cfg, "slope");
    t.header = {"m", "h", "epsilon_est", "measured_error", "fitted_slope"};

    const auto* euler = std::get_if<EulerStep>(&cfg.map.family);
    if (!euler)
        throw ConfigError("slope requires map.family = euler_step (the h sweep rescales its "
                          "displacement)");

    bool violation = false;
    for (int m : cfg.run.m_values) {
        const SlopeResult result = epsilon_slope_check(euler->field, m, cfg.domain,
                                                       cfg.certify_config(), cfg.run.h_values);
        if (std::abs(result.slope - static_cast<double>(m + 1)) > cfg.run.slope_tol)
            violation = true;
        for (const SlopeRow& row : result.rows)
            t.rows.push_back({std::to_string(m), csv::format_double(row.h),
                              csv::format_double(row.epsilon_used),
                              csv::format_double(row.measured_error),
                              csv::format_double(result.slope)});
    }
    return {std::move(t), violation ? kExitViolation : kExitOk};
}

}  // namespace flowembed::cmd
