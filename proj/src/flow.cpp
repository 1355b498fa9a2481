#include "flowembed/flow.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace flowembed {

namespace {

// Dormand-Prince 5(4) coefficients (FSAL). The rationals evaluate to
// correctly rounded doubles.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;

constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0,
                 a53 = 64448.0 / 6561.0, a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
// 5th-order weights (also the FSAL row).
constexpr double b1 = 35.0 / 384.0, b3 = 500.0 / 1113.0, b4 = 125.0 / 192.0,
                 b5 = -2187.0 / 6784.0, b6 = 11.0 / 84.0;
// b - bhat: coefficients of the embedded error estimate.
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;

// PI step-size controller constants (order 5 pair).
constexpr double kSafety = 0.9;
constexpr double kBeta = 0.04;
constexpr double kExpo = 0.2 - kBeta * 0.75;
constexpr double kMaxShrink = 5.0;  // factor limits per step
constexpr double kMaxGrow = 10.0;

struct Stages {
    CVec k1, k2, k3, k4, k5, k6, k7;
};

CVec rhs(const InterpField& field, const CVec& y) {
    try {
        return field_eval(field, Point(y));
    } catch (const std::invalid_argument& e) {
        throw EvalError(std::string("field evaluation failed: ") + e.what());
    }
}

CVec combine(const CVec& y, double h, std::initializer_list<std::pair<double, const CVec*>> terms) {
    CVec out = y;
    for (const auto& [w, k] : terms)
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += h * w * (*k)[i];
    return out;
}

// One DOPRI5 step from y with k1 = X(y) already known. Returns the
// 5th-order solution and the embedded error estimate.
void dopri5_step(const InterpField& field, const CVec& y, double h, Stages& s,
                 CVec& y_new, CVec& err_vec) {
    s.k2 = rhs(field, combine(y, h, {{a21, &s.k1}}));
    s.k3 = rhs(field, combine(y, h, {{a31, &s.k1}, {a32, &s.k2}}));
    s.k4 = rhs(field, combine(y, h, {{a41, &s.k1}, {a42, &s.k2}, {a43, &s.k3}}));
    s.k5 = rhs(field, combine(y, h, {{a51, &s.k1}, {a52, &s.k2}, {a53, &s.k3}, {a54, &s.k4}}));
    s.k6 = rhs(field, combine(y, h, {{a61, &s.k1}, {a62, &s.k2}, {a63, &s.k3}, {a64, &s.k4},
                                     {a65, &s.k5}}));
    y_new = combine(y, h, {{b1, &s.k1}, {b3, &s.k3}, {b4, &s.k4}, {b5, &s.k5}, {b6, &s.k6}});
    s.k7 = rhs(field, y_new);

    err_vec.assign(y.size(), Complex(0.0, 0.0));
    for (std::size_t i = 0; i < y.size(); ++i)
        err_vec[i] = h * (e1 * s.k1[i] + e3 * s.k3[i] + e4 * s.k4[i] + e5 * s.k5[i] +
                          e6 * s.k6[i] + e7 * s.k7[i]);
}

double error_ratio(const CVec& err_vec, const CVec& y, const CVec& y_new,
                   const IntegratorConfig& cfg) {
    double worst = 0.0;
    for (std::size_t i = 0; i < err_vec.size(); ++i) {
        const double scale =
            cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
        worst = std::max(worst, std::abs(err_vec[i]) / scale);
    }
    return worst;
}

void validate(const IntegratorConfig& cfg) {
    if (!(cfg.abs_tol > 0) || cfg.abs_tol > 1e-3)
        throw std::invalid_argument("IntegratorConfig: abs_tol must lie in (0, 1e-3]");
    if (!(cfg.rel_tol > 0) || cfg.rel_tol > 1e-3)
        throw std::invalid_argument("IntegratorConfig: rel_tol must lie in (0, 1e-3]");
    if (cfg.max_steps < 10)
        throw std::invalid_argument("IntegratorConfig: max_steps must be >= 10");
    if (!(cfg.min_step > 0))
        throw std::invalid_argument("IntegratorConfig: min_step must be positive");
}

}  // namespace

FlowResult flow_to_time(const InterpField& field, const Point& x0, double t_final,
                        const IntegratorConfig& cfg, const Domain& guard) {
    validate(cfg);
    if (field.order < 1) throw std::invalid_argument("flow: field order must be >= 1");
    if (!(t_final >= 0) || !std::isfinite(t_final))
        throw std::invalid_argument("flow: t_final must be finite and >= 0");
    const double inflation = guard.delta / 3.0;
    if (!guard.contains_inflated(x0, inflation))
        throw std::invalid_argument("flow: x0 lies outside the guarded region");

    FlowResult result{x0};
    if (t_final == 0.0) return result;

    CVec y = x0.coords;
    Stages s;
    s.k1 = rhs(field, y);
    double t = 0.0;
    double h = t_final;  // near-identity fields usually accept large steps
    double facold = 1e-4;
    bool rejected_last = false;
    long attempts = 0;
    CVec y_new, err_vec;

    while (t < t_final) {
        if (++attempts > cfg.max_steps)
            throw MaxStepsExceeded("flow: exceeded max_steps = " + std::to_string(cfg.max_steps));

        bool last = false;
        if (t + h >= t_final) {
            h = t_final - t;
            last = true;
        } else if (h < cfg.min_step) {
            throw StepUnderflow("flow: step size " + std::to_string(h) +
                                " fell below min_step at t = " + std::to_string(t));
        }

        dopri5_step(field, y, h, s, y_new, err_vec);
        const double err = error_ratio(err_vec, y, y_new, cfg);

        const double fac11 = std::pow(err, kExpo);
        double fac = fac11 / std::pow(facold, kBeta);
        fac = std::max(1.0 / kMaxGrow, std::min(kMaxShrink, fac / kSafety));
        double h_next = h / fac;

        if (err <= 1.0) {
            facold = std::max(err, 1e-4);
            result.est_global_error += inf_norm(err_vec);
            ++result.accepted_steps;

            Point candidate{y_new};
            if (!guard.contains_inflated(candidate, inflation)) {
                result.escaped = true;  // endpoint stays at the last in-domain state
                result.endpoint = Point(y);
                return result;
            }

            t += h;
            y = y_new;
            s.k1 = s.k7;  // FSAL
            if (last || t >= t_final) break;
            if (rejected_last) h_next = std::min(h_next, h);
            rejected_last = false;
            h = h_next;
        } else {
            ++result.rejected_steps;
            rejected_last = true;
            h = h / std::min(kMaxShrink, fac11 / kSafety);
        }
    }

    result.endpoint = Point(y);
    return result;
}

FlowResult flow_time_one(const InterpField& field, const Point& x0,
                         const IntegratorConfig& cfg, const Domain& guard) {
    return flow_to_time(field, x0, 1.0, cfg, guard);
}

FlowResult flow_time_one_verified(const InterpField& field, const Point& x0,
                                  const IntegratorConfig& cfg, const Domain& guard) {
    FlowResult coarse = flow_time_one(field, x0, cfg, guard);
    IntegratorConfig tight = cfg;
    tight.abs_tol /= 100.0;
    tight.rel_tol /= 100.0;
    FlowResult fine = flow_time_one(field, x0, tight, guard);

    if (coarse.escaped || fine.escaped) {
        FlowResult out = fine.escaped ? fine : coarse;
        out.escaped = true;
        return out;
    }

    const double discrepancy = inf_dist(coarse.endpoint.coords, fine.endpoint.coords);
    if (discrepancy > 100.0 * cfg.abs_tol)
        throw FlowNonConvergence("flow verification: endpoints differ by " +
                                 std::to_string(discrepancy) + " (> 100 * abs_tol)");
    FlowResult out = fine;
    out.est_global_error = discrepancy;
    return out;
}

Point rk_fixed_steps(const InterpField& field, const Point& x0, double t_final, int steps) {
    if (steps < 1) throw std::invalid_argument("rk_fixed_steps: steps must be >= 1");
    const double h = t_final / static_cast<double>(steps);
    CVec y = x0.coords;
    Stages s;
    CVec y_new, err_vec;
    for (int i = 0; i < steps; ++i) {
        s.k1 = rhs(field, y);
        dopri5_step(field, y, h, s, y_new, err_vec);
        y = y_new;
    }
    return Point(y);
}

}  // namespace flowembed
