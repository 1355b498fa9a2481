// Acceptance suite: end-to-end checks of the embedding-error machinery
// at desk scale. Each test prints one PASS/FAIL line.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <vector>

#include "flowembed/certify.hpp"

using namespace flowembed;

namespace {

class Criterion {
public:
    Criterion(int id, const char* name) : id_(id), name_(name) {
        start_ = std::chrono::steady_clock::now();
    }

    void require(bool ok) { pass_ = pass_ && ok; }

    double elapsed_s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

    // Prints the verdict line; returns overall success including runtime.
    bool finish(double budget_s) {
        const double t = elapsed_s();
        const bool in_budget = t < budget_s;
        std::printf("ACCEPTANCE %02d %-28s %s  (%.2fs / %.0fs)\n", id_, name_,
                    pass_ && in_budget ? "PASS" : "FAIL", t, budget_s);
        std::fflush(stdout);
        return pass_ && in_budget;
    }

private:
    int id_;
    const char* name_;
    bool pass_ = true;
    std::chrono::steady_clock::time_point start_;
};

const Domain kPendulumDomain({-0.8, -0.8}, {0.8, 0.8}, 0.5);

CertifyConfig standard_config(int per_axis, int ring = 8) {
    CertifyConfig cfg;
    cfg.grid = SampleGrid{per_axis, ring};
    return cfg;
}

// Criterion-3 configuration and its sweep, shared by criteria 3-5.
const SweepResult& pendulum_sweep() {
    static const SweepResult sweep = order_sweep(
        AnyMap{MapSpec::euler_step(BuiltinField::Pendulum, 0.005)}, kPendulumDomain,
        standard_config(21), 0);
    return sweep;
}

}  // namespace

TEST_CASE("criterion 1: exact embedding of a translation") {
    Criterion c(1, "translation-exact-embedding");
    const Domain dom({-1.0}, {1.0}, 0.5);
    const AnyMap map{MapSpec::translation({0.01})};
    const CertifyConfig cfg = standard_config(21);
    for (int m = 1; m <= 5; ++m) {
        const ErrorReport r = measure_error(map, m, dom, cfg);
        c.require(r.measured_error <= 1e-12);
        CHECK(r.measured_error <= 1e-12);
    }
    CHECK(c.finish(1.0));
}

TEST_CASE("criterion 2: scalar-linear closed-form oracle") {
    Criterion c(2, "scalar-linear-oracle");
    // Truncated-log oracle: a = (lambda-1) - (lambda-1)^2/2 = 0.095.
    const double lambda = 1.1;
    double a = 0.0;
    for (int k = 1; k <= 2; ++k)
        a += (k % 2 == 1 ? 1.0 : -1.0) * std::pow(lambda - 1.0, k) / k;
    const double oracle = std::abs(lambda - std::exp(a));

    const Domain guard({0.5}, {1.5}, 0.5);
    const double measured = embedding_error_at(AnyMap{MapSpec::linear_scalar(lambda)}, 2,
                                               Point::real({1.0}), IntegratorConfig{}, guard);
    c.require(std::abs(measured - oracle) <= 1e-10);
    CHECK(std::abs(measured - oracle) <= 1e-10);
    CHECK(oracle == doctest::Approx(3.41e-4).epsilon(0.01));
    CHECK(c.finish(1.0));
}

TEST_CASE("criterion 3: bound satisfaction across the order sweep") {
    Criterion c(3, "bound-satisfaction");
    const SweepResult& sweep = pendulum_sweep();
    REQUIRE_FALSE(sweep.reports.empty());
    for (const ErrorReport& r : sweep.reports) {
        CHECK(r.note.empty());
        c.require(r.note.empty());
        if (r.bound_poly >= 1e-11) {
            CHECK(r.measured_error <= r.bound_poly);
            c.require(r.measured_error <= r.bound_poly);
        }
    }
    CHECK(c.finish(60.0));
}

TEST_CASE("criterion 4: field-norm bound on the shrunken domain") {
    Criterion c(4, "field-norm-bound");
    const AnyMap map{MapSpec::euler_step(BuiltinField::Pendulum, 0.005)};
    const CertifyConfig cfg = standard_config(21);
    const double eps_used = estimate_epsilon(map, kPendulumDomain, cfg.grid) * cfg.safety_factor;
    const OrderPlan plan = plan_order(eps_used, kPendulumDomain.delta);
    REQUIRE(plan.admissible);
    for (int m = 2; m <= plan.m_star; ++m) {
        const double norm = field_norm_estimate({map, m}, kPendulumDomain, cfg.grid);
        CHECK(norm <= 2.0 * eps_used);
        c.require(norm <= 2.0 * eps_used);
    }
    CHECK(c.finish(30.0));
}

TEST_CASE("criterion 5: monotone improvement with the order") {
    Criterion c(5, "monotone-improvement");
    const SweepResult& sweep = pendulum_sweep();
    for (std::size_t i = 0; i + 1 < sweep.reports.size(); ++i) {
        const ErrorReport& lo = sweep.reports[i];
        const ErrorReport& hi = sweep.reports[i + 1];
        if (hi.bound_poly < 1e-11) break;
        // Ties at the integrator floor are allowed.
        const bool ok = hi.measured_error <= lo.measured_error ||
                        hi.measured_error <= 100.0 * hi.integrator_discrepancy;
        CHECK(ok);
        c.require(ok);
    }
    CHECK(c.finish(60.0));
}

TEST_CASE("criterion 6: mu-order of agreement") {
    Criterion c(6, "mu-order-agreement");
    const MapSpec pend = MapSpec::euler_step(BuiltinField::Pendulum, 0.01);
    const CertifyConfig cfg = standard_config(21);
    for (int m : {1, 2, 3}) {
        const OrderEstimate est = mu_order_check(pend, m, kPendulumDomain, cfg, 9, 0.5);
        CHECK_FALSE(est.inconclusive);
        const bool ok = !est.inconclusive &&
                        std::abs(est.observed_order - static_cast<double>(m + 1)) <= 0.5;
        CHECK(ok);
        c.require(ok);
    }
    CHECK(c.finish(60.0));
}

TEST_CASE("criterion 7: finite-difference identities") {
    Criterion c(7, "finite-difference-identities");
    const std::vector<AnyMap> maps = {
        AnyMap{MapSpec::identity(2)},
        AnyMap{MapSpec::translation({0.01, -0.02})},
        AnyMap{MapSpec::linear_scalar(1.05)},
        AnyMap{MapSpec::euler_step(BuiltinField::Pendulum, 0.005)},
        AnyMap{MapSpec::euler_step(BuiltinField::CubicOscillator, 0.005)},
        AnyMap{MapSpec::std_symplectic(0.01)},
    };
    std::mt19937 rng(321);
    std::uniform_real_distribution<double> coord(-0.8, 0.8);

    auto close = [](const CVec& a, const CVec& b) {
        return inf_dist(a, b) <= std::max(1e-15, 1e-13 * std::max(inf_norm(a), inf_norm(b)));
    };

    for (const AnyMap& map : maps) {
        const int n = dimension(map);
        for (int trial = 0; trial < 100; ++trial) {
            std::vector<double> xs(n);
            for (double& v : xs) v = coord(rng);
            const Point x = Point::real(xs);
            std::vector<Point> ys = orbit(map, x, 10);
            for (int k = 1; k <= 10; ++k) {
                const CVec rec = delta(map, x, k);
                const CVec bin = delta_binomial(map, x, k);
                // Forward-difference identity, accumulated in long double.
                CVec fwd(static_cast<std::size_t>(n));
                for (std::size_t comp = 0; comp < fwd.size(); ++comp) {
                    long double re = 0.0L, im = 0.0L;
                    for (int j = 0; j <= k - 1; ++j) {
                        const long double w = ((k - j - 1) % 2 == 0 ? 1.0L : -1.0L) *
                                              static_cast<long double>(binomial_exact(k - 1, j));
                        const Complex d1 = ys[j + 1].coords[comp] - ys[j].coords[comp];
                        re += w * static_cast<long double>(d1.real());
                        im += w * static_cast<long double>(d1.imag());
                    }
                    fwd[comp] = Complex(static_cast<double>(re), static_cast<double>(im));
                }
                const bool ok = close(rec, bin) && close(rec, fwd);
                c.require(ok);
                if (!ok) CHECK(ok);  // only report failures; 36k checks otherwise
            }
        }
    }
    CHECK(c.finish(5.0));
}

TEST_CASE("criterion 8: difference growth bound") {
    Criterion c(8, "difference-growth-bound");
    const AnyMap map{MapSpec::euler_step(BuiltinField::Pendulum, 0.005)};
    const CertifyConfig cfg = standard_config(21);
    const double eps_used = estimate_epsilon(map, kPendulumDomain, cfg.grid) * cfg.safety_factor;
    const OrderPlan plan = plan_order(eps_used, kPendulumDomain.delta);
    for (int k = 1; k <= plan.m_star; ++k) {
        const double norm = delta_norm_estimate(map, k, kPendulumDomain, cfg.grid);
        const bool ok = norm <= std::pow(2.0, k - 1) * eps_used;
        CHECK(ok);
        c.require(ok);
    }
    CHECK(c.finish(10.0));
}

TEST_CASE("criterion 9: Lie-coefficient consistency") {
    Criterion c(9, "lie-coefficient-consistency");
    const double fd_step = 1e-5;

    auto mu_grid_for = [](int m, double mu_max) {
        const int count = 2 * m + 3;
        std::vector<double> grid;
        for (int j = 1; j <= count; ++j)
            grid.push_back(mu_max * static_cast<double>(j) / static_cast<double>(count));
        return grid;
    };

    // Linear scalar: fitted coefficients also match the log series.
    const double u = 0.05;
    const MapSpec lin = MapSpec::linear_scalar(1.0 + u);
    const Point x1 = Point::real({1.0});
    for (int m : {2, 3}) {
        const auto checks = lie_vs_field_taylor(lin, m, x1, mu_grid_for(m, 0.25), fd_step);
        for (const LieCheck& chk : checks) {
            CHECK(chk.rel_discrepancy <= 1e-3);
            c.require(chk.rel_discrepancy <= 1e-3);
            const double closed = chk.k == 2 ? -u * u / 2.0 : u * u * u / 3.0;
            const double fitted = chk.a_k_from_field[0].real();
            const bool match = std::abs(fitted - closed) <= 1e-6 * std::abs(closed);
            CHECK(match);
            c.require(match);
        }
    }

    const MapSpec pend = MapSpec::euler_step(BuiltinField::Pendulum, 0.01);
    const Point x2 = Point::real({0.3, 0.1});
    for (int m : {2, 3}) {
        const auto checks = lie_vs_field_taylor(pend, m, x2, mu_grid_for(m, 0.035), fd_step);
        for (const LieCheck& chk : checks) {
            CHECK(chk.rel_discrepancy <= 1e-3);
            c.require(chk.rel_discrepancy <= 1e-3);
        }
    }
    CHECK(c.finish(30.0));
}

TEST_CASE("criterion 10: smooth-family order in epsilon") {
    Criterion c(10, "epsilon-slope");
    const CertifyConfig cfg = standard_config(11);
    const std::vector<double> hs = {0.02, 0.01, 0.005};
    for (int m : {1, 2}) {
        const SlopeResult s = epsilon_slope_check(BuiltinField::Pendulum, m, kPendulumDomain,
                                                  cfg, hs);
        const bool ok = std::abs(s.slope - static_cast<double>(m + 1)) <= 0.3;
        CHECK(ok);
        c.require(ok);
    }
    CHECK(c.finish(60.0));
}

TEST_CASE("criterion 11: exponential-regime sanity above the float floor") {
    Criterion c(11, "exponential-regime");
    const double delta = kPendulumDomain.delta;
    const double target = 1e-9;

    // Oracle: bisection on the closed form 3 eps exp(-delta/(6 e eps)),
    // which increases monotonically in eps.
    double lo = 1e-5, hi = 0.1;
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (exponential_bound(mid, delta).value < target ? lo : hi) = mid;
    }
    const double eps_star = 0.5 * (lo + hi);
    CHECK(exponential_bound(eps_star, delta).value == doctest::Approx(target).epsilon(1e-9));

    // Scale the pendulum Euler family so the padded estimate lands on
    // eps_star: the displacement is h g, so epsilon_est is linear in h.
    const CertifyConfig cfg = standard_config(9, 4);
    const double per_unit_h = estimate_epsilon(
        AnyMap{MapSpec::euler_step(BuiltinField::Pendulum, 1.0)}, kPendulumDomain, cfg.grid);
    const double h_star = eps_star / (cfg.safety_factor * per_unit_h);
    const AnyMap map{MapSpec::euler_step(BuiltinField::Pendulum, h_star)};

    const double eps_used =
        estimate_epsilon(map, kPendulumDomain, cfg.grid) * cfg.safety_factor;
    const ExpBound bound = exponential_bound(eps_used, delta);
    c.require(bound.value >= 1e-10);
    c.require(bound.value <= 1e-8);
    CHECK(bound.value >= 1e-10);
    CHECK(bound.value <= 1e-8);
    CHECK_FALSE(bound.underflow);

    const OrderPlan plan = plan_order(eps_used, delta);
    const ErrorReport report = measure_error(map, plan.m_star, kPendulumDomain, cfg);
    REQUIRE(report.bound_exp.has_value());
    CHECK(*report.bound_exp == bound.value);
    CHECK(report.measured_error <= *report.bound_exp);
    c.require(report.measured_error <= *report.bound_exp);
    CHECK(c.finish(120.0));
}
