#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "flowembed/flow.hpp"

using namespace flowembed;

namespace {

const IntegratorConfig kDefault{};

}  // namespace

TEST_CASE("integrator config validation") {
    const Domain dom({-1.0}, {1.0}, 0.5);
    const InterpField field{AnyMap{MapSpec::identity(1)}, 1};
    IntegratorConfig bad = kDefault;
    bad.abs_tol = 0.0;
    CHECK_THROWS_AS(flow_time_one(field, Point::real({0.0}), bad, dom), std::invalid_argument);
    bad = kDefault;
    bad.rel_tol = 1e-2;
    CHECK_THROWS_AS(flow_time_one(field, Point::real({0.0}), bad, dom), std::invalid_argument);
    bad = kDefault;
    bad.max_steps = 5;
    CHECK_THROWS_AS(flow_time_one(field, Point::real({0.0}), bad, dom), std::invalid_argument);
}

TEST_CASE("zero field flows in one exact step") {
    const Domain dom({-1.0, -1.0}, {1.0, 1.0}, 0.5);
    const Point x0 = Point::real({0.3, -0.4});
    for (int m : {1, 3}) {
        const InterpField field{AnyMap{MapSpec::identity(2)}, m};
        const FlowResult r = flow_time_one(field, x0, kDefault, dom);
        CHECK(r.endpoint.coords == x0.coords);
        CHECK(r.accepted_steps == 1);
        CHECK(r.rejected_steps == 0);
        CHECK(r.est_global_error == 0.0);
        CHECK_FALSE(r.escaped);
    }
}

TEST_CASE("constant field translates the start point") {
    const Domain dom({-1.0}, {1.0}, 0.5);
    const InterpField field{AnyMap{MapSpec::translation({0.01})}, 2};
    const Point x0 = Point::real({0.25});
    const FlowResult r = flow_time_one(field, x0, kDefault, dom);
    CHECK(std::abs(r.endpoint.coords[0] - Complex(0.26, 0.0)) <= 1e-13);
}

TEST_CASE("linear scalar field reproduces the exponential") {
    // X_2(x) = a x with a from the truncated-logarithm oracle.
    const double lambda = 1.1;
    double a = 0.0;
    for (int k = 1; k <= 2; ++k)
        a += (k % 2 == 1 ? 1.0 : -1.0) * std::pow(lambda - 1.0, k) / k;
    CHECK(a == doctest::Approx(0.095).epsilon(1e-14));

    const Domain dom({0.5}, {1.5}, 0.5);
    const InterpField field{AnyMap{MapSpec::linear_scalar(lambda)}, 2};
    const FlowResult r = flow_time_one(field, Point::real({1.0}), kDefault, dom);
    CHECK(std::abs(r.endpoint.coords[0].real() - std::exp(a)) <= 1e-12);
    CHECK(std::abs(r.endpoint.coords[0].real() - 1.0996579) <= 1e-6);
}

TEST_CASE("verified runs report the endpoint discrepancy") {
    const Domain dom2({-1.0, -1.0}, {1.0, 1.0}, 0.5);

    const FlowResult zero = flow_time_one_verified({AnyMap{MapSpec::identity(2)}, 2},
                                                   Point::real({0.1, 0.2}), kDefault, dom2);
    CHECK(zero.est_global_error == 0.0);

    const Domain dom1({-1.0}, {1.0}, 0.5);
    const FlowResult cons = flow_time_one_verified({AnyMap{MapSpec::translation({0.01})}, 2},
                                                   Point::real({0.0}), kDefault, dom1);
    CHECK(cons.est_global_error <= 1e-15);

    const InterpField pend{AnyMap{MapSpec::euler_step(BuiltinField::Pendulum, 0.005)}, 4};
    const FlowResult r = flow_time_one_verified(pend, Point::real({0.3, 0.1}), kDefault, dom2);
    CHECK(r.est_global_error <= 1e-12);
    CHECK_FALSE(r.escaped);
}

TEST_CASE("flow semigroup: two half-time legs match one unit leg") {
    const Domain dom({-1.0, -1.0}, {1.0, 1.0}, 0.6);
    const std::vector<InterpField> fields = {
        {AnyMap{MapSpec::euler_step(BuiltinField::Pendulum, 0.01)}, 2},
        {AnyMap{MapSpec::euler_step(BuiltinField::CubicOscillator, 0.01)}, 3},
        {AnyMap{MapSpec::std_symplectic(0.02)}, 2},
    };
    for (const InterpField& field : fields) {
        const Point x0 = Point::real({0.4, -0.3});
        const FlowResult full = flow_to_time(field, x0, 1.0, kDefault, dom);
        const FlowResult half = flow_to_time(field, x0, 0.5, kDefault, dom);
        const FlowResult rest = flow_to_time(field, half.endpoint, 0.5, kDefault, dom);
        CHECK(inf_dist(full.endpoint.coords, rest.endpoint.coords) <= 20.0 * kDefault.abs_tol);
    }

    const Domain dom1({0.5}, {1.5}, 0.6);
    const InterpField lin{AnyMap{MapSpec::linear_scalar(1.1)}, 2};
    const Point x0 = Point::real({1.0});
    const FlowResult full = flow_to_time(lin, x0, 1.0, kDefault, dom1);
    const FlowResult half = flow_to_time(lin, x0, 0.5, kDefault, dom1);
    const FlowResult rest = flow_to_time(lin, half.endpoint, 0.5, kDefault, dom1);
    CHECK(inf_dist(full.endpoint.coords, rest.endpoint.coords) <= 20.0 * kDefault.abs_tol);
}

TEST_CASE("fixed-step order: halving the step gains a factor of 2^5") {
    // Scalar linear field dx/dt = -x via X_1 of the zero map; the
    // endpoint has the closed form e^{-1} x0. On the decaying problem
    // the next-order term pushes the ratio above the design factor.
    const InterpField field{AnyMap{MapSpec::linear_scalar(0.0)}, 1};
    const Point x0 = Point::real({1.0});
    const double exact = std::exp(-1.0);

    auto endpoint_error = [&](int steps) {
        const Point end = rk_fixed_steps(field, x0, 1.0, steps);
        return std::abs(end.coords[0].real() - exact);
    };

    const double e4 = endpoint_error(4);
    const double e8 = endpoint_error(8);
    const double e16 = endpoint_error(16);
    CHECK(e4 / e8 >= 32.0);
    CHECK(e8 / e16 >= 32.0);
}

TEST_CASE("flow is deterministic") {
    const Domain dom({-1.0, -1.0}, {1.0, 1.0}, 0.5);
    const InterpField field{AnyMap{MapSpec::euler_step(BuiltinField::Pendulum, 0.01)}, 3};
    const Point x0 = Point::real({0.2, 0.5});
    const FlowResult a = flow_time_one(field, x0, kDefault, dom);
    const FlowResult b = flow_time_one(field, x0, kDefault, dom);
    CHECK(a.endpoint.coords == b.endpoint.coords);
    CHECK(a.accepted_steps == b.accepted_steps);
    CHECK(a.rejected_steps == b.rejected_steps);
    CHECK(a.est_global_error == b.est_global_error);
}

TEST_CASE("accumulated error estimate stays near the tolerance") {
    const Domain dom({-1.0, -1.0}, {1.0, 1.0}, 0.5);
    const InterpField field{AnyMap{MapSpec::euler_step(BuiltinField::Pendulum, 0.01)}, 2};
    const FlowResult r = flow_time_one(field, Point::real({0.3, 0.1}), kDefault, dom);
    CHECK(r.est_global_error <= 10.0 * kDefault.abs_tol);
}

TEST_CASE("escape aborts with the last in-domain state") {
    // Constant drift 0.5 per unit time pushes x0 = 0.9 out of the
    // 0.1-inflated box before t = 1.
    const Domain dom({-1.0}, {1.0}, 0.3);
    const InterpField field{AnyMap{MapSpec::translation({0.5})}, 1};
    const FlowResult r = flow_time_one(field, Point::real({0.9}), kDefault, dom);
    CHECK(r.escaped);
    CHECK(dom.contains_inflated(r.endpoint, dom.delta / 3.0));
}

TEST_CASE("step-budget errors are reported distinctly") {
    const Domain dom({0.5}, {3.0}, 0.9);
    const InterpField field{AnyMap{MapSpec::linear_scalar(2.0)}, 1};
    const Point x0 = Point::real({1.0});

    IntegratorConfig few = kDefault;
    few.max_steps = 10;
    CHECK_THROWS_AS(flow_time_one(field, x0, few, dom), MaxStepsExceeded);

    IntegratorConfig coarse = kDefault;
    coarse.min_step = 0.2;
    CHECK_THROWS_AS(flow_time_one(field, x0, coarse, dom), StepUnderflow);
}

TEST_CASE("x0 outside the guarded region is rejected") {
    const Domain dom({-1.0}, {1.0}, 0.3);
    const InterpField field{AnyMap{MapSpec::identity(1)}, 1};
    CHECK_THROWS_AS(flow_time_one(field, Point::real({2.0}), kDefault, dom),
                    std::invalid_argument);
}
