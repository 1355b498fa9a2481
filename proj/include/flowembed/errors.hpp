#pragma once

#include <stdexcept>
#include <string>

namespace flowembed {

/// Map evaluation produced a non-finite component. When the failure
/// happens inside an orbit, iterate_index() identifies the failing
/// iterate (otherwise -1).
class EvalError : public std::runtime_error {
public:
    explicit EvalError(const std::string& msg, int iterate_index = -1)
        : std::runtime_error(msg), index_(iterate_index) {}
    int iterate_index() const { return index_; }

private:
    int index_;
};

/// A trajectory (or an orbit iterate) left the guarded region.
class OrbitEscape : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class StepUnderflow : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class MaxStepsExceeded : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Two-tolerance verification runs disagreed by more than 100 * abs_tol.
class FlowNonConvergence : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Finite-difference result changed by more than 10% when the step was
/// doubled; cancellation dominates at the requested fd_step.
class UnstableDerivative : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class IllConditionedFit : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input configuration makes the requested quantity meaningless
/// (e.g. epsilon = 0 in a slope fit).
class DegenerateInput : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace flowembed
