#pragma once

#include <stdexcept>
#include <string>

namespace chemolab {

/// Input violates a documented precondition (negative density, empty field, ...).
struct InvalidInput : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// An iterative solver exhausted its iteration budget.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Time step exceeds the positivity-preserving advective limit.
struct CflViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The sensitivity factor v^(-lambda) was requested on a nonpositive signal.
struct SingularSensitivity : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A threshold formula was evaluated outside its domain of definition.
struct DomainViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The logarithmic energy functional is undefined (density too close to zero).
struct UndefinedEnergy : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// A fit was requested with fewer in-window points than required.
struct InsufficientData : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Perturbation amplitude would make the analytic test pair nonpositive.
struct InvalidAmplitude : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Requested combination is not implemented (e.g. oracle dimension).
struct Unsupported : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Scenario/sweep configuration violates its schema.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Output files could not be created or written.
struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace chemolab
