#pragma once

#include <stdexcept>
#include <string>

namespace plate {

// Invalid configuration: bad parameter values, unreadable config files,
// violated preconditions that are the caller's responsibility to check.
// Maps to process exit code 1.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// A verification routine was asked to check an estimate at a parameter
// point where the estimate's hypotheses do not hold.  Carries the name of
// the violated inequality so callers can report it.
class HypothesisError : public ConfigError {
public:
    HypothesisError(const std::string& inequality, const std::string& detail)
        : ConfigError("hypothesis violated: " + inequality +
                      (detail.empty() ? "" : " (" + detail + ")")),
          inequality_(inequality) {}

    const std::string& inequality() const noexcept { return inequality_; }

private:
    std::string inequality_;
};

// Runtime numerical failure: blow-up past the divergence cap, ODE-solver
// instability, Hermitian-symmetry corruption, non-finite data.
// Maps to process exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace plate
