#pragma once

#include <stdexcept>
#include <string>

namespace ris {

/// Invalid physical input: coincident points, non-positive lengths, bad ranges.
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A caller asked for something the chosen method cannot provide
/// (e.g. a closed form outside its validity, a bound for the wrong profile).
class contract_error : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Malformed or inconsistent run configuration. `key()` is the JSON path.
class config_error : public std::runtime_error {
public:
    config_error(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

/// Quadrature refused because the sample grid would exceed the budget.
class budget_error : public std::runtime_error {
public:
    budget_error(double required, double budget)
        : std::runtime_error("quadrature needs about " + std::to_string(static_cast<long long>(required)) +
                             " samples, budget is " + std::to_string(static_cast<long long>(budget)) +
                             " (raise quadrature.budget or RIS_BUDGET)"),
          required_(required) {}

    double required() const noexcept { return required_; }

private:
    double required_;
};

}  // namespace ris
