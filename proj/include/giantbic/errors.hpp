#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace giantbic {

/// Raised when a numerical procedure cannot meet its accuracy contract.
/// Carries the name of the module that gave up so the CLI can report it.
class NumericalError : public std::runtime_error {
public:
    NumericalError(std::string module, const std::string& what)
        : std::runtime_error(module + ": " + what), module_(std::move(module)) {}

    [[nodiscard]] const std::string& module() const noexcept { return module_; }

private:
    std::string module_;
};

/// Raised for malformed or physically invalid scenario configuration.
/// `key` names the offending config entry.
class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string key, const std::string& what)
        : std::runtime_error(key + ": " + what), key_(std::move(key)) {}

    [[nodiscard]] const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

}  // namespace giantbic
