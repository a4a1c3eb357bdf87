// error.hpp: exception hierarchy shared by all crq modules

#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace crq {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Errors that name an offending parameter or configuration key.
class KeyedError : public Error {
public:
    KeyedError(std::string key, const std::string& what)
        : Error(what), key_(std::move(key)) {}

    const std::string& key() const noexcept { return key_; }

private:
    std::string key_;
};

class MissingKey : public KeyedError {
public:
    explicit MissingKey(const std::string& key)
        : KeyedError(key, "missing required key '" + key + "'") {}
};

class InvalidValue : public KeyedError {
public:
    InvalidValue(const std::string& key, const std::string& why)
        : KeyedError(key, "invalid value for '" + key + "': " + why) {}
};

class ConfigError : public KeyedError {
public:
    ConfigError(const std::string& key, const std::string& why)
        : KeyedError(key, "config error in '" + key + "': " + why) {}
};

class RegimeError : public Error { using Error::Error; };
class StepTooLarge : public Error { using Error::Error; };
class GridMismatch : public Error { using Error::Error; };
class GridIncommensurate : public Error { using Error::Error; };
class PoleProximity : public Error { using Error::Error; };
class WrongParity : public Error { using Error::Error; };
class DomainError : public Error { using Error::Error; };
class InvalidState : public Error { using Error::Error; };
class BudgetExceeded : public Error { using Error::Error; };
class IoError : public Error { using Error::Error; };

} // namespace crq
