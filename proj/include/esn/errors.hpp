#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace esn {

// Base class for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad arguments, malformed specs, violated preconditions.
class UsageError : public Error {
public:
    explicit UsageError(const std::string& msg) : Error(msg) {}
};

// Configuration file problems; carries the offending key when known.
class ConfigError : public UsageError {
public:
    explicit ConfigError(const std::string& msg, std::string key = {})
        : UsageError(key.empty() ? msg : msg + " (key: " + key + ")"), key_(std::move(key)) {}
    const std::string& key() const { return key_; }

private:
    std::string key_;
};

// File reading/writing failures; line is 1-based when known.
class IoError : public Error {
public:
    IoError(const std::string& msg, std::string path, std::optional<std::size_t> line = {})
        : Error(line ? msg + " (" + path + ":" + std::to_string(*line) + ")"
                     : msg + " (" + path + ")"),
          path_(std::move(path)),
          line_(line) {}
    const std::string& path() const { return path_; }
    std::optional<std::size_t> line() const { return line_; }

private:
    std::string path_;
    std::optional<std::size_t> line_;
};

// Non-finite state or runaway prediction. step is 1-based within the run
// that diverged, 0 when the failing step is unknown.
class DivergedError : public Error {
public:
    explicit DivergedError(const std::string& msg, std::size_t step = 0)
        : Error(step > 0 ? msg + " (step " + std::to_string(step) + ")" : msg), step_(step) {}
    std::size_t step() const { return step_; }

private:
    std::size_t step_;
};

// Singular linear system; pivot is the 0-based index of the first
// non-positive Cholesky pivot.
class SingularError : public Error {
public:
    SingularError(const std::string& msg, std::size_t pivot)
        : Error(msg + " (pivot " + std::to_string(pivot) + ")"), pivot_(pivot) {}
    std::size_t pivot() const { return pivot_; }

private:
    std::size_t pivot_;
};

// Matrix cannot be scaled to a target spectral radius (radius is zero).
class ScaleError : public Error {
public:
    explicit ScaleError(const std::string& msg) : Error(msg) {}
};

// Degenerate data: constant series fed to a scaling transform, etc.
class DegenerateDataError : public Error {
public:
    explicit DegenerateDataError(const std::string& msg) : Error(msg) {}
};

}  // namespace esn
