#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace cxrforge {

/// Caller supplied an argument that violates an operation's precondition.
class InputError : public std::invalid_argument {
  public:
    using std::invalid_argument::invalid_argument;
};

/// A source file or serialized record does not parse.
class FormatError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;

    FormatError(const std::string &path, std::size_t line, const std::string &reason)
        : std::runtime_error(path + ":" + std::to_string(line) + ": " + reason), path_(path), line_(line) {}

    const std::string &path() const noexcept { return path_; }
    std::size_t line() const noexcept { return line_; }

  private:
    std::string path_;
    std::size_t line_ = 0;
};

/// Configuration file is missing, malformed, or references missing inputs.
class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Collects non-fatal warnings emitted while processing data.
class Diagnostics {
  public:
    void warn(std::string message) { warnings_.push_back(std::move(message)); }
    const std::vector<std::string> &warnings() const noexcept { return warnings_; }
    std::size_t size() const noexcept { return warnings_.size(); }
    void merge(const Diagnostics &other) {
        warnings_.insert(warnings_.end(), other.warnings_.begin(), other.warnings_.end());
    }

  private:
    std::vector<std::string> warnings_;
};

} // namespace cxrforge
