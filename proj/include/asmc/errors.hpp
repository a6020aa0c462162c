#pragma once

#include <stdexcept>
#include <string>

namespace asmc {

// Requested operation needs a capability the target does not declare.
class capability_error : public std::runtime_error {
 public:
  explicit capability_error(const std::string& what) : std::runtime_error(what) {}
};

// Weight system collapsed to (numerically) a single particle.
class degenerate_weights_error : public std::runtime_error {
 public:
  explicit degenerate_weights_error(const std::string& what) : std::runtime_error(what) {}
};

// Density evaluated to zero where a positive value is required.
class evaluation_error : public std::runtime_error {
 public:
  explicit evaluation_error(const std::string& what) : std::runtime_error(what) {}
};

// Config file rejected; carries the offending line and key where known.
class config_error : public std::runtime_error {
 public:
  config_error(const std::string& what, int line, std::string key)
      : std::runtime_error(what), line_(line), key_(std::move(key)) {}
  int line() const { return line_; }
  const std::string& key() const { return key_; }

 private:
  int line_;
  std::string key_;
};

}  // namespace asmc
