#pragma once

#include <stdexcept>
#include <string>

namespace exactsel {

// Precondition violated (bad argument, empty constraint set, unsupported preset).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// A resource guard tripped before any large allocation happened.
class CapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A root-finder target lies outside what the admissible interval can reach.
class RangeError : public std::range_error {
 public:
  using std::range_error::range_error;
};

// Malformed run configuration (unknown key, unparsable value).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace exactsel
