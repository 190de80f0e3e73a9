#ifndef COXIAN_ERRORS_HPP
#define COXIAN_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace coxian {

// Invalid model parameters, generator entries, or observation data.
class validation_error : public std::invalid_argument {
public:
  explicit validation_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Two representations of different order where equal order is required.
class dimension_error : public std::invalid_argument {
public:
  explicit dimension_error(const std::string& msg) : std::invalid_argument(msg) {}
};

// Requested order exceeds the configured enumeration cap.
class capacity_error : public std::runtime_error {
public:
  explicit capacity_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Overflow or singular system inside a numerical kernel.
class numeric_error : public std::runtime_error {
public:
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace coxian

#endif
