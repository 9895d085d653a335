#ifndef EDGECC_ERRORS_HPP
#define EDGECC_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace edgecc {

/// Model or operation parameters violate their documented constraints.
class InvalidParams : public std::invalid_argument {
public:
    explicit InvalidParams(const std::string& what) : std::invalid_argument(what) {}
};

/// A time or deadline argument is negative or non-finite.
class InvalidTime : public std::invalid_argument {
public:
    explicit InvalidTime(const std::string& what) : std::invalid_argument(what) {}
};

/// The requested quantity is undefined for the given model (e.g. the
/// expected-delay formula with zero holders, where the meeting rate vanishes).
class DegenerateModel : public std::domain_error {
public:
    explicit DegenerateModel(const std::string& what) : std::domain_error(what) {}
};

/// An event was applied with a timestamp earlier than the engine clock.
class ClockRegression : public std::logic_error {
public:
    explicit ClockRegression(const std::string& what) : std::logic_error(what) {}
};

/// A traffic class has no entry in the classification policy.
class UnknownClass : public std::invalid_argument {
public:
    explicit UnknownClass(const std::string& what) : std::invalid_argument(what) {}
};

} // namespace edgecc

#endif // EDGECC_ERRORS_HPP
