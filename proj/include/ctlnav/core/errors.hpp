#pragma once

#include <stdexcept>
#include <string>

namespace ctlnav {

// Argument outside the mathematical domain of an operation (d <= 0, m < 0.5, ...).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Malformed, truncated or version-mismatched file content.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Caller broke a sequencing contract, e.g. stepping a finished episode.
class ContractError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Layer dimensions or vector lengths that do not line up.
class ShapeError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace ctlnav
