#pragma once

#include <stdexcept>

namespace qkdsec {

// Argument outside the mathematical domain of an operation
// (probability not in [0,1], quantile of 0, ...).
class domain_error : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Structurally valid arguments that violate an operation's contract:
// inconsistent sizes, a rate the formulas cannot support, a guard limit.
class precondition_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

} // namespace qkdsec
