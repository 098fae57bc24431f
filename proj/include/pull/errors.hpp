#pragma once

#include <stdexcept>

namespace pull {

// Invalid arguments or malformed inputs. The CLI maps this to exit code 2.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// A request that cannot be satisfied by the available data, e.g. sampling
// more non-edges than the graph has.
class CapacityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Non-finite values in a numeric path. The CLI maps this to exit code 3.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace pull
