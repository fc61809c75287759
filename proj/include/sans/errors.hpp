#pragma once

#include <stdexcept>
#include <string>

namespace sans {

// Error taxonomy mirrors the CLI exit codes: config 2, data 3, numeric 4.

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Malformed text input (bad TSV line, unparsable number).
struct ParseError : DataError {
    using DataError::DataError;
};

// Bad binary artifact: wrong magic, version mismatch, truncation.
struct FormatError : DataError {
    using DataError::DataError;
};

// Rejection sampling could not terminate for a positive.
struct SamplingError : DataError {
    using DataError::DataError;
};

// Construction would exceed the configured memory budget.
struct ResourceError : DataError {
    using DataError::DataError;
};

struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller broke a documented precondition (out-of-range id, k = 0, ...).
struct ContractError : std::logic_error {
    using std::logic_error::logic_error;
};

}  // namespace sans
