#pragma once

#include <stdexcept>
#include <string>

namespace flatgp {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Unknown opcode byte, or an opcode applied to lanes of the wrong suite mode.
struct MalformedGenome : Error {
    using Error::Error;
};

struct BoundsError : Error {
    using Error::Error;
};

struct InitFailure : Error {
    using Error::Error;
};

struct PoolExhausted : Error {
    using Error::Error;
};

// Double release, or access through a handle whose buffer has been released.
struct AccountingError : Error {
    using Error::Error;
};

struct SpliceError : Error {
    using Error::Error;
};

struct PlanError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

} // namespace flatgp
