// SPDX-License-Identifier: Apache-2.0
//
// Exception hierarchy shared by every neurosim module. Callers that only care
// about "something went wrong" catch neurosim::Error; the CLI maps the
// concrete types onto its exit-code contract.

#ifndef NEUROSIM_ERROR_HPP
#define NEUROSIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace neurosim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A precondition of an operation was violated by its arguments
/// (shape mismatch, out-of-range index, ...).
class ContractViolation : public Error {
public:
    using Error::Error;
};

/// Inconsistent configuration: a spec that does not chain, a weight set that
/// does not match its spec, an empty dataset, a class-count mismatch.
class ConfigError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

/// Failure to decode a binary artifact (checkpoint files).
class DecodeError : public Error {
public:
    enum class Kind { bad_magic, version_mismatch, truncated, malformed };

    DecodeError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}

    [[nodiscard]] Kind kind() const noexcept { return kind_; }

private:
    Kind kind_;
};

/// SPI frame whose CRC does not match its payload.
class IntegrityError : public Error {
public:
    using Error::Error;
};

/// SPI frame that violates the wire layout (reserved bits, sample alignment).
class ProtocolError : public Error {
public:
    using Error::Error;
};

inline void require(bool condition, const std::string& message) {
    if (!condition) {
        throw ContractViolation(message);
    }
}

} // namespace neurosim

#endif // NEUROSIM_ERROR_HPP
