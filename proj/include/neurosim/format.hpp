// SPDX-License-Identifier: Apache-2.0

#ifndef NEUROSIM_FORMAT_HPP
#define NEUROSIM_FORMAT_HPP

#include <charconv>
#include <string>

namespace neurosim {

/// Shortest decimal string that parses back to the same double.
inline std::string format_double(double value) {
    char buf[32];
    const auto result = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, result.ptr);
}

} // namespace neurosim

#endif // NEUROSIM_FORMAT_HPP
