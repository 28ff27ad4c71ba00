// SPDX-License-Identifier: Apache-2.0
//
// CRC-8, polynomial x^8 + x^2 + x + 1 (0x07), init 0x00, MSB first, no
// reflection, no final XOR. Check value for "123456789" is 0xF4.

#ifndef NEUROSIM_MIXED_SIGNAL_CRC8_HPP
#define NEUROSIM_MIXED_SIGNAL_CRC8_HPP

#include <array>
#include <cstdint>
#include <span>

namespace neurosim::mixed_signal {

namespace detail {

constexpr std::array<std::uint8_t, 256> make_crc8_table() {
    std::array<std::uint8_t, 256> table{};
    for (unsigned i = 0; i < 256; ++i) {
        auto crc = static_cast<std::uint8_t>(i);
        for (int bit = 0; bit < 8; ++bit) {
            crc = static_cast<std::uint8_t>((crc & 0x80U) ? (crc << 1) ^ 0x07U : crc << 1);
        }
        table[i] = crc;
    }
    return table;
}

inline constexpr auto kCrc8Table = make_crc8_table();

} // namespace detail

constexpr std::uint8_t crc8(std::span<const std::uint8_t> bytes) noexcept {
    std::uint8_t crc = 0x00;
    for (std::uint8_t b : bytes) {
        crc = detail::kCrc8Table[crc ^ b];
    }
    return crc;
}

/// CRC of the 24-bit payload [23:0], sent MSB first.
constexpr std::uint8_t crc8_payload24(std::uint32_t payload) noexcept {
    const std::array<std::uint8_t, 3> bytes{static_cast<std::uint8_t>(payload >> 16),
                                            static_cast<std::uint8_t>(payload >> 8),
                                            static_cast<std::uint8_t>(payload)};
    return crc8(bytes);
}

} // namespace neurosim::mixed_signal

#endif // NEUROSIM_MIXED_SIGNAL_CRC8_HPP
