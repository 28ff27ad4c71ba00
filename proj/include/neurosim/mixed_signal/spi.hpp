// SPDX-License-Identifier: Apache-2.0
//
// 32-bit SPI frame carrying converter traffic (mode 0, MSB first):
//
//   [31:28] channel   [27:26] flags   [25:24] reserved (0)
//   [23:8]  sample, left-justified when the converter has fewer than 16 bits
//   [7:0]   CRC-8 of bits [31:8]
//
// flags bit0 = DAC direction, bit1 = last frame of a burst.

#ifndef NEUROSIM_MIXED_SIGNAL_SPI_HPP
#define NEUROSIM_MIXED_SIGNAL_SPI_HPP

#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include "neurosim/error.hpp"
#include "neurosim/mixed_signal/crc8.hpp"

namespace neurosim::mixed_signal {

inline constexpr std::uint8_t kFlagDac = 0x1;
inline constexpr std::uint8_t kFlagLastInBurst = 0x2;

struct SpiFrame {
    std::uint8_t channel = 0;  // 4 bits
    std::uint8_t flags = 0;    // 2 bits
    std::uint8_t reserved = 0; // 2 bits, must be 0
    std::uint16_t sample = 0;
    std::uint8_t crc = 0; // filled in by spi_encode / verified by spi_decode

    friend bool operator==(const SpiFrame&, const SpiFrame&) = default;
};

/// Left-justifies an n-bit converter code into the 16-bit sample field.
inline std::uint16_t left_justify(std::uint32_t code, unsigned bits) {
    require(bits >= 1 && bits <= 16, "converter width must be 1..16 bits");
    require(code < (1U << bits), "code does not fit in " + std::to_string(bits) + " bits");
    return static_cast<std::uint16_t>(code << (16 - bits));
}

inline std::uint32_t right_justify(std::uint16_t sample, unsigned bits) {
    require(bits >= 1 && bits <= 16, "converter width must be 1..16 bits");
    return static_cast<std::uint32_t>(sample) >> (16 - bits);
}

constexpr std::uint32_t frame_payload(const SpiFrame& f) noexcept {
    return (static_cast<std::uint32_t>(f.channel & 0xF) << 20) | (static_cast<std::uint32_t>(f.flags & 0x3) << 18) |
           (static_cast<std::uint32_t>(f.reserved & 0x3) << 16) | f.sample;
}

/// Encodes a frame and computes its CRC. The frame's crc field is ignored.
/// `bits` is the converter width used to check sample alignment.
inline std::uint32_t spi_encode(const SpiFrame& frame, unsigned bits = 16) {
    require(frame.channel <= 0xF, "SPI channel must fit in 4 bits");
    require(frame.flags <= 0x3, "SPI flags must fit in 2 bits");
    require(frame.reserved == 0, "SPI reserved bits must be zero");
    require(bits >= 1 && bits <= 16, "converter width must be 1..16 bits");
    require(bits == 16 || (frame.sample & ((1U << (16 - bits)) - 1U)) == 0,
            "SPI sample is not left-justified for a " + std::to_string(bits) + "-bit converter");
    const std::uint32_t payload = frame_payload(frame);
    return (payload << 8) | crc8_payload24(payload);
}

/// Decodes and verifies a word. Reserved bits and sample alignment are
/// checked before the CRC, so layout violations surface as ProtocolError and
/// only otherwise well-formed corrupt frames as IntegrityError.
inline SpiFrame spi_decode(std::uint32_t word, unsigned bits = 16) {
    require(bits >= 1 && bits <= 16, "converter width must be 1..16 bits");
    SpiFrame f;
    f.channel = static_cast<std::uint8_t>((word >> 28) & 0xF);
    f.flags = static_cast<std::uint8_t>((word >> 26) & 0x3);
    f.reserved = static_cast<std::uint8_t>((word >> 24) & 0x3);
    f.sample = static_cast<std::uint16_t>((word >> 8) & 0xFFFF);
    f.crc = static_cast<std::uint8_t>(word & 0xFF);
    if (f.reserved != 0) {
        throw ProtocolError("SPI frame has nonzero reserved bits");
    }
    if (bits < 16 && (f.sample & ((1U << (16 - bits)) - 1U)) != 0) {
        throw ProtocolError("SPI sample has nonzero padding bits for a " + std::to_string(bits) + "-bit converter");
    }
    const std::uint8_t expected = crc8_payload24(word >> 8);
    if (f.crc != expected) {
        char msg[96];
        std::snprintf(msg, sizeof(msg), "SPI frame CRC mismatch: got 0x%02X, expected 0x%02X", f.crc, expected);
        throw IntegrityError(msg);
    }
    f.crc = 0;
    return f;
}

/// Frame log as big-endian bytes, four per word.
inline std::string frames_to_binary(const std::vector<std::uint32_t>& words) {
    std::string out;
    out.reserve(words.size() * 4);
    for (auto w : words) {
        out.push_back(static_cast<char>(w >> 24));
        out.push_back(static_cast<char>(w >> 16));
        out.push_back(static_cast<char>(w >> 8));
        out.push_back(static_cast<char>(w));
    }
    return out;
}

/// One word per line, eight uppercase hex digits.
inline std::string frames_to_hex(const std::vector<std::uint32_t>& words) {
    std::string out;
    char line[16];
    for (auto w : words) {
        std::snprintf(line, sizeof(line), "%08X\n", w);
        out += line;
    }
    return out;
}

inline std::vector<std::uint32_t> frames_from_binary(const std::string& bytes) {
    if (bytes.size() % 4 != 0) {
        throw ConfigError("frame log length is not a multiple of 4 bytes");
    }
    std::vector<std::uint32_t> words;
    for (std::size_t i = 0; i < bytes.size(); i += 4) {
        words.push_back((static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i])) << 24) |
                        (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i + 1])) << 16) |
                        (static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i + 2])) << 8) |
                        static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i + 3])));
    }
    return words;
}

} // namespace neurosim::mixed_signal

#endif // NEUROSIM_MIXED_SIGNAL_SPI_HPP
