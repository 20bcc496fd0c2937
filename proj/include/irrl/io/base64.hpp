#pragma once

#include <cstdint>
#include <cstring>
#include <span>
#include <string>
#include <vector>

#include "irrl/errors.hpp"

namespace irrl {

namespace base64_detail {
inline constexpr char kAlphabet[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

inline int decode_char(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}
}  // namespace base64_detail

inline std::string base64_encode(std::span<const std::uint8_t> data) {
    std::string out;
    out.reserve((data.size() + 2) / 3 * 4);
    std::size_t i = 0;
    for (; i + 3 <= data.size(); i += 3) {
        const std::uint32_t v = (static_cast<std::uint32_t>(data[i]) << 16) |
                                (static_cast<std::uint32_t>(data[i + 1]) << 8) | data[i + 2];
        out.push_back(base64_detail::kAlphabet[(v >> 18) & 63]);
        out.push_back(base64_detail::kAlphabet[(v >> 12) & 63]);
        out.push_back(base64_detail::kAlphabet[(v >> 6) & 63]);
        out.push_back(base64_detail::kAlphabet[v & 63]);
    }
    const std::size_t rem = data.size() - i;
    if (rem == 1) {
        const std::uint32_t v = static_cast<std::uint32_t>(data[i]) << 16;
        out.push_back(base64_detail::kAlphabet[(v >> 18) & 63]);
        out.push_back(base64_detail::kAlphabet[(v >> 12) & 63]);
        out.push_back('=');
        out.push_back('=');
    } else if (rem == 2) {
        const std::uint32_t v = (static_cast<std::uint32_t>(data[i]) << 16) |
                                (static_cast<std::uint32_t>(data[i + 1]) << 8);
        out.push_back(base64_detail::kAlphabet[(v >> 18) & 63]);
        out.push_back(base64_detail::kAlphabet[(v >> 12) & 63]);
        out.push_back(base64_detail::kAlphabet[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
    if (text.size() % 4 != 0) throw SchemaError("base64 payload length not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(text.size() / 4 * 3);
    for (std::size_t i = 0; i < text.size(); i += 4) {
        int vals[4];
        int pad = 0;
        for (int k = 0; k < 4; ++k) {
            const char c = text[i + k];
            if (c == '=') {
                if (i + 4 != text.size() || k < 2) throw SchemaError("malformed base64 padding");
                vals[k] = 0;
                ++pad;
            } else {
                vals[k] = base64_detail::decode_char(c);
                if (vals[k] < 0 || pad > 0) throw SchemaError("invalid base64 character");
            }
        }
        const std::uint32_t v = (static_cast<std::uint32_t>(vals[0]) << 18) |
                                (static_cast<std::uint32_t>(vals[1]) << 12) |
                                (static_cast<std::uint32_t>(vals[2]) << 6) |
                                static_cast<std::uint32_t>(vals[3]);
        out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
        if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
        if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
    }
    return out;
}

/// Doubles -> little-endian bytes -> base64.
inline std::string encode_f64_le(std::span<const double> values) {
    std::vector<std::uint8_t> bytes(values.size() * 8);
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::uint64_t bits;
        std::memcpy(&bits, &values[i], 8);
        for (int b = 0; b < 8; ++b) {
            bytes[i * 8 + static_cast<std::size_t>(b)] =
                static_cast<std::uint8_t>((bits >> (8 * b)) & 0xff);
        }
    }
    return base64_encode(bytes);
}

inline std::vector<double> decode_f64_le(const std::string& text) {
    const std::vector<std::uint8_t> bytes = base64_decode(text);
    if (bytes.size() % 8 != 0) throw SchemaError("f64 payload not a multiple of 8 bytes");
    std::vector<double> out(bytes.size() / 8);
    for (std::size_t i = 0; i < out.size(); ++i) {
        std::uint64_t bits = 0;
        for (int b = 7; b >= 0; --b) {
            bits = (bits << 8) | bytes[i * 8 + static_cast<std::size_t>(b)];
        }
        std::memcpy(&out[i], &bits, 8);
    }
    return out;
}

}  // namespace irrl
