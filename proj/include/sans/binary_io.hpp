#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <istream>
#include <ostream>
#include <string>

#include "sans/errors.hpp"

namespace sans::io {

// All on-disk integers and floats are little-endian. The artifact targets
// little-endian hosts; flag the assumption instead of swapping silently.
static_assert(std::endian::native == std::endian::little,
              "binary formats are written little-endian; add byte swaps for this host");

template <typename T>
void write_pod(std::ostream& out, T v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T v{};
    in.read(reinterpret_cast<char*>(&v), sizeof(T));
    if (!in) throw FormatError(std::string("truncated file while reading ") + what);
    return v;
}

inline void write_bytes(std::ostream& out, const void* data, size_t n) {
    out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n));
}

inline void read_bytes(std::istream& in, void* data, size_t n, const char* what) {
    in.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n));
    if (!in) throw FormatError(std::string("truncated file while reading ") + what);
}

inline void expect_magic(std::istream& in, const char* magic8, const char* format_name) {
    char buf[8];
    in.read(buf, 8);
    if (!in || std::memcmp(buf, magic8, 8) != 0)
        throw FormatError(std::string("not a ") + format_name + " file (bad magic)");
}

}  // namespace sans::io
