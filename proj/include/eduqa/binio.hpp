#pragma once

#include <bit>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "eduqa/error.hpp"
#include "eduqa/linalg.hpp"

// Little-endian binary file helpers for the index/weight formats.
static_assert(std::endian::native == std::endian::little,
              "index file formats assume a little-endian host");

namespace eduqa::binio {

inline void write_u32(std::ostream& out, std::uint32_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_u64(std::ostream& out, std::uint64_t v) {
    out.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

inline void write_string(std::ostream& out, const std::string& s) {
    write_u32(out, static_cast<std::uint32_t>(s.size()));
    out.write(s.data(), static_cast<std::streamsize>(s.size()));
}

inline void write_f32_row(std::ostream& out, const double* v, std::size_t n) {
    std::vector<float> tmp(n);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = static_cast<float>(v[i]);
    out.write(reinterpret_cast<const char*>(tmp.data()),
              static_cast<std::streamsize>(n * sizeof(float)));
}

inline std::uint32_t read_u32(std::istream& in, const std::string& path) {
    std::uint32_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw ValidationError("truncated file: " + path);
    return v;
}

inline std::uint64_t read_u64(std::istream& in, const std::string& path) {
    std::uint64_t v = 0;
    if (!in.read(reinterpret_cast<char*>(&v), sizeof(v)))
        throw ValidationError("truncated file: " + path);
    return v;
}

inline std::string read_string(std::istream& in, const std::string& path) {
    std::uint32_t n = read_u32(in, path);
    std::string s(n, '\0');
    if (n > 0 && !in.read(s.data(), n)) throw ValidationError("truncated file: " + path);
    return s;
}

inline void expect_magic(std::istream& in, const char* magic, const std::string& path) {
    char buf[4];
    if (!in.read(buf, 4) || std::string(buf, 4) != magic)
        throw ValidationError(path + ": bad magic, expected \"" + std::string(magic) + "\"");
}

inline void write_matrix_f32(std::ostream& out, const Matrix& m) {
    for (std::size_t i = 0; i < m.rows; ++i) write_f32_row(out, m.row(i), m.cols);
}

inline Matrix read_matrix_f32(std::istream& in, std::size_t rows, std::size_t cols,
                              const std::string& path) {
    Matrix m(rows, cols);
    std::vector<float> tmp(cols);
    for (std::size_t i = 0; i < rows; ++i) {
        if (!in.read(reinterpret_cast<char*>(tmp.data()),
                     static_cast<std::streamsize>(cols * sizeof(float))))
            throw ValidationError("truncated file: " + path);
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = tmp[j];
    }
    return m;
}

}  // namespace eduqa::binio
