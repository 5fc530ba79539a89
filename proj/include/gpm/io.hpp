#pragma once

// Matrix file formats.
//
// Binary (little-endian):
//   magic[4]      "GPM1" snapshot matrix, "GPF1" orthonormal frame
//   u64 rows      n
//   u64 cols      n_t (snapshots) or p (frames)
//   f64 param     lambda
//   f64[rows*cols] values, column-major
//
// CSV: one row per spatial DOF, one column per time step (or frame column).
// Lines starting with '#' are comments; an optional first comment
//   # gpm snapshot param=<lambda>     or     # gpm frame param=<lambda>
// carries the parameter and marks orthonormal frames.

#include "gpm/error.hpp"
#include "gpm/grassmann.hpp"
#include "gpm/linalg.hpp"
#include "gpm/snapshots.hpp"

#include <array>
#include <bit>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace gpm::io {

enum class MatrixKind { snapshot, frame };

struct MatrixFile {
    MatrixKind kind = MatrixKind::snapshot;
    Matrix data;
    std::optional<double> param;
};

inline constexpr std::array<char, 4> kSnapshotMagic{'G', 'P', 'M', '1'};
inline constexpr std::array<char, 4> kFrameMagic{'G', 'P', 'F', '1'};

/// Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double x) {
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    if (!s.empty() && s.front() == '+') s.remove_prefix(1);
    double x = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), x);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw DataError("cannot parse number '" + std::string(s) + "'");
    }
    return x;
}

namespace detail {

inline void put_u64(std::string& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFu));
}

inline std::uint64_t get_u64(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
    return v;
}

inline std::string read_all(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string() + ": cannot open for reading");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void write_all(const std::filesystem::path& path, const std::string& bytes) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError(path.string() + ": cannot open for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw DataError(path.string() + ": write failed");
}

}  // namespace detail

inline std::string encode_binary(const Matrix& m, double param, MatrixKind kind) {
    std::string out;
    out.reserve(28 + 8 * static_cast<std::size_t>(m.size()));
    const auto& magic = kind == MatrixKind::frame ? kFrameMagic : kSnapshotMagic;
    out.append(magic.data(), magic.size());
    detail::put_u64(out, static_cast<std::uint64_t>(m.rows()));
    detail::put_u64(out, static_cast<std::uint64_t>(m.cols()));
    detail::put_u64(out, std::bit_cast<std::uint64_t>(param));
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
        for (Eigen::Index i = 0; i < m.rows(); ++i) detail::put_u64(out, std::bit_cast<std::uint64_t>(m(i, j)));
    }
    return out;
}

inline MatrixFile decode_binary(std::string_view bytes, const std::string& origin) {
    if (bytes.size() < 28) throw DataError(origin + ": truncated header");
    MatrixFile f;
    if (std::memcmp(bytes.data(), kSnapshotMagic.data(), 4) == 0) {
        f.kind = MatrixKind::snapshot;
    } else if (std::memcmp(bytes.data(), kFrameMagic.data(), 4) == 0) {
        f.kind = MatrixKind::frame;
    } else {
        throw DataError(origin + ": bad magic (expected GPM1 or GPF1)");
    }
    const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
    const std::uint64_t rows = detail::get_u64(p + 4);
    const std::uint64_t cols = detail::get_u64(p + 12);
    f.param = std::bit_cast<double>(detail::get_u64(p + 20));
    if (rows == 0 || cols == 0) throw DataError(origin + ": empty matrix");
    if (rows > (1ull << 32) || cols > (1ull << 32) || (bytes.size() - 28) / 8 / rows < cols ||
        bytes.size() != 28 + 8 * rows * cols) {
        throw DataError(origin + ": payload size does not match header " + std::to_string(rows) + "x" +
                        std::to_string(cols));
    }
    f.data.resize(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
    const unsigned char* v = p + 28;
    for (std::uint64_t j = 0; j < cols; ++j) {
        for (std::uint64_t i = 0; i < rows; ++i, v += 8) {
            f.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                std::bit_cast<double>(detail::get_u64(v));
        }
    }
    return f;
}

inline std::string encode_csv(const Matrix& m, std::optional<double> param, MatrixKind kind) {
    std::string out;
    out += kind == MatrixKind::frame ? "# gpm frame" : "# gpm snapshot";
    if (param) out += " param=" + format_double(*param);
    out += '\n';
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            if (j) out += ',';
            out += format_double(m(i, j));
        }
        out += '\n';
    }
    return out;
}

inline MatrixFile decode_csv(std::string_view text, const std::string& origin) {
    MatrixFile f;
    std::vector<std::vector<double>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) {
            if (end == text.size()) break;
            continue;
        }
        if (line.front() == '#') {
            if (line.starts_with("# gpm frame")) f.kind = MatrixKind::frame;
            const auto at = line.find("param=");
            if (at != std::string_view::npos && line.starts_with("# gpm")) {
                try {
                    f.param = parse_double(line.substr(at + 6));
                } catch (const DataError& e) {
                    throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
                }
            }
            continue;
        }
        std::vector<double> row;
        std::size_t cpos = 0;
        while (true) {
            const std::size_t comma = line.find(',', cpos);
            const std::string_view cell = line.substr(cpos, comma == std::string_view::npos ? line.npos : comma - cpos);
            try {
                row.push_back(parse_double(cell));
            } catch (const DataError& e) {
                throw DataError(origin + ":" + std::to_string(line_no) + ": " + e.what());
            }
            if (comma == std::string_view::npos) break;
            cpos = comma + 1;
        }
        if (!rows.empty() && row.size() != rows.front().size()) {
            throw DataError(origin + ":" + std::to_string(line_no) + ": expected " +
                            std::to_string(rows.front().size()) + " columns, found " +
                            std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
        if (end == text.size()) break;
    }
    if (rows.empty()) throw DataError(origin + ": no data rows");
    f.data.resize(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            f.data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return f;
}

/// Reads either format, detected from the magic bytes.
inline MatrixFile read_matrix_file(const std::filesystem::path& path) {
    const std::string bytes = detail::read_all(path);
    if (bytes.size() >= 4 && (std::memcmp(bytes.data(), kSnapshotMagic.data(), 4) == 0 ||
                              std::memcmp(bytes.data(), kFrameMagic.data(), 4) == 0)) {
        return decode_binary(bytes, path.string());
    }
    return decode_csv(bytes, path.string());
}

inline void write_matrix_binary(const std::filesystem::path& path, const Matrix& m, double param,
                                MatrixKind kind) {
    detail::write_all(path, encode_binary(m, param, kind));
}

inline void write_matrix_csv(const std::filesystem::path& path, const Matrix& m, std::optional<double> param,
                             MatrixKind kind) {
    detail::write_all(path, encode_csv(m, param, kind));
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
    detail::write_all(path, text);
}

/// Snapshot matrix from a file; `param_override` wins over the stored value.
inline SnapshotMatrix read_snapshot(const std::filesystem::path& path,
                                    std::optional<double> param_override = std::nullopt) {
    MatrixFile f = read_matrix_file(path);
    const double param = param_override ? *param_override : f.param.value_or(0.0);
    try {
        return SnapshotMatrix(std::move(f.data), param);
    } catch (const Error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

inline GrassmannPoint read_frame(const std::filesystem::path& path) {
    MatrixFile f = read_matrix_file(path);
    try {
        return GrassmannPoint(std::move(f.data));
    } catch (const Error& e) {
        throw DataError(path.string() + ": " + e.what());
    }
}

inline void write_snapshot(const std::filesystem::path& path, const SnapshotMatrix& s) {
    write_matrix_binary(path, s.data(), s.param(), MatrixKind::snapshot);
}

inline void write_frame(const std::filesystem::path& path, const GrassmannPoint& y, double param) {
    write_matrix_binary(path, y.frame(), param, MatrixKind::frame);
}

}  // namespace gpm::io
