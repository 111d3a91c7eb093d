#pragma once

// Plain-text formats.
//
//   CMAT v1   `rows cols`, then one line per row of `re im` pairs.
//   PART v1   `N J`, then per block `j d_j lambda_j` and d_j rows of length N
//             (row k is the basis vector e_j^k).
//   SYM v1    `J`, then per block `ell d_ell lambda_ell` and d_ell rows of
//             length d_ell.
//   COEF v1   `J`, then per block `j d_j` and one row of d_j pairs.
//
// Lines starting with `#` and blank lines are ignored. Writers emit the
// shortest decimal that round-trips, so output is byte-stable.

#include <array>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "fmc/core.hpp"

namespace fmc::io {

/// Shortest round-trip decimal; negative zero prints as 0.
inline std::string format_double(double x) {
    if (x == 0.0) return "0";
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), x);
    return std::string(buf.data(), res.ptr);
}

namespace detail {

struct Token {
    std::string_view text;
    std::size_t column;  // 1-based
};

class LineReader {
public:
    LineReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    /// Next non-blank, non-comment line split on whitespace.
    std::vector<Token> next(const char* expecting) {
        while (std::getline(in_, line_)) {
            ++line_no_;
            if (!line_.empty() && line_.back() == '\r') line_.pop_back();
            std::vector<Token> tokens;
            std::size_t i = 0;
            while (i < line_.size()) {
                while (i < line_.size() && (line_[i] == ' ' || line_[i] == '\t')) ++i;
                if (i >= line_.size()) break;
                const std::size_t start = i;
                while (i < line_.size() && line_[i] != ' ' && line_[i] != '\t') ++i;
                tokens.push_back({std::string_view(line_).substr(start, i - start), start + 1});
            }
            if (tokens.empty() || tokens.front().text.front() == '#') continue;
            return tokens;
        }
        throw ParseError(source_, line_no_ + 1, 1, std::string("unexpected end of input, expecting ") + expecting);
    }

    /// Fails unless only comments and blank lines remain.
    void expect_end() {
        while (std::getline(in_, line_)) {
            ++line_no_;
            const auto pos = line_.find_first_not_of(" \t\r");
            if (pos == std::string::npos || line_[pos] == '#') continue;
            throw ParseError(source_, line_no_, pos + 1, "trailing content after last record");
        }
    }

    [[noreturn]] void fail(std::size_t column, const std::string& what) const {
        throw ParseError(source_, line_no_, column, what);
    }

    void expect_count(const std::vector<Token>& tokens, std::size_t n, const char* what) const {
        if (tokens.size() == n) return;
        const std::size_t col = tokens.size() > n ? tokens[n].column : line_.size() + 1;
        fail(col, std::string("expected ") + std::to_string(n) + " fields for " + what + ", found " +
                      std::to_string(tokens.size()));
    }

    std::size_t size_value(const Token& t, const char* what) const {
        std::size_t v = 0;
        const auto* end = t.text.data() + t.text.size();
        const auto res = std::from_chars(t.text.data(), end, v);
        if (res.ec != std::errc{} || res.ptr != end) fail(t.column, std::string("invalid ") + what + " '" + std::string(t.text) + "'");
        return v;
    }

    double real_value(const Token& t) const {
        double v = 0.0;
        const auto* begin = t.text.data();
        const auto* end = begin + t.text.size();
        if (begin != end && *begin == '+') ++begin;
        const auto res = std::from_chars(begin, end, v);
        if (res.ec != std::errc{} || res.ptr != end || !std::isfinite(v)) {
            fail(t.column, "invalid number '" + std::string(t.text) + "'");
        }
        return v;
    }

    /// A line of exactly `count` complex entries.
    CVector complex_row(std::size_t count, const char* what) {
        const auto tokens = next(what);
        expect_count(tokens, 2 * count, what);
        CVector row(count);
        for (std::size_t k = 0; k < count; ++k) row[k] = {real_value(tokens[2 * k]), real_value(tokens[2 * k + 1])};
        return row;
    }

private:
    std::istream& in_;
    std::string source_;
    std::string line_;
    std::size_t line_no_ = 0;
};

inline void write_row(std::ostream& out, std::span<const Complex> row) {
    for (std::size_t k = 0; k < row.size(); ++k) {
        if (k) out << ' ';
        out << format_double(row[k].real()) << ' ' << format_double(row[k].imag());
    }
    out << '\n';
}

}  // namespace detail

inline CMatrix read_cmat(std::istream& in, const std::string& source = "<cmat>") {
    detail::LineReader reader(in, source);
    const auto header = reader.next("matrix header `rows cols`");
    reader.expect_count(header, 2, "matrix header");
    const std::size_t rows = reader.size_value(header[0], "row count");
    const std::size_t cols = reader.size_value(header[1], "column count");
    CMatrix m(rows, cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto row = reader.complex_row(cols, "matrix row");
        for (std::size_t j = 0; j < cols; ++j) m(i, j) = row[j];
    }
    reader.expect_end();
    return m;
}

inline void write_cmat(std::ostream& out, const CMatrix& m) {
    out << "# CMAT v1\n" << m.rows() << ' ' << m.cols() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) detail::write_row(out, m.row(i));
}

inline EigenPartition read_part(std::istream& in, const std::string& source = "<part>") {
    detail::LineReader reader(in, source);
    const auto header = reader.next("partition header `N J`");
    reader.expect_count(header, 2, "partition header");
    const std::size_t n = reader.size_value(header[0], "dimension");
    const std::size_t blocks = reader.size_value(header[1], "block count");
    if (n == 0) reader.fail(header[0].column, "dimension must be positive");

    CMatrix basis(n, n);
    std::vector<double> lambdas;
    std::vector<std::size_t> sizes;
    std::size_t filled = 0;
    for (std::size_t j = 0; j < blocks; ++j) {
        const auto head = reader.next("block header `j d_j lambda_j`");
        reader.expect_count(head, 3, "block header");
        if (reader.size_value(head[0], "block index") != j) {
            reader.fail(head[0].column, "block index out of sequence, expected " + std::to_string(j));
        }
        const std::size_t d = reader.size_value(head[1], "multiplicity");
        if (d == 0) reader.fail(head[1].column, "multiplicity must be positive");
        if (filled + d > n) reader.fail(head[1].column, "multiplicities exceed the dimension");
        lambdas.push_back(reader.real_value(head[2]));
        sizes.push_back(d);
        for (std::size_t k = 0; k < d; ++k) basis.set_column(filled++, reader.complex_row(n, "basis vector"));
    }
    reader.expect_end();
    return EigenPartition(AmbientSpace(n), std::move(basis), std::move(lambdas), std::move(sizes));
}

inline void write_part(std::ostream& out, const EigenPartition& p) {
    out << "# PART v1\n" << p.dim() << ' ' << p.block_count() << '\n';
    for (std::size_t j = 0; j < p.block_count(); ++j) {
        out << j << ' ' << p.multiplicity(j) << ' ' << format_double(p.lambda(j)) << '\n';
        for (std::size_t k = 0; k < p.multiplicity(j); ++k) detail::write_row(out, p.basis_vector(j, k));
    }
}

/// A symbol together with the block eigenvalues recorded alongside it.
struct SymbolFile {
    MatrixSymbol symbol;
    std::vector<double> lambdas;
};

inline SymbolFile read_sym(std::istream& in, const std::string& source = "<sym>") {
    detail::LineReader reader(in, source);
    const auto header = reader.next("symbol header `J`");
    reader.expect_count(header, 1, "symbol header");
    const std::size_t blocks = reader.size_value(header[0], "block count");
    std::vector<CMatrix> mats;
    std::vector<double> lambdas;
    for (std::size_t l = 0; l < blocks; ++l) {
        const auto head = reader.next("block header `ell d_ell lambda_ell`");
        reader.expect_count(head, 3, "block header");
        if (reader.size_value(head[0], "block index") != l) {
            reader.fail(head[0].column, "block index out of sequence, expected " + std::to_string(l));
        }
        const std::size_t d = reader.size_value(head[1], "block size");
        if (d == 0) reader.fail(head[1].column, "block size must be positive");
        lambdas.push_back(reader.real_value(head[2]));
        CMatrix m(d, d);
        for (std::size_t i = 0; i < d; ++i) {
            const auto row = reader.complex_row(d, "symbol row");
            for (std::size_t k = 0; k < d; ++k) m(i, k) = row[k];
        }
        mats.push_back(std::move(m));
    }
    reader.expect_end();
    return {MatrixSymbol(std::move(mats)), std::move(lambdas)};
}

inline void write_sym(std::ostream& out, const MatrixSymbol& sigma, std::span<const double> lambdas) {
    if (lambdas.size() != sigma.block_count()) throw ShapeError("one eigenvalue per symbol block required");
    out << "# SYM v1\n" << sigma.block_count() << '\n';
    for (std::size_t l = 0; l < sigma.block_count(); ++l) {
        const CMatrix& b = sigma.block(l);
        out << l << ' ' << b.rows() << ' ' << format_double(lambdas[l]) << '\n';
        for (std::size_t i = 0; i < b.rows(); ++i) detail::write_row(out, b.row(i));
    }
}

inline CoefficientVector read_coef(std::istream& in, const std::string& source = "<coef>") {
    detail::LineReader reader(in, source);
    const auto header = reader.next("coefficient header `J`");
    reader.expect_count(header, 1, "coefficient header");
    const std::size_t blocks = reader.size_value(header[0], "block count");
    std::vector<CVector> out;
    for (std::size_t j = 0; j < blocks; ++j) {
        const auto head = reader.next("block header `j d_j`");
        reader.expect_count(head, 2, "block header");
        if (reader.size_value(head[0], "block index") != j) {
            reader.fail(head[0].column, "block index out of sequence, expected " + std::to_string(j));
        }
        const std::size_t d = reader.size_value(head[1], "block length");
        if (d == 0) reader.fail(head[1].column, "block length must be positive");
        out.push_back(reader.complex_row(d, "coefficient row"));
    }
    reader.expect_end();
    return CoefficientVector(std::move(out));
}

inline void write_coef(std::ostream& out, const CoefficientVector& c) {
    out << "# COEF v1\n" << c.block_count() << '\n';
    for (std::size_t j = 0; j < c.block_count(); ++j) {
        out << j << ' ' << c.block(j).size() << '\n';
        detail::write_row(out, c.block(j));
    }
}

/// Opens `path` and hands the stream to `reader(stream, path)`.
template <typename Reader>
auto read_file(const std::string& path, Reader&& reader) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    return reader(in, path);
}

inline void write_text_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << contents;
    if (!out) throw IoError("failed writing '" + path + "'");
}

template <typename Writer>
std::string to_text(Writer&& writer) {
    std::ostringstream os;
    writer(os);
    return os.str();
}

}  // namespace fmc::io
