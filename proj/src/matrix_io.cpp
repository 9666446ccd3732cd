#include "mpjacobi/matrix_io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

namespace mpj {
namespace {

bool blank(const std::string& s) { return s.find_first_not_of(" \t\r") == std::string::npos; }

std::vector<std::string> tokens(const std::string& line)
{
    std::istringstream ss(line);
    std::vector<std::string> out;
    std::string t;
    while (ss >> t)
        out.push_back(t);
    return out;
}

double parse_value(const std::string& tok, std::size_t line)
{
    char* end = nullptr;
    const double v = std::strtod(tok.c_str(), &end);
    if (end == tok.c_str() || *end != '\0')
        throw ParseError(line, "'" + tok + "' is not a number");
    if (!std::isfinite(v))
        throw ParseError(line, "'" + tok + "' is not a finite binary64 value");
    return v;
}

} // namespace

NumberFormat parse_number_format(const std::string& s)
{
    if (s == "hex")
        return NumberFormat::Hex;
    if (s == "dec")
        return NumberFormat::Decimal;
    throw DomainError("unknown number format '" + s + "' (expected hex or dec)");
}

std::string format_number(double x, NumberFormat f)
{
    if (std::isnan(x))
        return "nan";
    if (std::isinf(x))
        return x > 0 ? "inf" : "-inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, f == NumberFormat::Hex ? "%a" : "%.17g", x);
    return buf;
}

SymMatrix<double> read_matrix(std::istream& in)
{
    std::string line;
    std::size_t lineno = 0;
    auto next_line = [&]() -> bool {
        while (std::getline(in, line)) {
            ++lineno;
            if (!blank(line))
                return true;
        }
        return false;
    };

    if (!next_line())
        throw ParseError(lineno + 1, "missing matrix dimension");
    const auto head = tokens(line);
    if (head.size() != 1)
        throw ParseError(lineno, "first line must hold only the dimension n");
    char* end = nullptr;
    const long long nn = std::strtoll(head[0].c_str(), &end, 10);
    if (*end != '\0' || nn <= 0)
        throw ParseError(lineno, "dimension '" + head[0] + "' is not a positive integer");
    const auto n = static_cast<std::size_t>(nn);

    Matrix<double> m(n, n);
    std::vector<std::size_t> row_line(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!next_line())
            throw ParseError(lineno + 1, "expected " + std::to_string(n) + " rows, found " + std::to_string(i));
        const auto t = tokens(line);
        if (t.size() != n)
            throw ParseError(lineno, "expected " + std::to_string(n) + " values, found " + std::to_string(t.size()));
        for (std::size_t j = 0; j < n; ++j)
            m(i, j) = parse_value(t[j], lineno);
        row_line[i] = lineno;
    }
    if (next_line())
        throw ParseError(lineno, "unexpected data after the last row");
    for (std::size_t j = 0; j < n; ++j)
        for (std::size_t i = j + 1; i < n; ++i)
            if (m(i, j) != m(j, i))
                throw ParseError(row_line[i], "matrix is not symmetric: entry (" + std::to_string(i + 1) + ", " +
                                                  std::to_string(j + 1) + ") differs from its transpose");
    return SymMatrix<double>::from_full(std::move(m));
}

SymMatrix<double> read_matrix_file(const std::string& path)
{
    std::ifstream f(path);
    if (!f)
        throw Error("cannot open matrix file '" + path + "'");
    return read_matrix(f);
}

void write_matrix(std::ostream& out, const Matrix<double>& m, NumberFormat f)
{
    if (m.rows() != m.cols())
        throw DomainError("write_matrix: matrix must be square");
    out << m.rows() << '\n';
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (j)
                out << ' ';
            out << format_number(m(i, j), f);
        }
        out << '\n';
    }
}

void write_matrix(std::ostream& out, const SymMatrix<double>& m, NumberFormat f) { write_matrix(out, m.full(), f); }

} // namespace mpj
