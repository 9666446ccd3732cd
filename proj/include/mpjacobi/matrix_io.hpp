#pragma once

// Plain-text matrix files: the first line holds n, then n lines of n values.
// Values are hex-float (%a, the normative form) or decimal with 17
// significant digits; both round-trip exactly.

#include <iosfwd>
#include <string>

#include "mpjacobi/matrix.hpp"

namespace mpj {

enum class NumberFormat { Hex, Decimal };

/// "hex" or "dec"
NumberFormat parse_number_format(const std::string& s);

/// Formats one value; infinities and NaN become "inf", "-inf", "nan".
std::string format_number(double x, NumberFormat f);

/// Throws ParseError (with a 1-based line number) on malformed input and on
/// a matrix that is not exactly symmetric.
SymMatrix<double> read_matrix(std::istream& in);
SymMatrix<double> read_matrix_file(const std::string& path);

void write_matrix(std::ostream& out, const Matrix<double>& m, NumberFormat f = NumberFormat::Hex);
void write_matrix(std::ostream& out, const SymMatrix<double>& m, NumberFormat f = NumberFormat::Hex);

} // namespace mpj
