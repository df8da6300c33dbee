#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>

#include "tomolift/quantum_core.hpp"

namespace tomolift {

/// Plain-text matrix format:
///
///   dim d
///   a+bi a+bi ... (d entries)
///   ... (d rows)
///
/// Entries are written with 17 significant digits so a write/read cycle is
/// lossless.
void write_matrix(std::ostream& os, const ComplexMatrix& m);
void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m);

/// Parses one "a+bi" / "a-bi" token. Throws std::invalid_argument.
Complex parse_complex(std::string_view token);
std::string format_complex(Complex z);

ComplexMatrix read_matrix(std::istream& is);
/// Reads and validates the density-matrix invariants (throws InvalidState).
DensityMatrix read_density_matrix(std::istream& is);
DensityMatrix read_density_matrix_file(const std::filesystem::path& path);

}  // namespace tomolift
