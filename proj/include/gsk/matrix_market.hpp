#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "gsk/csr_matrix.hpp"

namespace gsk {

// Matrix Market exchange format. Matrices use `coordinate real general` with
// 1-based indices on disk; right-hand sides use a one-column `array real general`.
// Values are written with 17 significant digits so doubles round-trip exactly.

CsrMatrix read_mm_matrix(std::istream& in);
Vector read_mm_array(std::istream& in);
void write_mm_matrix(std::ostream& out, const CsrMatrix& a);
void write_mm_array(std::ostream& out, std::span<const double> v);

/// Companion rhs file for a matrix file: `foo.mtx` -> `foo_rhs.mtx`.
std::filesystem::path rhs_companion(const std::filesystem::path& matrix_path);

/// Reads a system from a directory holding matrix.mtx and rhs.mtx, or from a
/// matrix file with its rhs companion next to it.
LinearSystem read_matrix_market(const std::filesystem::path& path);

/// Writes the inverse layout of read_matrix_market. A path without a `.mtx`
/// extension is treated as a directory and created if needed.
void write_matrix_market(const LinearSystem& system, const std::filesystem::path& path);

} // namespace gsk
