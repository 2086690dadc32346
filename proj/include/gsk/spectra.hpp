#pragma once

#include <complex>
#include <filesystem>
#include <string>
#include <vector>

#include "gsk/csr_matrix.hpp"

namespace gsk {

using Complex = std::complex<double>;

inline constexpr std::size_t kHistogramBins = 100;

/// All eigenvalues of a real square matrix: balancing, Householder reduction to
/// upper Hessenberg form, then the implicitly shifted Francis double-shift QR
/// iteration. Throws if the iteration budget (30 n sweeps) runs out.
std::vector<Complex> eigenvalues_dense(const DenseMatrix& a);

/// Diagonal similarity that equalizes row and column 1-norms (powers of two only).
void balance(DenseMatrix& a);
/// Orthogonal similarity reduction to upper Hessenberg form, in place.
void reduce_to_hessenberg(DenseMatrix& a);
/// Eigenvalues of an upper Hessenberg matrix (destroys the input).
std::vector<Complex> hessenberg_eigenvalues(DenseMatrix& h);

struct EigenReport {
    std::vector<Complex> eigenvalues;
    double lambda_min_mod = 0.0;
    double lambda_max_mod = 0.0;
    double cond_ratio = 0.0;
    /// Histogram of real parts over [re_min, re_max], kHistogramBins equal bins.
    std::vector<std::size_t> hist;
    double re_min = 0.0;
    double re_max = 0.0;
    /// Bin containing Re = 0, or the first bin when every real part is positive
    /// (the last when every real part is negative).
    std::size_t origin_bin = 0;
    std::size_t origin_bin_count = 0;

    double bin_width() const;
    double bin_center(std::size_t bin) const;
};

EigenReport make_eigen_report(std::vector<Complex> eigenvalues);
EigenReport eigen_report(const LinearSystem& system);

std::string eigen_report_to_json(const EigenReport& report);

/// Writes `re,im` rows to `spectrum_csv` and `bin_center,count` rows to `histogram_csv`.
void export_spectrum(const EigenReport& report, const std::filesystem::path& spectrum_csv,
                     const std::filesystem::path& histogram_csv);
/// Histogram goes next to the spectrum as `<stem>_hist.csv`.
void export_spectrum(const EigenReport& report, const std::filesystem::path& spectrum_csv);

std::vector<Complex> read_spectrum_csv(const std::filesystem::path& path);

} // namespace gsk
