#include "gsk/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

namespace gsk {

void balance(DenseMatrix& a)
{
    constexpr double radix = 2.0;
    constexpr double sqrdx = radix * radix;
    const std::size_t n = a.n;
    bool done = false;
    while (!done) {
        done = true;
        for (std::size_t i = 0; i < n; ++i) {
            double r = 0.0, c = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) {
                    c += std::fabs(a(j, i));
                    r += std::fabs(a(i, j));
                }
            }
            if (c == 0.0 || r == 0.0) continue;
            double g = r / radix;
            double f = 1.0;
            const double s = c + r;
            while (c < g) {
                f *= radix;
                c *= sqrdx;
            }
            g = r * radix;
            while (c > g) {
                f /= radix;
                c /= sqrdx;
            }
            if ((c + r) / f < 0.95 * s) {
                done = false;
                g = 1.0 / f;
                for (std::size_t j = 0; j < n; ++j) a(i, j) *= g;
                for (std::size_t j = 0; j < n; ++j) a(j, i) *= f;
            }
        }
    }
}

void reduce_to_hessenberg(DenseMatrix& a)
{
    const std::size_t n = a.n;
    if (n < 3) return;
    std::vector<double> v(n), w(n);
    for (std::size_t k = 0; k + 2 < n; ++k) {
        const std::size_t len = n - k - 1;
        double scale = 0.0;
        for (std::size_t i = 0; i < len; ++i) scale += std::fabs(a(k + 1 + i, k));
        if (scale == 0.0) continue;
        double sigma = 0.0;
        for (std::size_t i = 0; i < len; ++i) {
            v[i] = a(k + 1 + i, k) / scale;
            sigma += v[i] * v[i];
        }
        const double norm = std::sqrt(sigma);
        const double alpha = v[0] > 0.0 ? -norm : norm;
        const double vtv = sigma - v[0] * alpha;
        if (vtv == 0.0) continue;
        v[0] -= alpha;
        // H = I - v v^T / vtv'. With v[0] shifted, v^T v = 2 * vtv.
        const double tau = 1.0 / vtv;

        // left: rows k+1.., columns k..
        std::fill(w.begin() + static_cast<std::ptrdiff_t>(k), w.end(), 0.0);
        for (std::size_t i = 0; i < len; ++i) {
            const double vi = v[i];
            const double* row = &a.data[(k + 1 + i) * n];
            for (std::size_t j = k; j < n; ++j) w[j] += vi * row[j];
        }
        for (std::size_t i = 0; i < len; ++i) {
            const double f = tau * v[i];
            double* row = &a.data[(k + 1 + i) * n];
            for (std::size_t j = k; j < n; ++j) row[j] -= f * w[j];
        }
        // right: all rows, columns k+1..
        for (std::size_t i = 0; i < n; ++i) {
            double* row = &a.data[i * n + k + 1];
            double s = 0.0;
            for (std::size_t j = 0; j < len; ++j) s += row[j] * v[j];
            s *= tau;
            for (std::size_t j = 0; j < len; ++j) row[j] -= s * v[j];
        }
        a(k + 1, k) = alpha * scale;
        for (std::size_t i = k + 2; i < n; ++i) a(i, k) = 0.0;
    }
}

std::vector<Complex> hessenberg_eigenvalues(DenseMatrix& a)
{
    const int n = static_cast<int>(a.n);
    std::vector<Complex> wri(a.n);
    if (n == 0) return wri;
    constexpr double eps = std::numeric_limits<double>::epsilon();
    const auto sign = [](double mag, double ref) { return ref >= 0.0 ? std::fabs(mag) : -std::fabs(mag); };
    const auto A = [&](int i, int j) -> double& {
        return a.data[static_cast<std::size_t>(i) * a.n + static_cast<std::size_t>(j)];
    };

    double anorm = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = std::max(i - 1, 0); j < n; ++j) anorm += std::fabs(A(i, j));
    }

    const long budget = 30L * n;
    long total = 0;
    int nn = n - 1;
    double t = 0.0;
    while (nn >= 0) {
        int its = 0;
        int l = 0;
        do {
            for (l = nn; l > 0; --l) {
                double s = std::fabs(A(l - 1, l - 1)) + std::fabs(A(l, l));
                if (s == 0.0) s = anorm;
                if (std::fabs(A(l, l - 1)) <= eps * s) {
                    A(l, l - 1) = 0.0;
                    break;
                }
            }
            double x = A(nn, nn);
            if (l == nn) {
                wri[static_cast<std::size_t>(nn--)] = x + t;
            } else {
                double y = A(nn - 1, nn - 1);
                double w = A(nn, nn - 1) * A(nn - 1, nn);
                if (l == nn - 1) {
                    const double p = 0.5 * (y - x);
                    const double q = p * p + w;
                    double z = std::sqrt(std::fabs(q));
                    x += t;
                    if (q >= 0.0) {
                        z = p + sign(z, p);
                        wri[static_cast<std::size_t>(nn - 1)] = wri[static_cast<std::size_t>(nn)] = x + z;
                        if (z != 0.0) wri[static_cast<std::size_t>(nn)] = x - w / z;
                    } else {
                        wri[static_cast<std::size_t>(nn)] = Complex(x + p, -z);
                        wri[static_cast<std::size_t>(nn - 1)] = Complex(x + p, z);
                    }
                    nn -= 2;
                } else {
                    if (++total > budget) {
                        throw Error("eigenvalues: QR iteration did not converge for eigenvalue index " +
                                    std::to_string(nn));
                    }
                    if (its > 0 && its % 10 == 0) {
                        // exceptional shift
                        t += x;
                        for (int i = 0; i <= nn; ++i) A(i, i) -= x;
                        const double s = std::fabs(A(nn, nn - 1)) + std::fabs(A(nn - 1, nn - 2));
                        y = x = 0.75 * s;
                        w = -0.4375 * s * s;
                    }
                    ++its;
                    int m = nn - 2;
                    double p = 0.0, q = 0.0, r = 0.0, z = 0.0;
                    for (; m >= l; --m) {
                        z = A(m, m);
                        r = x - z;
                        double s = y - z;
                        p = (r * s - w) / A(m + 1, m) + A(m, m + 1);
                        q = A(m + 1, m + 1) - z - r - s;
                        r = A(m + 2, m + 1);
                        s = std::fabs(p) + std::fabs(q) + std::fabs(r);
                        p /= s;
                        q /= s;
                        r /= s;
                        if (m == l) break;
                        const double u = std::fabs(A(m, m - 1)) * (std::fabs(q) + std::fabs(r));
                        const double v = std::fabs(p) * (std::fabs(A(m - 1, m - 1)) + std::fabs(z) +
                                                         std::fabs(A(m + 1, m + 1)));
                        if (u <= eps * v) break;
                    }
                    for (int i = m; i < nn - 1; ++i) {
                        A(i + 2, i) = 0.0;
                        if (i != m) A(i + 2, i - 1) = 0.0;
                    }
                    for (int k = m; k < nn; ++k) {
                        if (k != m) {
                            p = A(k, k - 1);
                            q = A(k + 1, k - 1);
                            r = 0.0;
                            if (k + 1 != nn) r = A(k + 2, k - 1);
                            if ((x = std::fabs(p) + std::fabs(q) + std::fabs(r)) != 0.0) {
                                p /= x;
                                q /= x;
                                r /= x;
                            }
                        }
                        const double s = sign(std::sqrt(p * p + q * q + r * r), p);
                        if (s == 0.0) continue;
                        if (k == m) {
                            if (l != m) A(k, k - 1) = -A(k, k - 1);
                        } else {
                            A(k, k - 1) = -s * x;
                        }
                        p += s;
                        x = p / s;
                        y = q / s;
                        z = r / s;
                        q /= p;
                        r /= p;
                        double* rk = &A(k, 0);
                        double* rk1 = &A(k + 1, 0);
                        if (k + 1 != nn) {
                            double* rk2 = &A(k + 2, 0);
                            for (int j = k; j <= nn; ++j) {
                                const double pj = rk[j] + q * rk1[j] + r * rk2[j];
                                rk2[j] -= pj * z;
                                rk1[j] -= pj * y;
                                rk[j] -= pj * x;
                            }
                        } else {
                            for (int j = k; j <= nn; ++j) {
                                const double pj = rk[j] + q * rk1[j];
                                rk1[j] -= pj * y;
                                rk[j] -= pj * x;
                            }
                        }
                        const int mmin = nn < k + 3 ? nn : k + 3;
                        for (int i = l; i <= mmin; ++i) {
                            double pi = x * A(i, k) + y * A(i, k + 1);
                            if (k + 1 != nn) {
                                pi += z * A(i, k + 2);
                                A(i, k + 2) -= pi * r;
                            }
                            A(i, k + 1) -= pi * q;
                            A(i, k) -= pi;
                        }
                    }
                }
            }
        } while (l < nn - 1);
    }
    return wri;
}

std::vector<Complex> eigenvalues_dense(const DenseMatrix& a)
{
    DenseMatrix h = a;
    for (double v : h.data) {
        if (!std::isfinite(v)) throw Error("eigenvalues: matrix has non-finite entries");
    }
    balance(h);
    reduce_to_hessenberg(h);
    return hessenberg_eigenvalues(h);
}

double EigenReport::bin_width() const
{
    return (re_max - re_min) / static_cast<double>(kHistogramBins);
}

double EigenReport::bin_center(std::size_t bin) const
{
    return re_min + (static_cast<double>(bin) + 0.5) * bin_width();
}

EigenReport make_eigen_report(std::vector<Complex> eigenvalues)
{
    EigenReport rep;
    rep.eigenvalues = std::move(eigenvalues);
    rep.hist.assign(kHistogramBins, 0);
    if (rep.eigenvalues.empty()) return rep;

    rep.lambda_min_mod = std::numeric_limits<double>::infinity();
    rep.re_min = std::numeric_limits<double>::infinity();
    rep.re_max = -std::numeric_limits<double>::infinity();
    for (const auto& z : rep.eigenvalues) {
        const double m = std::abs(z);
        rep.lambda_min_mod = std::min(rep.lambda_min_mod, m);
        rep.lambda_max_mod = std::max(rep.lambda_max_mod, m);
        rep.re_min = std::min(rep.re_min, z.real());
        rep.re_max = std::max(rep.re_max, z.real());
    }
    rep.cond_ratio = rep.lambda_min_mod > 0.0 ? rep.lambda_max_mod / rep.lambda_min_mod
                                              : std::numeric_limits<double>::infinity();

    const double width = rep.bin_width();
    const auto bin_of = [&](double re) -> std::size_t {
        if (!(width > 0.0)) return 0;
        const double pos = std::floor((re - rep.re_min) / width);
        if (pos < 0.0) return 0;
        return std::min(static_cast<std::size_t>(pos), kHistogramBins - 1);
    };
    for (const auto& z : rep.eigenvalues) ++rep.hist[bin_of(z.real())];

    if (rep.re_min > 0.0) {
        rep.origin_bin = 0;
    } else if (rep.re_max < 0.0) {
        rep.origin_bin = kHistogramBins - 1;
    } else {
        rep.origin_bin = bin_of(0.0);
    }
    rep.origin_bin_count = rep.hist[rep.origin_bin];
    return rep;
}

EigenReport eigen_report(const LinearSystem& system)
{
    return make_eigen_report(eigenvalues_dense(to_dense(system.matrix)));
}

std::string eigen_report_to_json(const EigenReport& r)
{
    nlohmann::json j;
    j["n"] = r.eigenvalues.size();
    j["lambda_min_mod"] = r.lambda_min_mod;
    j["lambda_max_mod"] = r.lambda_max_mod;
    j["cond_ratio"] = r.cond_ratio;
    j["re_min"] = r.re_min;
    j["re_max"] = r.re_max;
    j["bins"] = kHistogramBins;
    j["origin_bin"] = r.origin_bin;
    j["origin_bin_count"] = r.origin_bin_count;
    j["hist"] = r.hist;
    return j.dump(2);
}

namespace {

std::string fmt17(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

void export_spectrum(const EigenReport& report, const std::filesystem::path& spectrum_csv,
                     const std::filesystem::path& histogram_csv)
{
    std::ofstream s(spectrum_csv);
    std::ofstream h(histogram_csv);
    if (!s || !h) throw Error("cannot write spectrum files next to " + spectrum_csv.string());
    s << "re,im\n";
    for (const auto& z : report.eigenvalues) s << fmt17(z.real()) << ',' << fmt17(z.imag()) << '\n';
    h << "bin_center,count\n";
    for (std::size_t b = 0; b < report.hist.size(); ++b) {
        h << fmt17(report.bin_center(b)) << ',' << report.hist[b] << '\n';
    }
    if (!s || !h) throw Error("write failed for " + spectrum_csv.string());
}

void export_spectrum(const EigenReport& report, const std::filesystem::path& spectrum_csv)
{
    auto hist = spectrum_csv;
    hist.replace_filename(spectrum_csv.stem().string() + "_hist.csv");
    export_spectrum(report, spectrum_csv, hist);
}

std::vector<Complex> read_spectrum_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) throw Error("cannot open " + path.string());
    std::string line;
    std::size_t line_no = 1;
    if (!std::getline(in, line) || line != "re,im") throw ParseError("expected header 're,im'", 1);
    std::vector<Complex> out;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) throw ParseError("expected two columns", line_no);
        try {
            out.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
        } catch (const std::exception&) {
            throw ParseError("malformed number", line_no);
        }
    }
    return out;
}

} // namespace gsk
