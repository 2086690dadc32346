#include "gsk/ilut.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <queue>

namespace gsk {

void IlutConfig::validate() const
{
    if (!(drop_tol >= 0.0)) throw Error("ilut: drop tolerance must be >= 0");
    if (!(fill >= 0.0)) throw Error("ilut: fill must be >= 0");
}

std::size_t ilut_extra_per_row(const CsrMatrix& a, double fill)
{
    if (fill <= 1.0 || a.size() == 0) return 0;
    const double per_row = (fill - 1.0) * static_cast<double>(a.nnz()) /
                           (2.0 * static_cast<double>(a.size()));
    return static_cast<std::size_t>(std::ceil(per_row));
}

namespace {

enum class Slot : unsigned char { Unused, Orig, Fill };

struct Builder {
    std::vector<std::size_t> row_ptr{0};
    std::vector<std::size_t> cols;
    std::vector<double> vals;

    void end_row() { row_ptr.push_back(cols.size()); }
};

std::pair<std::span<const std::size_t>, std::span<const double>> upper_row_view(const Builder& b,
                                                                                std::size_t k)
{
    const std::size_t s = b.row_ptr[k];
    const std::size_t e = b.row_ptr[k + 1];
    return {std::span<const std::size_t>(b.cols).subspan(s, e - s),
            std::span<const double>(b.vals).subspan(s, e - s)};
}

} // namespace

IluFactors ilut_factor(const CsrMatrix& a, const IlutConfig& cfg)
{
    cfg.validate();
    const std::size_t n = a.size();
    const std::size_t extra = ilut_extra_per_row(a, cfg.fill);
    constexpr double eps = std::numeric_limits<double>::epsilon();

    std::vector<double> w(n, 0.0);
    std::vector<Slot> slot(n, Slot::Unused);
    Builder lower, upper;
    Vector inv_diag(n);

    std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> pending;
    std::vector<std::size_t> kept_fill_l;
    std::vector<std::size_t> l_cols, u_cols, touched;

    for (std::size_t i = 0; i < n; ++i) {
        const auto ai = a.row(i);
        const double row2 = lp_norm(ai.vals, 2);
        const double thresh = cfg.drop_tol * row2;
        const auto dropped = [&](double v) { return thresh > 0.0 && std::fabs(v) < thresh; };

        touched.clear();
        u_cols.clear();
        kept_fill_l.clear();
        slot[i] = Slot::Orig;
        w[i] = 0.0;
        touched.push_back(i);
        for (std::size_t k = 0; k < ai.size(); ++k) {
            const std::size_t j = ai.cols[k];
            w[j] = ai.vals[k];
            slot[j] = Slot::Orig;
            if (j < i) pending.push(j);
            if (j > i) u_cols.push_back(j);
            if (j != i) touched.push_back(j);
        }

        while (!pending.empty()) {
            const std::size_t k = pending.top();
            pending.pop();

            const double mult = w[k] * inv_diag[k];
            w[k] = mult;
            if (dropped(mult) || mult == 0.0) {
                slot[k] = Slot::Unused;
                w[k] = 0.0;
                continue;
            }
            if (slot[k] == Slot::Fill) {
                if (kept_fill_l.size() < extra) {
                    kept_fill_l.push_back(k);
                } else {
                    auto smallest = std::min_element(
                        kept_fill_l.begin(), kept_fill_l.end(),
                        [&](std::size_t x, std::size_t y) { return std::fabs(w[x]) < std::fabs(w[y]); });
                    if (smallest == kept_fill_l.end() || std::fabs(mult) <= std::fabs(w[*smallest])) {
                        slot[k] = Slot::Unused;
                        w[k] = 0.0;
                        continue;
                    }
                    slot[*smallest] = Slot::Unused;
                    w[*smallest] = 0.0;
                    *smallest = k;
                }
            }

            const auto uk = upper_row_view(upper, k);
            for (std::size_t t = 1; t < uk.first.size(); ++t) {
                const std::size_t j = uk.first[t];
                const double update = mult * uk.second[t];
                if (slot[j] != Slot::Unused) {
                    w[j] -= update;
                } else if (update != 0.0 && !dropped(update)) {
                    w[j] = -update;
                    slot[j] = Slot::Fill;
                    touched.push_back(j);
                    if (j > i) {
                        u_cols.push_back(j);
                    } else {
                        pending.push(j);
                    }
                }
            }
        }

        // L row: surviving entries in pattern(A) plus kept fill, then the unit diagonal.
        l_cols.clear();
        for (std::size_t k = 0; k < ai.size() && ai.cols[k] < i; ++k) {
            if (slot[ai.cols[k]] == Slot::Orig) l_cols.push_back(ai.cols[k]);
        }
        l_cols.insert(l_cols.end(), kept_fill_l.begin(), kept_fill_l.end());
        std::sort(l_cols.begin(), l_cols.end());
        for (std::size_t j : l_cols) {
            lower.cols.push_back(j);
            lower.vals.push_back(w[j]);
        }
        lower.cols.push_back(i);
        lower.vals.push_back(1.0);
        lower.end_row();

        const double pivot = w[i];
        if (!std::isfinite(pivot) || std::fabs(pivot) <= eps * eps * row2) {
            throw Error("ilut: zero pivot at row " + std::to_string(i));
        }
        inv_diag[i] = 1.0 / pivot;

        // U row: pivot, entries in pattern(A), and the `extra` largest fill entries.
        std::vector<std::size_t> keep;
        std::vector<std::size_t> fill_u;
        for (std::size_t j : u_cols) {
            if (dropped(w[j])) continue;
            if (slot[j] == Slot::Orig) {
                keep.push_back(j);
            } else if (w[j] != 0.0) {
                fill_u.push_back(j);
            }
        }
        if (fill_u.size() > extra) {
            std::nth_element(fill_u.begin(), fill_u.begin() + static_cast<std::ptrdiff_t>(extra),
                             fill_u.end(), [&](std::size_t x, std::size_t y) {
                                 return std::fabs(w[x]) > std::fabs(w[y]);
                             });
            fill_u.resize(extra);
        }
        keep.insert(keep.end(), fill_u.begin(), fill_u.end());
        std::sort(keep.begin(), keep.end());
        upper.cols.push_back(i);
        upper.vals.push_back(pivot);
        for (std::size_t j : keep) {
            upper.cols.push_back(j);
            upper.vals.push_back(w[j]);
        }
        upper.end_row();

        for (std::size_t j : touched) {
            w[j] = 0.0;
            slot[j] = Slot::Unused;
        }
    }

    return {CsrMatrix(n, std::move(lower.row_ptr), std::move(lower.cols), std::move(lower.vals)),
            CsrMatrix(n, std::move(upper.row_ptr), std::move(upper.cols), std::move(upper.vals)),
            std::move(inv_diag)};
}

void apply_precond(const IluFactors& f, std::span<const double> r, std::span<double> z)
{
    const std::size_t n = f.size();
    check_same_length(r.size(), n, "apply_precond r");
    check_same_length(z.size(), n, "apply_precond z");

    const auto lp = f.lower.row_ptr();
    const auto lc = f.lower.col_idx();
    const auto lv = f.lower.values();
    for (std::size_t i = 0; i < n; ++i) {
        double s = r[i];
        // last entry of each L row is the unit diagonal
        for (std::size_t k = lp[i]; k + 1 < lp[i + 1]; ++k) s -= lv[k] * z[lc[k]];
        z[i] = s;
    }

    const auto up = f.upper.row_ptr();
    const auto uc = f.upper.col_idx();
    const auto uv = f.upper.values();
    for (std::size_t i = n; i-- > 0;) {
        double s = z[i];
        for (std::size_t k = up[i] + 1; k < up[i + 1]; ++k) s -= uv[k] * z[uc[k]];
        z[i] = s * f.inv_diag[i];
    }
}

Vector apply_precond(const IluFactors& f, std::span<const double> r)
{
    Vector z(r.size());
    apply_precond(f, r, z);
    return z;
}

} // namespace gsk
