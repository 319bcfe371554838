#pragma once

#include <cmath>
#include <vector>

#include "sspec/csv.hpp"
#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"

namespace sspec {

/// Indexed, strictly increasing eigenvalue sequence z_n for a stated boundary
/// problem.  Indices run contiguously from first_index (1 unless the caller
/// requested a higher window).
struct EigenSpectrum {
    int first_index = 1;
    std::vector<double> z;
    std::vector<double> residual; // optional, |u(a)| / max|u| per level

    int index(std::size_t k) const { return first_index + int(k); }
    std::size_t size() const { return z.size(); }

    void validate() const {
        for (std::size_t i = 0; i < z.size(); ++i) {
            if (!std::isfinite(z[i])) throw domain_error("EigenSpectrum: non-finite value");
            if (i > 0 && z[i] <= z[i - 1])
                throw domain_error("EigenSpectrum: values not strictly increasing");
        }
    }

    std::string to_csv() const {
        CsvWriter w({"n", "z_n", "sqrt_z_n", "residual"});
        for (std::size_t i = 0; i < z.size(); ++i) {
            double sq = z[i] >= 0 ? std::sqrt(z[i]) : std::nan("");
            w.row({double(index(i)), z[i], sq, i < residual.size() ? residual[i] : 0.0});
        }
        return w.str();
    }
};

/// Point estimate with a spread-based uncertainty.
struct DefectEstimate {
    double delta = 0.0;
    double uncertainty = 0.0;
    std::vector<double> per_level; // raw per-level estimates
};

namespace detail {

/// Extrapolate per-level defect estimates to n -> infinity: weighted fit in
/// 1/n over the top third of the index range (quadratic once enough levels
/// are available; the remainder of the level law is o(1/n) of unknown sign).
inline DefectEstimate extrapolate_defect(const std::vector<double>& indices,
                                         std::vector<double> per_level) {
    const int m = int(per_level.size());
    if (m < 5) throw domain_error("defect estimate: need at least 5 levels");
    int lo = std::max(0, m - std::max(5, m / 3));
    std::vector<double> xs, ys, ws;
    for (int i = lo; i < m; ++i) {
        xs.push_back(1.0 / indices[i]);
        ys.push_back(per_level[i]);
        ws.push_back(indices[i] * indices[i]);
    }
    DefectEstimate est;
    int deg = int(xs.size()) >= 8 ? 2 : 1;
    est.delta = extrapolate_poly_fit(xs, ys, ws, deg);
    double d1 = extrapolate_poly_fit(xs, ys, ws, std::max(1, deg - 1));
    double spread = 0.0;
    for (std::size_t i = 0; i + 1 < ys.size(); ++i)
        spread = std::max(spread, std::abs(ys[i + 1] - ys[i]));
    est.uncertainty = std::max(std::abs(est.delta - d1), spread / double(xs.size()));
    est.per_level = std::move(per_level);
    return est;
}

} // namespace detail

} // namespace sspec
