#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "sspec/errors.hpp"
#include "sspec/numeric.hpp"

namespace sspec {

enum class Interp { linear, cubic };

/// Real integrable potential: either a built-in analytic form (tagged) or a
/// sampled grid with an interpolation rule.  Built-in tags bypass
/// interpolation so forward oracles stay exact.
class PotentialSpec {
  public:
    enum class Kind { zero, constant, sine, gaussian, grid };

    static PotentialSpec zero() { return PotentialSpec(Kind::zero); }
    static PotentialSpec constant(double c) {
        PotentialSpec p(Kind::constant);
        p.c_ = c;
        return p;
    }
    static PotentialSpec sine() { return PotentialSpec(Kind::sine); }
    static PotentialSpec gaussian(double mu, double sigma, double amp) {
        if (sigma <= 0) throw domain_error("PotentialSpec::gaussian: sigma must be positive");
        PotentialSpec p(Kind::gaussian);
        p.mu_ = mu; p.sigma_ = sigma; p.c_ = amp;
        return p;
    }
    static PotentialSpec from_grid(std::vector<double> r, std::vector<double> q,
                                   Interp interp = Interp::linear) {
        if (r.size() != q.size() || r.size() < 2)
            throw domain_error("PotentialSpec::from_grid: need >= 2 matching samples");
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (!std::isfinite(r[i]) || !std::isfinite(q[i]))
                throw domain_error("PotentialSpec::from_grid: non-finite sample");
            if (i > 0 && r[i] <= r[i - 1])
                throw domain_error("PotentialSpec::from_grid: grid not strictly increasing");
        }
        PotentialSpec p(Kind::grid);
        p.r_ = std::move(r);
        p.q_ = std::move(q);
        p.interp_ = interp;
        if (interp == Interp::cubic) p.build_spline();
        return p;
    }
    /// Two-column CSV (r, q); header row optional.
    static PotentialSpec from_csv(const std::string& path, Interp interp = Interp::linear) {
        std::ifstream in(path);
        if (!in) throw domain_error("PotentialSpec::from_csv: cannot open " + path);
        std::vector<double> r, q;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::replace(line.begin(), line.end(), ',', ' ');
            std::istringstream ss(line);
            double a, b;
            if (ss >> a >> b) {
                r.push_back(a);
                q.push_back(b);
            }
        }
        return from_grid(std::move(r), std::move(q), interp);
    }

    double operator()(double r) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::constant: return c_;
            case Kind::sine: return std::sin(r);
            case Kind::gaussian: {
                double u = (r - mu_) / sigma_;
                return c_ * std::exp(-0.5 * u * u);
            }
            case Kind::grid: return eval_grid(r);
        }
        return 0.0;
    }

    /// integral of q over [0, a]
    double integral_from_zero(double a) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::constant: return c_ * a;
            case Kind::sine: return 1.0 - std::cos(a);
            case Kind::gaussian: {
                const double s2 = sigma_ * std::sqrt(2.0);
                return c_ * sigma_ * std::sqrt(pi / 2.0) *
                       (std::erf((a - mu_) / s2) - std::erf(-mu_ / s2));
            }
            case Kind::grid: return integral_grid(0.0, a);
        }
        return 0.0;
    }

    /// integral of q over [r, infinity); for grids the tail past the last
    /// sample is taken as zero.
    double tail_integral(double r) const {
        switch (kind_) {
            case Kind::zero: return 0.0;
            case Kind::constant:
                throw domain_error("PotentialSpec::tail_integral: constant potential has divergent tail");
            case Kind::sine:
                throw domain_error("PotentialSpec::tail_integral: sine potential has no tail integral");
            case Kind::gaussian: {
                const double s2 = sigma_ * std::sqrt(2.0);
                return c_ * sigma_ * std::sqrt(pi / 2.0) * std::erfc((r - mu_) / s2);
            }
            case Kind::grid: return integral_grid(r, r_.back());
        }
        return 0.0;
    }

    /// Taylor data q(0+), q'(0+), q''(0+)/2 for series starts at the origin.
    std::array<double, 3> taylor_origin() const {
        switch (kind_) {
            case Kind::zero: return {0.0, 0.0, 0.0};
            case Kind::constant: return {c_, 0.0, 0.0};
            case Kind::sine: return {0.0, 1.0, 0.0};
            case Kind::gaussian: {
                double q0 = (*this)(0.0);
                double q1 = q0 * mu_ / (sigma_ * sigma_);
                double q2 = 0.5 * q0 * (mu_ * mu_ / std::pow(sigma_, 4) - 1.0 / (sigma_ * sigma_));
                return {q0, q1, q2};
            }
            case Kind::grid: {
                // quadratic through the first three interpolant values
                double h = std::min(r_.front(), (r_.back() - r_.front()) / 100.0);
                if (h <= 0) h = r_[1] - r_[0];
                double f0 = eval_grid(r_.front()), f1 = eval_grid(r_.front() + h),
                       f2 = eval_grid(r_.front() + 2 * h);
                double d1 = (-3 * f0 + 4 * f1 - f2) / (2 * h);
                double d2 = (f0 - 2 * f1 + f2) / (h * h);
                return {f0 - d1 * r_.front() + 0.5 * d2 * r_.front() * r_.front(),
                        d1 - d2 * r_.front(), 0.5 * d2};
            }
        }
        return {0.0, 0.0, 0.0};
    }

    Kind kind() const { return kind_; }
    bool is_zero() const { return kind_ == Kind::zero; }
    const std::vector<double>& grid() const { return r_; }
    const std::vector<double>& values() const { return q_; }
    double span_max() const { return kind_ == Kind::grid ? r_.back() : 1e30; }

    std::string tag() const {
        switch (kind_) {
            case Kind::zero: return "zero";
            case Kind::constant: return "const:" + std::to_string(c_);
            case Kind::sine: return "sin";
            case Kind::gaussian:
                return "gauss:" + std::to_string(mu_) + "," + std::to_string(sigma_) + "," +
                       std::to_string(c_);
            case Kind::grid: return "grid";
        }
        return "?";
    }

    void hash_into(Fnv1a& h) const {
        h.add(int(kind_));
        h.add(c_); h.add(mu_); h.add(sigma_);
        h.add(int(interp_));
        for (double x : r_) h.add(x);
        for (double x : q_) h.add(x);
    }

  private:
    explicit PotentialSpec(Kind k) : kind_(k) {}

    double eval_grid(double r) const {
        if (r <= r_.front()) return q_.front();
        if (r >= r_.back()) return q_.back();
        auto it = std::upper_bound(r_.begin(), r_.end(), r);
        std::size_t i = std::size_t(it - r_.begin()) - 1;
        double t = r - r_[i];
        if (interp_ == Interp::linear) {
            double w = t / (r_[i + 1] - r_[i]);
            return q_[i] * (1.0 - w) + q_[i + 1] * w;
        }
        return q_[i] + t * (spline_b_[i] + t * (spline_c_[i] + t * spline_d_[i]));
    }

    double integral_grid(double lo, double hi) const {
        // composite Simpson on a refinement of the interpolant
        lo = std::max(lo, r_.front());
        hi = std::min(hi, r_.back());
        if (hi <= lo) return 0.0;
        int n = std::max<int>(64, int(8 * r_.size()));
        if (n % 2) ++n;
        double h = (hi - lo) / n;
        KahanSum s;
        s.add(eval_grid(lo));
        s.add(eval_grid(hi));
        for (int i = 1; i < n; ++i) s.add(((i % 2) ? 4.0 : 2.0) * eval_grid(lo + i * h));
        return s.value() * h / 3.0;
    }

    void build_spline() {
        // natural cubic spline
        const std::size_t n = r_.size();
        spline_b_.assign(n, 0.0);
        spline_c_.assign(n, 0.0);
        spline_d_.assign(n, 0.0);
        if (n < 3) { interp_ = Interp::linear; return; }
        std::vector<double> h(n - 1), alpha(n, 0.0), l(n), mu(n), zv(n);
        for (std::size_t i = 0; i + 1 < n; ++i) h[i] = r_[i + 1] - r_[i];
        for (std::size_t i = 1; i + 1 < n; ++i)
            alpha[i] = 3.0 * ((q_[i + 1] - q_[i]) / h[i] - (q_[i] - q_[i - 1]) / h[i - 1]);
        l[0] = 1; mu[0] = 0; zv[0] = 0;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            l[i] = 2.0 * (r_[i + 1] - r_[i - 1]) - h[i - 1] * mu[i - 1];
            mu[i] = h[i] / l[i];
            zv[i] = (alpha[i] - h[i - 1] * zv[i - 1]) / l[i];
        }
        l[n - 1] = 1; zv[n - 1] = 0;
        std::vector<double> c(n, 0.0);
        for (std::size_t j = n - 1; j-- > 0;) {
            c[j] = zv[j] - mu[j] * c[j + 1];
            spline_b_[j] = (q_[j + 1] - q_[j]) / h[j] - h[j] * (c[j + 1] + 2.0 * c[j]) / 3.0;
            spline_c_[j] = c[j];
            spline_d_[j] = (c[j + 1] - c[j]) / (3.0 * h[j]);
        }
    }

    Kind kind_;
    double c_ = 0.0, mu_ = 0.0, sigma_ = 1.0;
    Interp interp_ = Interp::linear;
    std::vector<double> r_, q_;
    std::vector<double> spline_b_, spline_c_, spline_d_;
};

/// Parse the CLI potential tags: zero | const:c | sin | gauss:mu,sigma,A.
inline PotentialSpec parse_potential_tag(const std::string& tag) {
    if (tag == "zero") return PotentialSpec::zero();
    if (tag == "sin") return PotentialSpec::sine();
    if (tag.rfind("const:", 0) == 0) return PotentialSpec::constant(std::stod(tag.substr(6)));
    if (tag.rfind("gauss:", 0) == 0) {
        std::string rest = tag.substr(6);
        std::replace(rest.begin(), rest.end(), ',', ' ');
        std::istringstream ss(rest);
        double mu, sigma, amp;
        if (!(ss >> mu >> sigma >> amp))
            throw domain_error("parse_potential_tag: gauss needs mu,sigma,A");
        return PotentialSpec::gaussian(mu, sigma, amp);
    }
    throw domain_error("parse_potential_tag: unknown tag '" + tag + "'");
}

} // namespace sspec
