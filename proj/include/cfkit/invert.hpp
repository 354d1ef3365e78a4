#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "char_fn.hpp"
#include "errors.hpp"

namespace cfkit {

struct NewtonOptions {
    int max_iter = 100;
    double x_tol_scale = 1e-8; // absolute tolerance = x_tol_scale * (B - A)
    double p_tol = 1e-10;
};

struct InversionOptions {
    int quadrature_n = 1 << 10;   // starting N; grown by doubling
    double six_sigma_k = 6.0;     // (A,B) = mean -+ k * sd
    double tail_epsilon = 1e-12;  // stop growing N once |cf(T)|/T < epsilon
    double diff_step = 1e-4;      // h for the moment stencils
    bool is_compound = false;     // clamp A to 0, respect the atom at zero
    std::optional<std::pair<double, double>> support; // explicit (A,B)
    std::optional<double> t_max;  // explicit T; disables the doubling rule
    NewtonOptions newton;
};

struct GridSelection {
    double delta = 0.0;
    long n = 0;
    double t_max = 0.0;
    double a = 0.0;
    double b = 0.0;
    bool capped = false;          // hit the hard node cap before the tail test
    double tail_magnitude = 0.0;  // |cf(T)|/T at the final T
    double mean = 0.0;
    double variance = 0.0;
};

struct InversionDiagnostics {
    double delta = 0.0;
    long n = 0;
    double t_max = 0.0;
    double tail_magnitude = 0.0;
    bool n_capped = false;
    double a = 0.0, b = 0.0;
    double mean = 0.0, variance = 0.0;
    long cf_evaluations = 0;
    long cdf_clamp_count = 0;
    double max_monotonicity_violation = 0.0; // worst raw cdf decrease
    long pdf_negative_count = 0;
    std::vector<int> newton_iterations;      // per requested quantile
    bool atom_split = false;                 // compound atom handled separately
    double prob_zero = 0.0;
};

struct DistributionResult {
    std::vector<double> x_grid;
    std::vector<double> pdf;
    std::vector<double> cdf;
    std::vector<double> probs;
    std::vector<double> quantiles;
    double mean_estimate = 0.0;
    double var_estimate = 0.0;
    InversionDiagnostics diagnostics;
};

// Mean and variance from the CF. Closed-form hints win when present;
// otherwise eighth-order central difference stencils on cf at h..4h
// (Hermitian symmetry folds the negative nodes into Re/Im parts).
inline std::pair<double, double> moments_by_differentiation(const CharFn& cf, double h = 1e-4) {
    if (!(h > 0.0) || !std::isfinite(h))
        throw invalid_argument_error("moments_by_differentiation: need h > 0");
    Complex c1 = cf.eval(h), c2 = cf.eval(2.0 * h), c3 = cf.eval(3.0 * h),
            c4 = cf.eval(4.0 * h);
    for (Complex c : {c1, c2, c3, c4})
        if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
            throw numeric_failure_error(
                "moments_by_differentiation: non-finite CF value on the stencil near t=0");
    double mean = (8.0 / 5.0 * c1.imag() - 2.0 / 5.0 * c2.imag() +
                   8.0 / 105.0 * c3.imag() - 2.0 / 280.0 * c4.imag()) / h;
    double ex2 = (205.0 / 72.0 - 16.0 / 5.0 * c1.real() + 2.0 / 5.0 * c2.real() -
                  16.0 / 315.0 * c3.real() + 2.0 / 560.0 * c4.real()) / (h * h);
    return {mean, ex2 - mean * mean};
}

inline std::pair<double, double> estimate_moments(const CharFn& cf, double h = 1e-4) {
    if (const auto& hints = cf.moment_hints()) return {hints->mean, hints->variance};
    return moments_by_differentiation(cf, h);
}

namespace detail {

constexpr long kNodeCap = 1L << 22;
constexpr double kAtomThreshold = 1e-13;

// One inversion setup: grid selection plus the single pass of CF values that
// every downstream PDF/CDF/quantile evaluation reuses. For compound CFs with
// an atom at zero the stored values are of the conditional (loss-positive)
// CF (cf - p0)/(1 - p0), whose tail actually decays; results are recombined
// as cdf = p0 + (1-p0) cdf_c and pdf = (1-p0) pdf_c.
class InversionEngine {
public:
    static InversionEngine build(const CharFn& cf, const InversionOptions& opts) {
        validate(opts);
        InversionEngine e;
        e.compound_ = opts.is_compound || cf.is_compound();
        auto [mean, variance] = estimate_moments(cf, opts.diff_step);
        if (!std::isfinite(mean) || !std::isfinite(variance))
            throw numeric_failure_error("inversion: non-finite moment estimates");
        e.mean_ = mean;
        e.variance_ = variance;

        if (opts.support) {
            e.a_ = opts.support->first;
            e.b_ = opts.support->second;
        } else {
            if (!(variance > 0.0))
                throw degenerate_support_error(
                    "inversion: nonpositive variance estimate (" + std::to_string(variance) +
                    "); supply an explicit support (A,B)");
            double sd = std::sqrt(variance);
            e.a_ = mean - opts.six_sigma_k * sd;
            e.b_ = mean + opts.six_sigma_k * sd;
            if (e.compound_ && e.a_ < 0.0) e.a_ = 0.0; // before delta is fixed
        }
        e.delta_ = 2.0 * M_PI / (e.b_ - e.a_);

        // atom at zero: metadata when available, else the large-t magnitude
        // heuristic Re(cf(T_big))
        e.p0_ = 0.0;
        if (e.compound_) {
            if (cf.prob_zero()) {
                e.p0_ = *cf.prob_zero();
            } else {
                e.p0_ = cf.eval(1e10 * e.delta_).real();
                ++e.cf_evals_;
                if (!(e.p0_ > kAtomThreshold)) e.p0_ = 0.0;
            }
            if (e.p0_ > 1.0 - 1e-12)
                throw degenerate_support_error(
                    "inversion: Pr(N=0) is 1 within tolerance; distribution is a point mass");
        }
        e.atom_ = e.compound_ && e.p0_ > kAtomThreshold;
        e.cond_mean_ = e.atom_ ? e.mean_ / (1.0 - e.p0_) : e.mean_;

        // evaluate the grid, doubling N until the (conditional) tail is
        // negligible; values are appended so nothing is evaluated twice
        long n = opts.quadrature_n;
        if (opts.t_max) {
            n = std::max<long>(2, static_cast<long>(std::ceil(*opts.t_max / e.delta_)));
            e.extend_values(cf, n);
            e.capped_ = false;
        } else {
            e.extend_values(cf, n);
            while (true) {
                double t = static_cast<double>(n) * e.delta_;
                e.tail_mag_ = std::abs(e.vals_[static_cast<std::size_t>(n)]) / t;
                if (e.tail_mag_ < opts.tail_epsilon) break;
                if (n >= kNodeCap) {
                    e.capped_ = true;
                    break;
                }
                n *= 2;
                e.extend_values(cf, n);
            }
        }
        e.n_ = n;
        double t = static_cast<double>(n) * e.delta_;
        e.tail_mag_ = std::abs(e.vals_[static_cast<std::size_t>(n)]) / t;
        e.x_tol_ = opts.newton.x_tol_scale * (e.b_ - e.a_);
        e.newton_ = opts.newton;
        return e;
    }

    // Trapezoid Gil-Pelaez density. Compound distributions report the density
    // of the continuous part (the atom lives in the CDF jump at zero) and are
    // hard zero below the support start.
    double raw_pdf(double x) const {
        if (compound_ && x < 0.0) return 0.0;
        double s = 0.5; // j = 0: Re(e^{0} cf(0)) = 1
        Complex rot = std::polar(1.0, -delta_ * x); // step phasor e^{-i delta x}
        Complex ph = rot;
        for (long j = 1; j < n_; ++j) {
            if ((j & 511L) == 0) ph = std::polar(1.0, -delta_ * x * static_cast<double>(j));
            const Complex& v = vals_[static_cast<std::size_t>(j)];
            s += ph.real() * v.real() - ph.imag() * v.imag();
            ph *= rot;
        }
        {
            Complex phn = std::polar(1.0, -delta_ * x * static_cast<double>(n_));
            const Complex& v = vals_[static_cast<std::size_t>(n_)];
            s += 0.5 * (phn.real() * v.real() - phn.imag() * v.imag());
        }
        double f = delta_ / M_PI * s;
        return atom_ ? (1.0 - p0_) * f : f;
    }

    // Gil-Pelaez CDF with the t->0 limit (E - x) as the j = 0 term. Raw value,
    // not clamped; may leave [0,1] by the quadrature ringing.
    double raw_cdf(double x) const {
        if (compound_ && x < 0.0) return 0.0;
        double s = 0.5 * (cond_mean_ - x);
        Complex rot = std::polar(1.0, -delta_ * x);
        Complex ph = rot;
        for (long j = 1; j < n_; ++j) {
            if ((j & 511L) == 0) ph = std::polar(1.0, -delta_ * x * static_cast<double>(j));
            const Complex& v = vals_[static_cast<std::size_t>(j)];
            s += (ph.real() * v.imag() + ph.imag() * v.real()) /
                 (delta_ * static_cast<double>(j));
            ph *= rot;
        }
        {
            Complex phn = std::polar(1.0, -delta_ * x * static_cast<double>(n_));
            const Complex& v = vals_[static_cast<std::size_t>(n_)];
            s += 0.5 * (phn.real() * v.imag() + phn.imag() * v.real()) /
                 (delta_ * static_cast<double>(n_));
        }
        double f = 0.5 - delta_ / M_PI * s;
        return atom_ ? p0_ + (1.0 - p0_) * f : f;
    }

    // Newton-Raphson from the mean with bisection fallback on (A,B).
    double quantile(double p, int* iterations) const {
        if (!(p > 0.0 && p < 1.0))
            throw invalid_argument_error("quantiles: probability " + std::to_string(p) +
                                         " outside (0,1)");
        int iters = 0;
        if (atom_ && p <= p0_) {
            if (iterations) *iterations = 0;
            return 0.0;
        }
        double q = mean_;
        bool converged = false;
        for (; iters < newton_.max_iter; ++iters) {
            double err = raw_cdf(q) - p;
            if (std::abs(err) < newton_.p_tol) {
                converged = true;
                break;
            }
            double dens = raw_pdf(q);
            if (dens < 1e-14 || q < a_ || q > b_) break; // flat or escaped: bisect
            double step = err / dens;
            q -= step;
            if (std::abs(step) < x_tol_) {
                converged = true;
                break;
            }
        }
        if (!converged || q < a_ || q > b_) {
            double lo = a_, hi = b_;
            double flo = raw_cdf(lo) - p, fhi = raw_cdf(hi) - p;
            if (flo > 0.0 || fhi < 0.0)
                throw convergence_error(
                    "quantiles: bisection bracket failure for p=" + std::to_string(p) +
                    " (cdf(A)=" + std::to_string(flo + p) + ", cdf(B)=" +
                    std::to_string(fhi + p) + ", A=" + std::to_string(a_) + ", B=" +
                    std::to_string(b_) + ")");
            for (int k = 0; k < 200 && hi - lo > x_tol_; ++k) {
                double mid = 0.5 * (lo + hi);
                ++iters;
                if (raw_cdf(mid) < p) lo = mid;
                else hi = mid;
            }
            q = 0.5 * (lo + hi);
        }
        if (iterations) *iterations = iters;
        return q;
    }

    GridSelection selection() const {
        GridSelection g;
        g.delta = delta_;
        g.n = n_;
        g.t_max = static_cast<double>(n_) * delta_;
        g.a = a_;
        g.b = b_;
        g.capped = capped_;
        g.tail_magnitude = tail_mag_;
        g.mean = mean_;
        g.variance = variance_;
        return g;
    }

    double mean() const noexcept { return mean_; }
    double variance() const noexcept { return variance_; }
    double a() const noexcept { return a_; }
    double b() const noexcept { return b_; }
    bool compound() const noexcept { return compound_; }
    bool atom_split() const noexcept { return atom_; }
    double prob_zero() const noexcept { return p0_; }
    long cf_evaluations() const noexcept { return cf_evals_; }

    void fill_diagnostics(InversionDiagnostics& d) const {
        d.delta = delta_;
        d.n = n_;
        d.t_max = static_cast<double>(n_) * delta_;
        d.tail_magnitude = tail_mag_;
        d.n_capped = capped_;
        d.a = a_;
        d.b = b_;
        d.mean = mean_;
        d.variance = variance_;
        d.cf_evaluations = cf_evals_;
        d.atom_split = atom_;
        d.prob_zero = p0_;
    }

private:
    static void validate(const InversionOptions& o) {
        if (o.quadrature_n < 2)
            throw invalid_argument_error("inversion: quadratureN must be >= 2");
        if (!(o.six_sigma_k > 0.0))
            throw invalid_argument_error("inversion: six-sigma coefficient must be > 0");
        if (!(o.tail_epsilon > 0.0))
            throw invalid_argument_error("inversion: tail epsilon must be > 0");
        if (!(o.diff_step > 0.0))
            throw invalid_argument_error("inversion: differentiation step must be > 0");
        if (o.support && !(o.support->first < o.support->second))
            throw invalid_argument_error("inversion: explicit support needs A < B");
        if (o.t_max && !(*o.t_max > 0.0))
            throw invalid_argument_error("inversion: explicit T must be > 0");
        if (o.newton.max_iter < 1 || !(o.newton.p_tol > 0.0) || !(o.newton.x_tol_scale > 0.0))
            throw invalid_argument_error("inversion: bad Newton options");
    }

    void extend_values(const CharFn& cf, long n) {
        std::size_t want = static_cast<std::size_t>(n) + 1;
        std::size_t have = vals_.size();
        vals_.reserve(want);
        for (std::size_t j = have; j < want; ++j) {
            Complex v = cf.eval(delta_ * static_cast<double>(j));
            ++cf_evals_;
            if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
                throw numeric_failure_error("inversion: non-finite CF value at t=" +
                                            std::to_string(delta_ * static_cast<double>(j)));
            if (atom_) v = (v - p0_) / (1.0 - p0_);
            vals_.push_back(v);
        }
    }

    double delta_ = 0.0;
    long n_ = 0;
    bool capped_ = false;
    double tail_mag_ = 0.0;
    double a_ = 0.0, b_ = 0.0;
    double mean_ = 0.0, variance_ = 0.0, cond_mean_ = 0.0;
    bool compound_ = false, atom_ = false;
    double p0_ = 0.0;
    double x_tol_ = 0.0;
    NewtonOptions newton_;
    std::vector<Complex> vals_;
    long cf_evals_ = 0;
};

// clamp into [0,1] and make nondecreasing along sorted xs; returns the count
// of clamped entries and the worst raw decrease through the out-parameters
inline void clamp_and_isotonize(const std::vector<double>& xs, std::vector<double>& cdf,
                                long& clamp_count, double& worst_decrease) {
    std::vector<std::size_t> idx(xs.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(),
                     [&](std::size_t i, std::size_t j) { return xs[i] < xs[j]; });
    worst_decrease = 0.0;
    for (std::size_t k = 1; k < idx.size(); ++k) {
        double d = cdf[idx[k - 1]] - cdf[idx[k]];
        if (d > worst_decrease) worst_decrease = d;
    }
    clamp_count = 0;
    for (double& v : cdf) {
        double c = std::min(1.0, std::max(0.0, v));
        if (c != v) ++clamp_count;
        v = c;
    }
    double running = 0.0;
    for (std::size_t k = 0; k < idx.size(); ++k) {
        running = std::max(running, cdf[idx[k]]);
        cdf[idx[k]] = running;
    }
}

} // namespace detail

// Six-sigma grid selection (Gil-Pelaez trapezoid setup). Exposed for
// diagnostics; invert_distribution performs the identical selection.
inline GridSelection choose_grid(const CharFn& cf, const InversionOptions& opts = {}) {
    return detail::InversionEngine::build(cf, opts).selection();
}

// Raw trapezoid densities at xs; negative ringing values are reported as-is
// with a count in the diagnostics when requested.
inline std::vector<double> invert_pdf(const CharFn& cf, const std::vector<double>& xs,
                                      const InversionOptions& opts = {},
                                      InversionDiagnostics* diagnostics = nullptr) {
    for (double x : xs)
        if (!std::isfinite(x))
            throw invalid_argument_error("invert_pdf: non-finite evaluation point");
    auto eng = detail::InversionEngine::build(cf, opts);
    std::vector<double> out;
    out.reserve(xs.size());
    long negatives = 0;
    for (double x : xs) {
        double d = eng.raw_pdf(x);
        if (d < 0.0) ++negatives;
        out.push_back(d);
    }
    if (diagnostics) {
        eng.fill_diagnostics(*diagnostics);
        diagnostics->pdf_negative_count = negatives;
    }
    return out;
}

// CDF at xs: raw Gil-Pelaez values clamped into [0,1] and made nondecreasing
// along sorted xs (counts of both adjustments go to the diagnostics).
inline std::vector<double> invert_cdf(const CharFn& cf, const std::vector<double>& xs,
                                      const InversionOptions& opts = {},
                                      InversionDiagnostics* diagnostics = nullptr) {
    for (double x : xs)
        if (!std::isfinite(x))
            throw invalid_argument_error("invert_cdf: non-finite evaluation point");
    auto eng = detail::InversionEngine::build(cf, opts);
    std::vector<double> out;
    out.reserve(xs.size());
    for (double x : xs) out.push_back(eng.raw_cdf(x));
    long clamps = 0;
    double worst = 0.0;
    detail::clamp_and_isotonize(xs, out, clamps, worst);
    if (diagnostics) {
        eng.fill_diagnostics(*diagnostics);
        diagnostics->cdf_clamp_count = clamps;
        diagnostics->max_monotonicity_violation = worst;
    }
    return out;
}

inline std::vector<double> quantiles(const CharFn& cf, const std::vector<double>& probs,
                                     const InversionOptions& opts = {}) {
    auto eng = detail::InversionEngine::build(cf, opts);
    std::vector<double> out;
    out.reserve(probs.size());
    for (double p : probs) out.push_back(eng.quantile(p, nullptr));
    return out;
}

// Full inversion: one grid selection and one CF evaluation pass shared by the
// PDF, CDF and quantile outputs. When xs is empty a default 201-point grid
// spanning (A,B) is used.
inline DistributionResult invert_distribution(const CharFn& cf, std::vector<double> xs,
                                              const std::vector<double>& probs,
                                              const InversionOptions& opts = {}) {
    for (double x : xs)
        if (!std::isfinite(x))
            throw invalid_argument_error("invert_distribution: non-finite evaluation point");
    auto eng = detail::InversionEngine::build(cf, opts);
    DistributionResult r;
    eng.fill_diagnostics(r.diagnostics);
    if (xs.empty()) {
        xs.resize(201);
        double a = eng.a(), b = eng.b();
        for (std::size_t i = 0; i < xs.size(); ++i)
            xs[i] = a + (b - a) * static_cast<double>(i) / 200.0;
    }
    r.x_grid = std::move(xs);
    r.pdf.reserve(r.x_grid.size());
    r.cdf.reserve(r.x_grid.size());
    for (double x : r.x_grid) {
        double d = eng.raw_pdf(x);
        if (d < 0.0) ++r.diagnostics.pdf_negative_count;
        r.pdf.push_back(d);
        r.cdf.push_back(eng.raw_cdf(x));
    }
    detail::clamp_and_isotonize(r.x_grid, r.cdf, r.diagnostics.cdf_clamp_count,
                                r.diagnostics.max_monotonicity_violation);
    r.probs = probs;
    r.quantiles.reserve(probs.size());
    for (double p : probs) {
        int iters = 0;
        r.quantiles.push_back(eng.quantile(p, &iters));
        r.diagnostics.newton_iterations.push_back(iters);
    }
    // quantiles must be nondecreasing in probs; iron out sub-tolerance wiggles
    {
        std::vector<std::size_t> idx(r.probs.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
            return r.probs[i] < r.probs[j];
        });
        double running = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < idx.size(); ++k) {
            running = std::max(running, r.quantiles[idx[k]]);
            r.quantiles[idx[k]] = running;
        }
    }
    r.mean_estimate = eng.mean();
    r.var_estimate = eng.variance();
    return r;
}

} // namespace cfkit
