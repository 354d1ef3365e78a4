#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"

namespace cfkit {

using Complex = std::complex<double>;

// Closed-form mean/variance attached to a CF when analytically known.
// Inversion prefers these over finite-difference estimation.
struct MomentHints {
    double mean = 0.0;
    double variance = 0.0;
};

// A characteristic function: an immutable evaluable map t -> E[e^{itX}].
// Invariants enforced or guaranteed by construction:
//   eval(0) == 1 exactly, eval(-t) == conj(eval(t)), |eval(t)| <= 1 + eps.
// Compound CFs additionally carry Pr(N=0), the atom at zero.
class CharFn {
public:
    using EvalFn = std::function<Complex(double)>;

    explicit CharFn(EvalFn fn) : fn_(std::move(fn)) {
        if (!fn_) throw invalid_argument_error("CharFn: empty evaluation rule");
    }

    Complex eval(double t) const {
        if (!std::isfinite(t))
            throw invalid_argument_error("CharFn::eval: non-finite argument t");
        if (t == 0.0) return Complex(1.0, 0.0);
        return fn_(t);
    }

    Complex operator()(double t) const { return eval(t); }

    std::vector<Complex> eval_grid(const std::vector<double>& ts) const {
        for (std::size_t k = 0; k < ts.size(); ++k)
            if (!std::isfinite(ts[k]))
                throw invalid_argument_error(
                    "CharFn::eval_grid: non-finite node at index " + std::to_string(k));
        std::vector<Complex> out;
        out.reserve(ts.size());
        for (double t : ts) out.push_back(eval(t));
        return out;
    }

    const std::optional<MomentHints>& moment_hints() const noexcept { return hints_; }

    CharFn with_moment_hints(double mean, double variance) const {
        CharFn c(*this);
        c.hints_ = MomentHints{mean, variance};
        return c;
    }

    CharFn without_moment_hints() const {
        CharFn c(*this);
        c.hints_.reset();
        return c;
    }

    // Compound tagging: prob_zero is Pr(N=0) = pgf(0); inversion uses it to
    // split the atom at zero from the continuous part.
    bool is_compound() const noexcept { return compound_; }
    const std::optional<double>& prob_zero() const noexcept { return prob_zero_; }

    CharFn with_compound_tag(std::optional<double> prob_zero) const {
        CharFn c(*this);
        c.compound_ = true;
        c.prob_zero_ = prob_zero;
        return c;
    }

    CharFn without_compound_tag() const {
        CharFn c(*this);
        c.compound_ = false;
        c.prob_zero_.reset();
        return c;
    }

private:
    EvalFn fn_;
    std::optional<MomentHints> hints_;
    bool compound_ = false;
    std::optional<double> prob_zero_;
};

} // namespace cfkit
