#pragma once

// Extended-precision helpers: error-free transformations, double-double
// phases, compensated summation and binary128 powers.

#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <numbers>

#include <quadmath.h>

namespace dioph {

using Complex = std::complex<double>;
using Quad = __float128;

inline constexpr double kEps = std::numeric_limits<double>::epsilon();
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Unevaluated sum hi + lo.
struct DoubleDouble {
    double hi = 0.0;
    double lo = 0.0;
};

inline DoubleDouble two_sum(double a, double b) {
    double s = a + b;
    double bb = s - a;
    double err = (a - (s - bb)) + (b - bb);
    return {s, err};
}

inline DoubleDouble two_prod(double a, double b) {
    double p = a * b;
    return {p, std::fma(a, b, -p)};
}

inline DoubleDouble to_double_double(Quad x) {
    double hi = static_cast<double>(x);
    double lo = static_cast<double>(x - static_cast<Quad>(hi));
    return {hi, lo};
}

inline Quad to_quad(DoubleDouble x) {
    return static_cast<Quad>(x.hi) + static_cast<Quad>(x.lo);
}

// Fractional part of f*x, in [-1/2, 1/2]. The product f.hi*x is split exactly
// so the reduction keeps ~eps absolute accuracy even when |f*x| ~ 1e12.
inline double reduced_phase(DoubleDouble f, double x) {
    DoubleDouble p = two_prod(f.hi, x);
    double n = std::nearbyint(p.hi);
    double r = p.hi - n;
    r += p.lo + f.lo * x;
    return r - std::nearbyint(r);
}

// e(t) = exp(2 pi i t) for a reduced phase t.
inline Complex unit_phasor(double t) {
    double a = kTwoPi * t;
    return {std::cos(a), std::sin(a)};
}

// sin(pi x), exact zero at integers.
inline double sin_pi(double x) {
    double r = x - 2.0 * std::nearbyint(0.5 * x);  // r in [-1, 1], exact
    if (r > 0.5) r = 1.0 - r;
    else if (r < -0.5) r = -1.0 - r;
    return std::sin(std::numbers::pi * r);
}

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double x) {
        double t = sum_ + x;
        if (std::fabs(sum_) >= std::fabs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    CompensatedSum& operator+=(double x) {
        add(x);
        return *this;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

class CompensatedComplexSum {
public:
    void add(Complex z) {
        re_.add(z.real());
        im_.add(z.imag());
    }
    CompensatedComplexSum& operator+=(Complex z) {
        add(z);
        return *this;
    }
    Complex value() const { return {re_.value(), im_.value()}; }

private:
    CompensatedSum re_;
    CompensatedSum im_;
};

// p^k in binary128; exact for k in {1, 2} while p^2 < 2^113.
inline Quad power_q(std::uint64_t p, double k) {
    Quad qp = static_cast<Quad>(p);
    if (k == 1.0) return qp;
    if (k == 2.0) return qp * qp;
    return powq(qp, static_cast<Quad>(k));
}

inline bool is_integer_exponent(double k) { return k == 1.0 || k == 2.0; }

}  // namespace dioph
