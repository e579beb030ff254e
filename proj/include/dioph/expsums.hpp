#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "dioph/kernels.hpp"
#include "dioph/precise.hpp"
#include "dioph/primes.hpp"

namespace dioph {

enum class SumKind { S, U, T };

std::string to_string(SumKind kind);
SumKind parse_sum_kind(const std::string& text);

enum class Weighting { log_p, unit };

// Primes of one variable: delta X <= p^k <= X, with p^k kept in binary128.
class PowerSum {
public:
    PowerSum(const PrimeTable& table, double k, double delta, double X);

    double k() const noexcept { return k_; }
    double delta() const noexcept { return delta_; }
    double X() const noexcept { return X_; }
    std::span<const std::uint64_t> primes() const noexcept { return primes_; }
    std::span<const Quad> powers() const noexcept { return powers_; }

    // sum_p w_p e(lambda p^k alpha) as a phase sum in alpha.
    PhaseSum phase_sum(double lambda, Weighting w) const;
    // Value at alpha = 0: sum of log p (or the prime count).
    double total(Weighting w) const;

private:
    double k_, delta_, X_;
    std::vector<std::uint64_t> primes_;
    std::vector<Quad> powers_;
};

// lambda * p^k as an unevaluated double-double; exact when p^k < 2^53 is an integer.
DoubleDouble scaled_power(double lambda, Quad power);

Complex eval_S(const PrimeTable& table, double k, double delta, double X, double alpha);
Complex eval_U(const PrimeTable& table, double k, double delta, double X, double alpha);

struct TValue {
    Complex value{};
    double error = 0.0;
};

// (1/k) int_{delta X}^{X} u^{1/k-1} e(alpha u) du, i.e. int e(alpha t^k) dt over
// (delta X)^{1/k} <= t <= X^{1/k}. Throws ToleranceError when the estimated
// error stays above tol after refinement.
TValue eval_T(double k, double delta, double X, double alpha, double tol);

// Same integral by contour deformation: the part of [delta X, X] with
// 2 pi alpha u >= 10 is replaced by two vertical rays, on which e(alpha u)
// decays like exp(-2 pi alpha y); the rest is integrated on the real line.
// Cost does not grow with alpha X. Used where T is needed at many points.
TValue eval_T_contour(double k, double delta, double X, double alpha);

// (sin(pi alpha eta) / (pi alpha))^2, eta^2 at alpha = 0.
double kernel_K(double eta, double alpha);
// max(0, eta - |t|)
double kernel_Khat(double eta, double t);

struct ExpSumGrid {
    std::vector<double> alphas;
    std::vector<Complex> values;
    SumKind kind = SumKind::S;
    double k = 2.0;
    double delta = 0.0;
    double X = 0.0;
    std::vector<double> quad_error;  // T only

    // theta-range for S, count for U, length for T
    double trivial_bound = 0.0;
};

// Default absolute tolerance used for T on grids.
double default_t_tolerance(double k, double delta, double X);

ExpSumGrid evaluate_grid(SumKind kind, const PrimeTable& table, double k, double delta, double X,
                         std::span<const double> alphas, Exec exec = Exec::parallel);

// alpha,re,im,abs,kind,quad_error
std::string grid_csv(const ExpSumGrid& grid);

struct TuGap {
    double constant = 0.0;  // max |T - U| / (1 + |alpha| X)
    double lower = 0.0;     // interval for the constant from T's error bounds
    double upper = 0.0;
    double argmax = 0.0;
};

// Empirical constant in |T - U| <= C (1 + |alpha| X) over a grid in [-1, 1].
TuGap tu_gap_check(const PrimeTable& table, double k, double delta, double X, std::span<const double> alphas);

// max over alpha != 0 of |T(alpha)| |alpha| / X^{1/k - 1}: the fitted constant
// in |T| <= C X^{1/k-1} / |alpha|.
double t_decay_constant(double k, double delta, double X, std::span<const double> alphas);

}  // namespace dioph
