#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dioph/expsums.hpp"
#include "dioph/kernels.hpp"
#include "dioph/model.hpp"
#include "dioph/primes.hpp"
#include "dioph/quadrature.hpp"

namespace dioph {

enum class Arc { major, minor, trivial, full };

std::string to_string(Arc arc);
Arc parse_arc(const std::string& text);

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

// major [-P/X, P/X], minor +-[P/X, R], trivial |alpha| > R
struct ArcDecomposition {
    double X = 0.0;
    double P = 0.0;
    double R = 0.0;

    double major_edge() const { return P / X; }
    Interval major() const { return {-major_edge(), major_edge()}; }
    // The two halves of an arc, truncated at A for the trivial arc.
    std::vector<Interval> pieces(Arc arc, double A) const;
};

// Requires P >= 1, P/X < R and, when eta is given, R > 1/eta.
ArcDecomposition decompose(double X, double P, double R, std::optional<double> eta = std::nullopt);

// P from major_arc_P, R from trivial_arc_R.
ArcDecomposition default_decomposition(const Params& params, double X, double eta);

// S1(l1 a) S2(l2 a) S2(l3 a) Sk(l4 a) K_eta(a) e(-omega a) at scale X.
class Integrand {
public:
    // unit_sums replaces the four sums by 1 (leaving K_eta(a) e(-omega a)).
    Integrand(const Params& params, const PrimeTable& table, double X, double eta, bool unit_sums = false);

    Complex operator()(double alpha) const;

    // The four sums followed by the single-term sum e(-omega a).
    std::span<const PhaseSum> sums() const noexcept { return sums_; }
    Complex combine(std::span<const Complex> values, double alpha) const;

    double eta() const noexcept { return eta_; }
    // Largest frequency present, sum |l_i| max p^k_i + |omega|.
    double max_frequency() const noexcept { return max_freq_; }
    // prod S_i(0)
    double trivial_product() const noexcept { return trivial_; }
    std::array<double, 4> sums_at_zero() const noexcept { return at_zero_; }

private:
    std::vector<PhaseSum> sums_;
    double eta_;
    double max_freq_ = 0.0;
    double trivial_ = 1.0;
    std::array<double, 4> at_zero_{};
};

Complex integrand(const Params& params, const PrimeTable& table, double X, double eta, double alpha);

struct GridPolicy {
    double panels_per_period = 1.0;  // panel width <= 1 / (panels_per_period * max frequency)
    double major_divisor = 2048.0;   // major-arc width <= (P/X) / major_divisor
    double truncation = 0.0;         // A; 0 means max(R, 50 / eta)
    double rel_tol = 1e-10;          // target error relative to the integral of |f|
    int max_refinements = 2;         // panel halvings when the target is missed
    bool unit_sums = false;          // test hook, see Integrand
    Exec exec = Exec::parallel;
};

struct IntegralResult {
    Arc arc = Arc::full;
    double value = 0.0;  // real part
    double quad_error = 0.0;
    double tail_bound = 0.0;
    double imag_residual = 0.0;
    double truncation = 0.0;  // A (trivial and full arcs)
    std::size_t evaluations = 0;
    std::string params_digest;
};

std::string to_json(const IntegralResult& r);

IntegralResult integrate_I(const Params& params, const PrimeTable& table, double X, double eta,
                           const ArcDecomposition& arcs, Arc arc, const GridPolicy& policy = {});

// sum over solutions of prod log p_i * max(0, eta - |form|), via the solver.
double direct_sum_I(const Params& params, const PrimeTable& table, double X, double eta);

// Upper bound for |int_{|a|>A} integrand| from the mean squares of S1 and
// the fourth moments of S2 over one period, with |Sk| <= Sk(0).
double tail_estimate(const Params& params, const PrimeTable& table, double X, double eta, double A);

// prod S_i(0) * 2 / (pi^2 A): every sum replaced by its value at 0.
double tail_estimate_trivial(const Params& params, const PrimeTable& table, double X, double eta, double A);

struct J1Policy {
    double rel_tol = 1e-8;  // for both evaluations, relative to the measure-side value
    Exec exec = Exec::parallel;
};

struct J1Result {
    double fourier = 0.0;  // int T1 T2 T2 Tk K e(-omega a) over [-A, A]
    double fourier_error = 0.0;
    double fourier_tail = 0.0;  // bound for |a| > A
    double truncation = 0.0;
    double measure = 0.0;  // int Khat(lambda . t - omega) dt over the box
    double measure_error = 0.0;
    double discrepancy = 0.0;
    double ratio = 0.0;  // measure / (eta^2 X^{1/k+1})
};

J1Result main_term_J1(const Params& params, double X, double eta, const J1Policy& policy = {});

// Same 4-fold integral reduced to a single integral of the density of
// l2 t2^2 + l3 t3^2 against the Khat-smoothed density of l1 t1 + l4 t4^k.
QuadEstimate j1_measure_side(const Params& params, double X, double eta, double rel_tol);

}  // namespace dioph
