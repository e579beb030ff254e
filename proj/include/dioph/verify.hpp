#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "dioph/arcs.hpp"
#include "dioph/kernels.hpp"
#include "dioph/model.hpp"
#include "dioph/primes.hpp"
#include "dioph/quadrature.hpp"

namespace dioph {

// Ordered quadruples X^{1/k} <= n_i <= 2 X^{1/k} with
// |n1^k + n2^k - n3^k - n4^k| < gamma, by sorted pair sums and a sliding window.
// Requires X^{1/k} <= max_base.
std::uint64_t robert_sargos_count(double X, double k, double gamma, double max_base = 200.0);

// Integer range [lo, hi] of the bases above.
struct BaseRange {
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
};
BaseRange robert_sargos_bases(double X, double k);

// (gamma X^{4/k - 1} + X^{2/k}) X^eps
double robert_sargos_shape(double X, double k, double gamma, double epsilon);

// int_X^{2X} (theta((x+h)^{1/k}) - theta(x^{1/k}) - ((x+h)^{1/k} - x^{1/k}))^2 dx,
// exactly piecewise: the theta difference is constant between the points
// p^k - h and p^k, and each piece is integrated with 21-point Gauss-Kronrod.
QuadEstimate selberg_integral(const PrimeTable& table, double k, double X, double h);

// The short-interval mean square of S_k - U_k over [-Y, Y] and the three terms
// of its bound, reported separately.
struct MeanSquareTerms {
    double lhs = 0.0;
    double lhs_error = 0.0;
    double term_log = 0.0;      // X^{2/k-2} log^2 X / Y
    double term_y2x = 0.0;      // Y^2 X
    double term_selberg = 0.0;  // Y^2 J_k(X, 1/(2Y))
};
MeanSquareTerms su_mean_square_terms(const PrimeTable& table, double k, double delta, double X, double Y);

enum class MeanValue { s1_square, s2_fourth, sk_fourth };

std::string to_string(MeanValue which);
MeanValue parse_mean_value(const std::string& text);

struct MeanValueResult {
    double value = 0.0;  // int over the minor arc of |S|^m K_eta
    double error = 0.0;
    double shape = 0.0;  // the bound's shape at this X
    bool periodic = false;
};

// Minor arc +-[P/X, R] of the default decomposition at scale X. Sums with
// integer exponents are 1-periodic, so |S|^m is tabulated on one period and
// reused against K_eta on every whole period inside the arc.
MeanValueResult mean_value_integral(const Params& params, const PrimeTable& table, double X, MeanValue which,
                                    Exec exec = Exec::parallel);

struct Thresholds {
    double z1 = 0.0;  // X^{6/7 + eps}
    double z2 = 0.0;  // X^{3/7 + eps}
};
Thresholds minor_arc_thresholds(double X, double epsilon);

// Fraction of uniformly sampled minor-arc points where |S1(l1 a)| > z1 and
// |S2(l2 a)| > z2 simultaneously.
double threshold_exceedance(const Params& params, const PrimeTable& table, double X, std::size_t samples,
                            std::uint64_t seed);

struct BoundCheck {
    std::string name;
    std::string rhs_formula;
    std::vector<double> scales_tested;
    std::vector<double> lhs;        // per scale
    std::vector<double> constants;  // lhs / shape per scale
    double implied_constant = 0.0;  // largest of constants
    double band = 2.0;
    bool stable = false;
    std::map<std::string, std::string> inputs;

    std::string verdict() const { return stable ? "stable" : "unstable"; }
};

// Fills constants, implied_constant and the verdict (max/min <= band).
void finish_check(BoundCheck& c);

std::string checks_json(std::span<const BoundCheck> checks, const std::string& params_digest);
std::string checks_table(std::span<const BoundCheck> checks);

struct StabilityOptions {
    std::vector<double> scales = {1e3, 1e4};
    double band = 2.0;
    double h_offset = 0.05;  // h = X^{1 - 5/(6k) + h_offset}
    std::size_t alpha_points = 101;
};

// Constant-stability checks across scales: T-U gap, |S_k| / X^{1/k}, the three
// minor-arc mean values and the Selberg integral.
std::vector<BoundCheck> stability_suite(const Params& params, const PrimeTable& table,
                                        const StabilityOptions& opts = {});

// Grid for the T-U and |S| checks: 0 and +-(log-spaced points in [1e-6, 1]).
std::vector<double> symmetric_log_grid(std::size_t n_per_side, double lo = 1e-6, double hi = 1.0);

}  // namespace dioph
