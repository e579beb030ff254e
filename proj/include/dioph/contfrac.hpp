#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dioph/model.hpp"

namespace dioph {

struct ContinuedFraction {
    RatioKind value;
    std::vector<std::int64_t> quotients;  // [a0; a1, a2, ...]
    bool exact = true;                   // quadratic surds and rationals
    bool terminated = false;             // rational input fully expanded
    bool precision_exhausted = false;    // decimal input could not certify more terms
    bool overflow = false;               // a quotient exceeded int64
    std::optional<std::size_t> period_start;
    std::optional<std::size_t> period_length;
};

struct Convergent {
    std::int64_t a = 0;  // numerator
    std::int64_t q = 1;  // denominator
    std::size_t index = 0;
};

// First n_terms partial quotients. Quadratic surds use the exact integer
// (P, Q) recurrence with period detection; rationals use Euclid; decimals
// emit a quotient only when both ends of the uncertainty interval agree.
ContinuedFraction expand(const RatioKind& x, std::size_t n_terms);

// Convergents from the recurrence q_n = a_n q_{n-1} + q_{n-2}. Stops early
// (returning fewer) when a numerator or denominator would overflow int64.
std::vector<Convergent> convergents(const ContinuedFraction& cf, std::size_t n);

struct BestApproxResult {
    bool holds = false;
    double residual = 0.0;  // q x - a
    bool certified = true;  // false when decimal precision cannot decide
};

// |q x - a| < 1 / next_q, evaluated exactly or with ~330-bit arithmetic.
BestApproxResult best_approx_check(const RatioKind& x, const Convergent& conv, std::int64_t next_q);

// X_n = q_n^(7/3), correctly rounded; stops once X exceeds 1e300.
std::vector<double> x_sequence(std::span<const Convergent> convs);

// index,a,q,X
std::string convergents_csv(std::span<const Convergent> convs);

}  // namespace dioph
