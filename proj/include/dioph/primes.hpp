#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dioph/precise.hpp"

namespace dioph {

// All primes up to `limit` together with prefix sums of log p.
class PrimeTable {
public:
    PrimeTable() = default;
    PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes);

    std::uint64_t limit() const noexcept { return limit_; }
    std::span<const std::uint64_t> primes() const noexcept { return primes_; }
    // theta_prefix()[i] = sum_{j <= i} log primes()[j]
    std::span<const double> theta_prefix() const noexcept { return theta_; }

    // Chebyshev theta(x) = sum_{p <= x} log p. Throws TableTooSmall for x > limit.
    double theta(double x) const;

private:
    std::uint64_t limit_ = 0;
    std::vector<std::uint64_t> primes_;
    std::vector<double> theta_;
};

struct SieveOptions {
    std::size_t segment_size = std::size_t{1} << 20;
    std::size_t memory_cap_bytes = std::size_t{4} << 30;
};

inline constexpr std::uint64_t kMaxSieveLimit = 10'000'000'000ull;

// Segmented sieve of Eratosthenes; segments run in parallel and are merged in
// ascending order.
PrimeTable sieve(std::uint64_t limit, const SieveOptions& opts = {});

// Plain single-array sieve, kept as the reference for the segmented one.
PrimeTable sieve_reference(std::uint64_t limit);

double chebyshev_theta(const PrimeTable& table, double x);

// Closed range lo <= p^exponent <= hi, compared in binary128 so the exact
// integer comparison holds for exponents 1 and 2.
class PowerRange {
public:
    PowerRange(double exponent, double delta, double X);

    double exponent() const noexcept { return exponent_; }
    double lo() const noexcept { return static_cast<double>(lo_); }
    double hi() const noexcept { return static_cast<double>(hi_); }
    bool contains(std::uint64_t p) const;
    // Smallest and largest integer bases that can lie in the range, widened by one.
    std::uint64_t base_floor() const;
    std::uint64_t base_ceil() const;

private:
    double exponent_;
    Quad lo_;
    Quad hi_;
};

// Primes p with delta X <= p^k <= X, ascending.
std::vector<std::uint64_t> primes_in_power_range(const PrimeTable& table, double k, double delta, double X);

// Binary cache: "DIOPHPT1", limit (u64 LE), count (u64 LE), then LEB128 gaps.
void write_prime_cache(const std::filesystem::path& path, const PrimeTable& table);
PrimeTable read_prime_cache(const std::filesystem::path& path);

}  // namespace dioph
