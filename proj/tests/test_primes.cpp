#include <cmath>
#include <filesystem>

#include "doctest.h"
#include "dioph/errors.hpp"
#include "dioph/primes.hpp"

using namespace dioph;

namespace {

bool is_prime_trial(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

}  // namespace

TEST_CASE("small sieves") {
    auto t = sieve(10);
    REQUIRE(t.primes().size() == 4);
    CHECK(t.primes()[3] == 7);
    CHECK(sieve(100).primes().size() == 25);
    CHECK_THROWS_AS(sieve(1), ConfigError);
    CHECK(sieve(2).primes().size() == 1);
}

TEST_CASE("sieve matches trial division up to 1e5") {
    SieveOptions small_segments;
    small_segments.segment_size = 997;  // many uneven segments
    auto t = sieve(100000, small_segments);
    std::vector<std::uint64_t> oracle;
    for (std::uint64_t n = 0; n <= 100000; ++n)
        if (is_prime_trial(n)) oracle.push_back(n);
    CHECK(std::vector<std::uint64_t>(t.primes().begin(), t.primes().end()) == oracle);
    auto r = sieve_reference(100000);
    CHECK(std::equal(r.primes().begin(), r.primes().end(), oracle.begin(), oracle.end()));
}

TEST_CASE("theta") {
    auto t = sieve(1000);
    CHECK(chebyshev_theta(t, 1.0) == 0.0);
    CHECK(chebyshev_theta(t, 2.0) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
    CHECK(chebyshev_theta(t, 10.0) == doctest::Approx(std::log(210.0)).epsilon(1e-14));
    CHECK(chebyshev_theta(t, 10.0) == doctest::Approx(5.34711).epsilon(1e-6));
    auto th = t.theta_prefix();
    for (std::size_t i = 1; i < th.size(); ++i) CHECK(th[i] > th[i - 1]);
    CHECK(th.back() == doctest::Approx(chebyshev_theta(t, 1000.0)));
    CHECK_THROWS_AS(chebyshev_theta(t, 1001.0), TableTooSmall);
}

TEST_CASE("power ranges") {
    auto t = sieve(1000);
    CHECK(primes_in_power_range(t, 2.0, 0.25, 100.0) == std::vector<std::uint64_t>{5, 7});
    CHECK(primes_in_power_range(t, 1.0, 0.5, 10.0) == std::vector<std::uint64_t>{5, 7});
    CHECK(primes_in_power_range(t, 2.5, 0.1, 1000.0) == std::vector<std::uint64_t>{7, 11, 13});
    // closed at both ends: 4 = 2^2 and 49 = 7^2
    CHECK(primes_in_power_range(t, 2.0, 4.0 / 49.0, 49.0) == std::vector<std::uint64_t>{2, 3, 5, 7});
    CHECK(primes_in_power_range(t, 2.0, 0.9, 20.0).empty());
}

TEST_CASE("cache round trip") {
    auto t = sieve(50000);
    auto path = std::filesystem::temp_directory_path() / "dioph_test_primes.bin";
    write_prime_cache(path, t);
    auto back = read_prime_cache(path);
    CHECK(back.limit() == t.limit());
    CHECK(std::equal(back.primes().begin(), back.primes().end(), t.primes().begin(), t.primes().end()));
    std::filesystem::remove(path);
}
