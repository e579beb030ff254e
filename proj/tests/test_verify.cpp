#include <cmath>

#include "doctest.h"
#include "dioph/errors.hpp"
#include "dioph/verify.hpp"
#include "json.hpp"

using namespace dioph;

namespace {

std::uint64_t naive_quadruples(double X, double k, double gamma) {
    std::vector<Quad> pw;
    const Quad Xq = X;
    for (std::uint64_t n = 1; n < 1000; ++n) {
        Quad v = powq(static_cast<Quad>(n), static_cast<Quad>(k));
        if (v >= Xq && v <= powq(Quad(2), static_cast<Quad>(k)) * Xq) pw.push_back(v);
    }
    std::uint64_t c = 0;
    const Quad g = gamma;
    for (Quad a : pw)
        for (Quad b : pw)
            for (Quad d : pw)
                for (Quad e : pw)
                    if (fabsq(a + b - d - e) < g) ++c;
    return c;
}

bool prime_trial(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

// integer-aligned unit cells, 10 sub-cells each with 5-point Gauss-Legendre;
// the theta difference found by trial division at every node
double selberg_oracle(double k, double X, double h) {
    static const double x[5] = {0.0, 0.5384693101056831, 0.9061798459386640, -0.5384693101056831, -0.9061798459386640};
    static const double w[5] = {0.5688888888888889, 0.4786286704993665, 0.2369268850561891, 0.4786286704993665,
                                0.2369268850561891};
    double s = 0.0;
    const int cells = static_cast<int>(std::lround(10 * X));
    for (int m = 0; m < cells; ++m) {
        const double c = X + 0.1 * m;
        for (int i = 0; i < 5; ++i) {
            double t = c + 0.05 + 0.05 * x[i];
            double th = 0.0;
            for (std::uint64_t p = 2; std::pow(double(p), k) <= t + h; ++p)
                if (std::pow(double(p), k) > t && prime_trial(p)) th += std::log(double(p));
            double d = th - (std::pow(t + h, 1.0 / k) - std::pow(t, 1.0 / k));
            s += 0.05 * w[i] * d * d;
        }
    }
    return s;
}

}  // namespace

TEST_CASE("Robert-Sargos counts") {
    CHECK(robert_sargos_count(4.0, 2.0, 1.0) == 15);
    auto b = robert_sargos_bases(4.0, 2.0);
    CHECK(b.lo == 2);
    CHECK(b.hi == 4);
    for (double k : {1.5, 2.0, 2.5}) {
        for (int N = 1; N <= 24; N += 3) {
            const double X = std::pow(double(N), k);
            const auto r = robert_sargos_bases(X, k);
            const std::uint64_t M = r.hi - r.lo + 1;
            CHECK(M <= 25);
            for (double g : {1e-9, 1.0, 13.7})
                CHECK(robert_sargos_count(X, k, g) == naive_quadruples(X, k, g));
            CHECK(robert_sargos_count(X, k, 1e-9) >= M * M);
            CHECK(robert_sargos_count(X, k, 1e12) == M * M * M * M);
        }
    }
    CHECK_THROWS_AS(robert_sargos_count(1e6, 2.0, 1.0), ResourceError);
}

TEST_CASE("Selberg integral") {
    auto t = sieve(1000);
    CHECK(selberg_integral(t, 1.0, 10.0, 2.0).value == doctest::Approx(selberg_oracle(1.0, 10.0, 2.0)).epsilon(1e-10));
    CHECK(selberg_integral(t, 2.0, 100.0, 20.0).value == doctest::Approx(selberg_oracle(2.0, 100.0, 20.0)).epsilon(1e-9));

    // no squares of primes in (50, 101]: only the smooth term remains
    auto F = [](double x) {
        double r = std::sqrt(x * x + x);
        return x * x + x - 2.0 * ((2 * x + 1) / 4 * r - std::log(2 * x + 1 + 2 * r) / 8);
    };
    CHECK(selberg_integral(t, 2.0, 50.0, 1.0).value == doctest::Approx(F(100.0) - F(50.0)).epsilon(1e-8));

    auto small = sieve(20);
    CHECK_THROWS_AS(selberg_integral(small, 2.0, 1e3, 10.0), TableTooSmall);
}

TEST_CASE("short-interval mean square terms") {
    auto t = sieve(3000);
    auto r = su_mean_square_terms(t, 2.0, 0.01, 1e6, 0.01);
    CHECK(r.lhs > 0.0);
    CHECK(r.lhs_error < 1e-6 * r.lhs);
    CHECK(r.term_y2x == doctest::Approx(1e-4 * 1e6));
    CHECK(r.term_log > 0.0);
    CHECK(r.term_selberg > 0.0);
    CHECK_THROWS_AS(su_mean_square_terms(t, 2.0, 0.01, 1e6, 0.7), ConfigError);
}

TEST_CASE("minor-arc mean values") {
    Params p;
    auto t = sieve(1000);
    auto one = mean_value_integral(p, t, 1e3, MeanValue::s1_square);
    p.eta.mode = FixedEta{2.0};
    auto two = mean_value_integral(p, t, 1e3, MeanValue::s1_square);
    CHECK(one.periodic);
    CHECK(two.value / one.value > 1.5);
    CHECK(two.value / one.value < 2.5);
    CHECK(one.error < 1e-8 * one.value);

    // both paths of the periodic folding give the same number
    Params q;
    auto f = mean_value_integral(q, t, 1e3, MeanValue::s2_fourth);
    auto g = mean_value_integral(q, t, 1e3, MeanValue::s2_fourth, Exec::serial_reference);
    CHECK(f.value == doctest::Approx(g.value).epsilon(1e-9));

    q.eta.mode = FixedEta{100.0};  // R < P/X: no minor arc
    CHECK_THROWS_AS(mean_value_integral(q, t, 1e3, MeanValue::s2_fourth), ConfigError);
    CHECK(parse_mean_value("sk_fourth") == MeanValue::sk_fourth);
}

TEST_CASE("thresholds") {
    auto z = minor_arc_thresholds(1e7, 0.0);
    CHECK(z.z1 == doctest::Approx(1e6).epsilon(1e-13));
    CHECK(z.z2 == doctest::Approx(1e3).epsilon(1e-13));
    auto w = minor_arc_thresholds(2e7, 0.0);
    CHECK(w.z1 > z.z1);
    CHECK(w.z2 > z.z2);

    Params p;
    auto t = sieve(5000);
    double f = threshold_exceedance(p, t, 5000.0, 2000, 11);
    CHECK(f >= 0.0);
    CHECK(f <= 1.0);
    CHECK(threshold_exceedance(p, t, 5000.0, 2000, 11) == f);
}

TEST_CASE("check reporting") {
    BoundCheck c;
    c.name = "demo";
    c.scales_tested = {1e3, 1e4};
    c.constants = {1.0, 1.9};
    finish_check(c);
    CHECK(c.stable);
    CHECK(c.implied_constant == 1.9);
    c.constants = {1.0, 2.1};
    finish_check(c);
    CHECK_FALSE(c.stable);
    std::vector<BoundCheck> v = {c};
    auto j = nlohmann::json::parse(checks_json(v, "abc"));
    CHECK(j["checks"][0]["verdict"] == "unstable");
    CHECK(j["params_digest"] == "abc");
    CHECK(checks_table(v).find("demo") != std::string::npos);

    auto g = symmetric_log_grid(5);
    REQUIRE(g.size() == 11);
    CHECK(g[5] == 0.0);
    CHECK(g.front() == -1.0);
    CHECK(g.back() == 1.0);
    CHECK(std::is_sorted(g.begin(), g.end()));
}
