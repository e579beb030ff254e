#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "dioph/errors.hpp"
#include "dioph/expsums.hpp"

using namespace dioph;

namespace {

// e(x) with the argument reduced in binary128
Complex e_quad(Quad x) {
    Quad r = x - floorq(x);
    double t = static_cast<double>(r);
    return {std::cos(kTwoPi * t), std::sin(kTwoPi * t)};
}

// (e(a X) - e(a dX)) / (2 pi i a)
Complex t1_closed(double delta, double X, double alpha) {
    Quad a = alpha;
    Complex num = e_quad(a * static_cast<Quad>(X)) - e_quad(a * static_cast<Quad>(delta) * static_cast<Quad>(X));
    return num / Complex(0.0, kTwoPi * alpha);
}

// int e(alpha t^k) dt over the t range, composite 10-point Gauss-Legendre in t
// with phases reduced in binary128; independent of the u-substitution in eval_T.
Complex t_bruteforce(double k, double delta, double X, double alpha, std::size_t panels) {
    static const double x[5] = {0.1488743389816312, 0.4333953941292472, 0.6794095682990244, 0.8650633666889845,
                                0.9739065285171717};
    static const double w[5] = {0.2955242247147529, 0.2692667193099963, 0.2190863625159820, 0.1494513491505806,
                                0.0666713443086881};
    const double a = std::pow(delta * X, 1.0 / k), b = std::pow(X, 1.0 / k);
    const double h = (b - a) / static_cast<double>(panels);
    Complex s{};
    for (std::size_t m = 0; m < panels; ++m) {
        double c = a + h * (static_cast<double>(m) + 0.5);
        for (int i = 0; i < 5; ++i)
            for (double sg : {-1.0, 1.0}) {
                Quad t = static_cast<Quad>(c) + static_cast<Quad>(sg * x[i] * 0.5 * h);
                s += w[i] * 0.5 * h * e_quad(static_cast<Quad>(alpha) * (k == 2.0 ? t * t : powq(t, static_cast<Quad>(k))));
            }
    }
    return s;
}

}  // namespace

TEST_CASE("S and U at zero") {
    auto t = sieve(2000);
    Complex s = eval_S(t, 2.0, 0.25, 100.0, 0.0);
    CHECK(s.imag() == 0.0);
    CHECK(s.real() == doctest::Approx(std::log(35.0)).epsilon(1e-15));
    CHECK(eval_U(t, 2.0, 0.25, 100.0, 0.0) == Complex(2.0, 0.0));
    Complex s1 = eval_S(t, 1.0, 0.01, 1000.0, 0.0);
    CHECK(s1.real() == doctest::Approx(chebyshev_theta(t, 1000.0) - chebyshev_theta(t, 9.0)).epsilon(1e-14));
}

TEST_CASE("single prime range") {
    auto t = sieve(100);
    // only 7: 49 in [40, 50]
    const double alpha = 0.123456789;
    Complex s = eval_S(t, 2.0, 0.8, 50.0, alpha);
    Complex want = std::log(7.0) * e_quad(static_cast<Quad>(49.0) * static_cast<Quad>(alpha));
    CHECK(std::abs(s - want) < 1e-14);
}

TEST_CASE("conjugate symmetry") {
    auto t = sieve(20000);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    for (int i = 0; i < 20; ++i) {
        double a = u(rng);
        CHECK(std::abs(eval_S(t, 2.0, 0.01, 1e6, -a) - std::conj(eval_S(t, 2.0, 0.01, 1e6, a))) < 1e-9);
        CHECK(std::abs(eval_U(t, 1.5, 0.01, 1e5, -a) - std::conj(eval_U(t, 1.5, 0.01, 1e5, a))) < 1e-9);
    }
}

TEST_CASE("T at zero is the length") {
    for (double k : {1.0, 1.5, 2.0, 2.5}) {
        auto v = eval_T(k, 0.01, 1e4, 0.0, 1e-12);
        CHECK(v.value.real() == doctest::Approx(std::pow(1e4, 1.0 / k) - std::pow(100.0, 1.0 / k)).epsilon(1e-14));
        CHECK(v.value.imag() == 0.0);
    }
}

TEST_CASE("T for k = 1 against the closed form") {
    const double X = 1e5, delta = 0.01;
    for (int i = 0; i < 50; ++i) {
        double a = std::pow(10.0, -3.0 + 4.0 * i / 49.0);
        auto v = eval_T(1.0, delta, X, a, default_t_tolerance(1.0, delta, X));
        Complex want = t1_closed(delta, X, a);
        // at the ends of the grid a X is (nearly) an integer and the closed form
        // (nearly) vanishes; there the error is measured against 1/(2 pi a),
        // the size of each boundary term
        const double scale = std::max(std::abs(want), 1.0 / (kTwoPi * a));
        CHECK(std::abs(v.value - want) <= 1e-10 * scale);
        auto n = eval_T(1.0, delta, X, -a, default_t_tolerance(1.0, delta, X));
        CHECK(std::abs(n.value - std::conj(want)) <= 1e-10 * scale);
    }
}

TEST_CASE("T for k = 2 and 2.5 against brute-force quadrature in t") {
    for (double k : {2.0, 2.5}) {
        const double X = 1e4;
        for (double a : {1e-4, 3e-3, 0.05, 0.7}) {
            auto v = eval_T(k, 0.01, X, a, 1e-11);
            Complex want = t_bruteforce(k, 0.01, X, a, 40000);
            CHECK(std::abs(v.value - want) < 1e-9);
            CHECK(v.error < 1e-10);
        }
    }
}

TEST_CASE("contour T agrees with real-line T") {
    for (double k : {1.0, 1.5, 2.0, 2.5}) {
        for (double X : {1e3, 1e5}) {
            for (double a : {-2.0, -0.01, 1e-5, 1e-3, 0.3, 7.0}) {
                auto r = eval_T(k, 0.01, X, a, 1e-12 * std::pow(X, 1.0 / k));
                auto c = eval_T_contour(k, 0.01, X, a);
                CHECK(std::abs(r.value - c.value) <= 1e-10 * std::pow(X, 1.0 / k));
            }
        }
    }
}

TEST_CASE("T decay bound") {
    std::vector<double> grid;
    for (int i = 0; i < 40; ++i) grid.push_back(std::pow(10.0, -5.0 + 5.0 * i / 39.0));
    for (double k : {1.5, 2.0, 2.5}) {
        const double X = 1e4;
        const double C = t_decay_constant(k, 0.01, X, grid);
        CHECK(std::isfinite(C));
        for (double a : grid) {
            auto v = eval_T(k, 0.01, X, a, 1e-10);
            double len = std::pow(X, 1.0 / k);
            CHECK(std::abs(v.value) <= std::min(len, C * std::pow(X, 1.0 / k - 1.0) / a) * (1 + 1e-12) + 1e-12);
        }
    }
}

TEST_CASE("Fejer kernel pair") {
    for (double eta : {0.1, 0.5, 1.0, 3.0}) {
        CHECK(kernel_K(eta, 0.0) == eta * eta);
        for (int n = 1; n <= 5; ++n) CHECK(std::fabs(kernel_K(eta, n / eta)) <= 1e-14);
        std::mt19937_64 rng(3);
        std::uniform_real_distribution<double> u(-50.0, 50.0);
        for (int i = 0; i < 200; ++i) {
            double a = u(rng);
            double bound = std::min(eta * eta, 1.0 / (std::numbers::pi * std::numbers::pi * a * a));
            CHECK(kernel_K(eta, a) <= bound * (1 + 1e-14));
        }
        CHECK(kernel_Khat(eta, 0.0) == eta);
        CHECK(kernel_Khat(eta, eta) == 0.0);
        CHECK(kernel_Khat(eta, -eta / 2) == eta / 2);
        CHECK(kernel_Khat(eta, 2 * eta) == 0.0);
    }
    // the small-argument series joins the closed form smoothly
    const double eta = 0.7, a = 1e-4 / eta;
    double s = std::sin(std::numbers::pi * a * eta) / (std::numbers::pi * a);
    CHECK(kernel_K(eta, a) == doctest::Approx(s * s).epsilon(1e-13));
}

TEST_CASE("T-U gap at the origin") {
    auto t = sieve(100);
    std::vector<double> a = {0.0};
    auto g = tu_gap_check(t, 1.0, 0.5, 10.0, a);
    CHECK(g.constant == doctest::Approx(3.0).epsilon(1e-14));
    // [24, 25]: no primes and unit length
    auto h = tu_gap_check(t, 1.0, 0.96, 25.0, a);
    CHECK(h.constant <= 1.0 + 1e-12);
    std::vector<double> out = {2.0};
    CHECK_THROWS_AS(tu_gap_check(t, 1.0, 0.5, 10.0, out), ConfigError);
}

TEST_CASE("grid evaluation is the same on both paths") {
    auto t = sieve(5000);
    std::vector<double> a;
    for (int i = 0; i < 64; ++i) a.push_back(-1.0 + 2.0 * i / 63.0);
    for (auto kind : {SumKind::S, SumKind::U, SumKind::T}) {
        const double X = kind == SumKind::T ? 1e4 : 1e6;
        auto p = evaluate_grid(kind, t, 2.0, 0.01, X, a, Exec::parallel);
        auto s = evaluate_grid(kind, t, 2.0, 0.01, X, a, Exec::serial_reference);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(p.values[i] - s.values[i]) < 1e-9);
        CHECK(grid_csv(p).starts_with("alpha,re,im,abs,kind,quad_error\r\n"));
    }
    std::vector<double> unsorted = {0.5, 0.1};
    CHECK_THROWS_AS(evaluate_grid(SumKind::S, t, 2.0, 0.01, 1e6, unsorted), ConfigError);
    CHECK(parse_sum_kind("T") == SumKind::T);
    CHECK_THROWS_AS(parse_sum_kind("V"), ConfigError);
}
