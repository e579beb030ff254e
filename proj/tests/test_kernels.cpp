#include <omp.h>

#include <cmath>
#include <numbers>

#include "doctest.h"
#include "dioph/expsums.hpp"
#include "dioph/kernels.hpp"

using namespace dioph;

TEST_CASE("panel quadrature of a smooth function") {
    UniformPanels p{0.0, 0.25, 8};
    auto t = integrate_function(p, [](double x) { return Complex(std::cos(x), std::sin(x)); }, Exec::parallel);
    CHECK(std::abs(t.value - Complex(std::sin(2.0), 1.0 - std::cos(2.0))) < 1e-15);
    CHECK(t.evaluations == 8 * 21);
    CHECK(t.gk_error < 1e-14);
}

TEST_CASE("phasor rotation matches direct evaluation") {
    auto table = sieve(3000);
    PowerSum s1(table, 1.0, 0.01, 3000.0), s2(table, 2.0, 0.01, 3000.0 * 3000.0 / 1e3);
    std::vector<PhaseSum> sums = {s1.phase_sum(std::numbers::sqrt2, Weighting::log_p),
                                  s2.phase_sum(-1.0, Weighting::log_p)};
    const std::size_t n = 3000;
    UniformPanels panels{-0.37, 1.0 / 9000.0, n};
    auto combine = [](std::span<const Complex> v, double) { return v[0] * v[1]; };
    auto par = integrate_phase_product(std::span<const PhaseSum>(sums), panels, combine, Exec::parallel);
    auto ser = integrate_phase_product(std::span<const PhaseSum>(sums), panels, combine, Exec::serial_reference);
    CHECK(std::abs(par.value - ser.value) <= 1e-9 * ser.abs_mass);
    CHECK(par.evaluations == ser.evaluations);
}

TEST_CASE("chunked reduction does not depend on the thread count") {
    auto table = sieve(2000);
    std::vector<PhaseSum> sums = {PowerSum(table, 1.0, 0.01, 2000.0).phase_sum(1.0, Weighting::log_p)};
    UniformPanels panels{0.0, 1.0 / 4000.0, 5000};
    auto combine = [](std::span<const Complex> v, double) { return v[0] * v[0]; };
    std::vector<Complex> results;
    const int before = omp_get_max_threads();
    for (int th : {1, 3, 4, 8}) {
        omp_set_num_threads(th);
        results.push_back(integrate_phase_product(std::span<const PhaseSum>(sums), panels, combine, Exec::parallel).value);
    }
    omp_set_num_threads(before);
    for (auto& r : results) {
        CHECK(r.real() == results[0].real());
        CHECK(r.imag() == results[0].imag());
    }
}
