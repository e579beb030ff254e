// Serial reference vs parallel kernels on the workloads that dominate a run:
// the full-line integral, an S grid and the solver. On one core the
// integral's gain comes from phasor rotation rather than threads.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <vector>

#include "dioph/arcs.hpp"
#include "dioph/errors.hpp"
#include "dioph/expsums.hpp"
#include "dioph/solver.hpp"

using namespace dioph;

namespace {

template <class F>
double seconds(F&& f) {
    auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void row(const char* name, double serial, double parallel, double diff) {
    std::printf("%-18s serial %9.3fs  parallel %9.3fs  speedup %6.2f  |diff| %.3g\n", name, serial, parallel,
                serial / parallel, diff);
}

}  // namespace

int main(int argc, char** argv) {
    const double X = argc > 1 ? std::atof(argv[1]) : 500.0;
    std::printf("threads %d, X = %g\n", omp_get_max_threads(), X);
    Params p;
    p.delta = 0.01;
    const double eta = 1.0;
    PrimeTable table = sieve(static_cast<std::uint64_t>(X) + 2);
    auto arcs = default_decomposition(p, X, eta);

    {
        GridPolicy gs, gp;
        gs.exec = Exec::serial_reference;
        gs.max_refinements = gp.max_refinements = 0;
        gs.truncation = gp.truncation = 20.0;
        IntegralResult rs, rp;
        auto run = [&](const GridPolicy& g, IntegralResult& r) {
            try {
                r = integrate_I(p, table, X, eta, arcs, Arc::full, g);
            } catch (const ToleranceError& e) {
                r.value = e.estimate();
            }
        };
        double ts = seconds([&] { run(gs, rs); });
        double tp = seconds([&] { run(gp, rp); });
        row("integrate_I", ts, tp, std::fabs(rs.value - rp.value));
    }
    {
        std::vector<double> alphas;
        for (int i = 0; i < 200; ++i) alphas.push_back(std::pow(10.0, -4.0 + 4.0 * i / 199.0));
        ExpSumGrid s, q;
        double ts = seconds([&] { s = evaluate_grid(SumKind::S, table, 2.0, p.delta, X * X, alphas, Exec::serial_reference); });
        double tp = seconds([&] { q = evaluate_grid(SumKind::S, table, 2.0, p.delta, X * X, alphas, Exec::parallel); });
        double d = 0.0;
        for (std::size_t i = 0; i < alphas.size(); ++i) d = std::max(d, std::abs(s.values[i] - q.values[i]));
        row("S grid", ts, tp, d);
    }
    {
        SearchResult a, b;
        double ts = seconds([&] { a = find_solutions(p, table, X, eta, Exec::serial_reference); });
        double tp = seconds([&] { b = find_solutions(p, table, X, eta, Exec::parallel); });
        row("find_solutions", ts, tp, static_cast<double>(a.records.size()) - static_cast<double>(b.records.size()));
    }
    return 0;
}
