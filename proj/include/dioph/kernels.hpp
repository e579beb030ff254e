#pragma once

// Panel quadrature kernels. Every integral over a uniform panel grid is cut
// into fixed chunks of kChunkPanels panels; chunks are evaluated in parallel
// and reduced in ascending order, so results do not depend on the thread
// count. Exponential sums are either rotated from panel to panel (parallel
// path) or evaluated directly at every node (serial reference path).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

#include "dioph/precise.hpp"
#include "dioph/quadrature.hpp"

namespace dioph {

enum class Exec { parallel, serial_reference };

// sum_j weights[j] * e(freqs[j] * alpha)
struct PhaseSum {
    std::vector<double> weights;
    std::vector<DoubleDouble> freqs;

    std::size_t size() const noexcept { return weights.size(); }
    double weight_total() const {
        CompensatedSum s;
        for (double w : weights) s.add(std::fabs(w));
        return s.value();
    }
    double max_abs_freq() const {
        double m = 0.0;
        for (const auto& f : freqs) m = std::max(m, std::fabs(f.hi));
        return m;
    }
    Complex eval(double alpha) const {
        CompensatedComplexSum s;
        for (std::size_t j = 0; j < weights.size(); ++j)
            s.add(weights[j] * unit_phasor(reduced_phase(freqs[j], alpha)));
        return s.value();
    }
};

struct UniformPanels {
    double start = 0.0;
    double width = 0.0;
    std::size_t count = 0;

    double panel_start(std::size_t m) const { return start + width * static_cast<double>(m); }
    double end() const { return start + width * static_cast<double>(count); }
};

inline constexpr std::size_t kChunkPanels = 64;

struct IntegrationTotals {
    Complex value{};        // Kronrod
    Complex gauss{};        // embedded Gauss
    double gk_error = 0.0;  // sum over panels of |K - G|
    double abs_mass = 0.0;  // Kronrod integral of |f|
    double rms_mass = 0.0;  // sqrt(sum over panels of (integral of |f|)^2)
    std::size_t evaluations = 0;

    void merge(const IntegrationTotals& o) {
        value += o.value;
        gauss += o.gauss;
        gk_error += o.gk_error;
        abs_mass += o.abs_mass;
        rms_mass = std::hypot(rms_mass, o.rms_mass);
        evaluations += o.evaluations;
    }
};

namespace detail {

struct ChunkResult {
    CompensatedComplexSum kron;
    CompensatedComplexSum gauss;
    CompensatedSum gk_err;
    CompensatedSum abs_mass;
    CompensatedSum sq_mass;
    std::size_t evals = 0;
};

inline void accumulate_panel(ChunkResult& acc, const Complex* vals, double half) {
    using GK = GaussKronrod21;
    Complex k{}, g{};
    double a = 0.0;
    for (std::size_t i = 0; i < GK::kNodes; ++i) {
        k += GK::kronrod_weights[i] * vals[i];
        g += GK::gauss_weights[i] * vals[i];
        a += GK::kronrod_weights[i] * std::abs(vals[i]);
    }
    acc.kron.add(half * k);
    acc.gauss.add(half * g);
    acc.gk_err.add(half * std::abs(k - g));
    acc.abs_mass.add(half * a);
    acc.sq_mass.add(half * a * half * a);
    acc.evals += GK::kNodes;
}

}  // namespace detail

// Integrates over `panels` using a chunk evaluator: eval(first, count, out)
// fills out[m * 21 + i] with the integrand at node i of panel first + m.
template <class ChunkEval>
IntegrationTotals integrate_chunks(const UniformPanels& panels, ChunkEval&& eval, Exec exec) {
    const std::size_t nchunks = (panels.count + kChunkPanels - 1) / kChunkPanels;
    std::vector<detail::ChunkResult> results(nchunks);
    const double half = 0.5 * panels.width;

    auto run_chunk = [&](std::size_t c, std::vector<Complex>& buf) {
        std::size_t first = c * kChunkPanels;
        std::size_t count = std::min(kChunkPanels, panels.count - first);
        buf.assign(count * GaussKronrod21::kNodes, Complex{});
        eval(first, count, std::span<Complex>(buf));
        for (std::size_t m = 0; m < count; ++m)
            detail::accumulate_panel(results[c], buf.data() + m * GaussKronrod21::kNodes, half);
    };

    if (exec == Exec::parallel) {
#pragma omp parallel
        {
            std::vector<Complex> buf;
#pragma omp for schedule(dynamic, 1)
            for (std::int64_t c = 0; c < static_cast<std::int64_t>(nchunks); ++c)
                run_chunk(static_cast<std::size_t>(c), buf);
        }
    } else {
        std::vector<Complex> buf;
        for (std::size_t c = 0; c < nchunks; ++c) run_chunk(c, buf);
    }

    IntegrationTotals t;
    CompensatedComplexSum kron, gauss;
    CompensatedSum err, mass, sq;
    for (const auto& r : results) {
        kron.add(r.kron.value());
        gauss.add(r.gauss.value());
        err.add(r.gk_err.value());
        mass.add(r.abs_mass.value());
        sq.add(r.sq_mass.value());
        t.evaluations += r.evals;
    }
    t.value = kron.value();
    t.gauss = gauss.value();
    t.gk_error = err.value();
    t.abs_mass = mass.value();
    t.rms_mass = std::sqrt(sq.value());
    return t;
}

// Offsets of the 21 Kronrod nodes from a panel's left end.
inline std::array<double, GaussKronrod21::kNodes> node_offsets(double width) {
    std::array<double, GaussKronrod21::kNodes> off{};
    for (std::size_t i = 0; i < off.size(); ++i) off[i] = 0.5 * width * (1.0 + GaussKronrod21::nodes[i]);
    return off;
}

// Integrand f(alpha) evaluated pointwise.
template <class F>
IntegrationTotals integrate_function(const UniformPanels& panels, F&& f, Exec exec) {
    const auto off = node_offsets(panels.width);
    auto eval = [&](std::size_t first, std::size_t count, std::span<Complex> out) {
        for (std::size_t m = 0; m < count; ++m) {
            double a0 = panels.panel_start(first + m);
            for (std::size_t i = 0; i < off.size(); ++i) out[m * off.size() + i] = f(a0 + off[i]);
        }
    };
    return integrate_chunks(panels, eval, exec);
}

// Integrand combine(values, alpha) where values[s] = sums[s](alpha).
// Parallel path: each chunk seeds e(f (a0 + x_i)) once, then multiplies by
// e(f * width) per panel. Serial path evaluates every phase directly.
template <class Combine>
IntegrationTotals integrate_phase_product(std::span<const PhaseSum> sums, const UniformPanels& panels,
                                          Combine&& combine, Exec exec) {
    constexpr std::size_t N = GaussKronrod21::kNodes;
    const auto off = node_offsets(panels.width);
    const std::size_t ns = sums.size();

    if (exec == Exec::serial_reference) {
        auto eval = [&](std::size_t first, std::size_t count, std::span<Complex> out) {
            std::vector<Complex> vals(ns);
            for (std::size_t m = 0; m < count; ++m) {
                double a0 = panels.panel_start(first + m);
                for (std::size_t i = 0; i < N; ++i) {
                    for (std::size_t s = 0; s < ns; ++s) {
                        const auto& ps = sums[s];
                        Complex acc{};
                        for (std::size_t j = 0; j < ps.size(); ++j) {
                            double t = reduced_phase(ps.freqs[j], a0) + reduced_phase(ps.freqs[j], off[i]);
                            acc += ps.weights[j] * unit_phasor(t);
                        }
                        vals[s] = acc;
                    }
                    out[m * N + i] = combine(std::span<const Complex>(vals), a0 + off[i]);
                }
            }
        };
        return integrate_chunks(panels, eval, exec);
    }

    auto eval = [&](std::size_t first, std::size_t count, std::span<Complex> out) {
        // Per sum: phasors z[i * n + j] (node i, term j) and step r[j].
        std::vector<std::vector<double>> zr(ns), zi(ns), rr(ns), ri(ns);
        const double a0 = panels.panel_start(first);
        for (std::size_t s = 0; s < ns; ++s) {
            const auto& ps = sums[s];
            const std::size_t n = ps.size();
            zr[s].resize(N * n);
            zi[s].resize(N * n);
            rr[s].resize(n);
            ri[s].resize(n);
            for (std::size_t j = 0; j < n; ++j) {
                double base = reduced_phase(ps.freqs[j], a0);
                for (std::size_t i = 0; i < N; ++i) {
                    Complex z = unit_phasor(base + reduced_phase(ps.freqs[j], off[i]));
                    zr[s][i * n + j] = z.real();
                    zi[s][i * n + j] = z.imag();
                }
                Complex r = unit_phasor(reduced_phase(ps.freqs[j], panels.width));
                rr[s][j] = r.real();
                ri[s][j] = r.imag();
            }
        }
        std::vector<Complex> vals(ns);
        for (std::size_t m = 0; m < count; ++m) {
            double pa = a0 + panels.width * static_cast<double>(m);
            for (std::size_t i = 0; i < N; ++i) {
                for (std::size_t s = 0; s < ns; ++s) {
                    const std::size_t n = sums[s].size();
                    const double* w = sums[s].weights.data();
                    double* xr = zr[s].data() + i * n;
                    double* xi = zi[s].data() + i * n;
                    const double* cr = rr[s].data();
                    const double* ci = ri[s].data();
                    double sr = 0.0, si = 0.0;
#pragma omp simd reduction(+ : sr, si)
                    for (std::size_t j = 0; j < n; ++j) {
                        double a = xr[j], b = xi[j];
                        sr += w[j] * a;
                        si += w[j] * b;
                        xr[j] = a * cr[j] - b * ci[j];
                        xi[j] = a * ci[j] + b * cr[j];
                    }
                    vals[s] = {sr, si};
                }
                out[m * N + i] = combine(std::span<const Complex>(vals), pa + off[i]);
            }
        }
    };
    return integrate_chunks(panels, eval, exec);
}

}  // namespace dioph
