#include "dioph/expsums.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "dioph/errors.hpp"
#include "dioph/format.hpp"
#include "dioph/quadrature.hpp"

namespace dioph {

std::string to_string(SumKind kind) {
    switch (kind) {
        case SumKind::S: return "S";
        case SumKind::U: return "U";
        case SumKind::T: return "T";
    }
    return "?";
}

SumKind parse_sum_kind(const std::string& text) {
    if (text == "S") return SumKind::S;
    if (text == "U") return SumKind::U;
    if (text == "T") return SumKind::T;
    throw ConfigError("unknown sum kind '" + text + "' (expected S, U or T)");
}

DoubleDouble scaled_power(double lambda, Quad power) {
    constexpr Quad two53 = Quad(9007199254740992.0);
    if (power < two53 && floorq(power) == power) return two_prod(lambda, static_cast<double>(power));
    return to_double_double(static_cast<Quad>(lambda) * power);
}

PowerSum::PowerSum(const PrimeTable& table, double k, double delta, double X)
    : k_(k), delta_(delta), X_(X), primes_(primes_in_power_range(table, k, delta, X)) {
    powers_.reserve(primes_.size());
    for (auto p : primes_) powers_.push_back(power_q(p, k));
}

PhaseSum PowerSum::phase_sum(double lambda, Weighting w) const {
    PhaseSum ps;
    ps.weights.reserve(primes_.size());
    ps.freqs.reserve(primes_.size());
    for (std::size_t i = 0; i < primes_.size(); ++i) {
        ps.weights.push_back(w == Weighting::log_p ? std::log(static_cast<double>(primes_[i])) : 1.0);
        ps.freqs.push_back(scaled_power(lambda, powers_[i]));
    }
    return ps;
}

double PowerSum::total(Weighting w) const {
    if (w == Weighting::unit) return static_cast<double>(primes_.size());
    CompensatedSum s;
    for (auto p : primes_) s.add(std::log(static_cast<double>(p)));
    return s.value();
}

Complex eval_S(const PrimeTable& table, double k, double delta, double X, double alpha) {
    return PowerSum(table, k, delta, X).phase_sum(1.0, Weighting::log_p).eval(alpha);
}

Complex eval_U(const PrimeTable& table, double k, double delta, double X, double alpha) {
    return PowerSum(table, k, delta, X).phase_sum(1.0, Weighting::unit).eval(alpha);
}

namespace {

using GK = GaussKronrod21;

double frac_phase(Quad alpha, Quad u) {
    Quad t = alpha * u;
    return static_cast<double>(t - nearbyintq(t));
}

struct PieceSums {
    CompensatedComplexSum value;
    CompensatedSum gk_error;
    CompensatedSum sq_mass;

    void add_piece(Complex k, Complex g, double mass) {
        value.add(k);
        gk_error.add(std::abs(k - g));
        sq_mass.add(mass * mass);
    }
};

// Integrates amp(u) e(phase0 + alpha (u - u0)) over [u0, u0 + len] with n pieces.
template <class Amp>
void direct_pieces(PieceSums& acc, Amp&& amp, Complex base, double alpha, Quad u0, double len, int n) {
    const double hp = len / n;
    const double half = 0.5 * hp;
    for (int j = 0; j < n; ++j) {
        Complex k{}, g{};
        double mass = 0.0;
        for (std::size_t i = 0; i < GK::kNodes; ++i) {
            double off = hp * j + half * (1.0 + GK::nodes[i]);
            double u = static_cast<double>(u0 + static_cast<Quad>(off));
            double a = amp(u);
            Complex v = a * unit_phasor(alpha * off);
            k += GK::kronrod_weights[i] * v;
            g += GK::gauss_weights[i] * v;
            mass += GK::kronrod_weights[i] * std::fabs(a);
        }
        acc.add_piece(base * k * half, base * g * half, half * mass);
    }
}

TValue t_pass(double k, Quad a, Quad b, double alpha, int nsub) {
    const double inv_k = 1.0 / k;
    const bool constant_amp = (k == 1.0);
    auto amp = [&](double u) { return constant_amp ? 1.0 : inv_k * std::pow(u, inv_k - 1.0); };
    const Quad aq = alpha;
    const Quad h = Quad(1.0) / (Quad(2.0) * aq);

    PieceSums acc;
    Quad u0 = a;

    // Near the lower end the amplitude varies faster than the phase when
    // alpha is small; advance geometrically until a half-period fits.
    if (!constant_amp) {
        while (u0 < b && h > Quad(0.5) * u0) {
            Quad u1 = fminq(Quad(1.5) * u0, b);
            Complex base = unit_phasor(frac_phase(aq, u0));
            direct_pieces(acc, amp, base, alpha, u0, static_cast<double>(u1 - u0), nsub);
            u0 = u1;
        }
    }
    if (u0 >= b) {
        double err = acc.gk_error.value() + 10.0 * kEps * std::sqrt(acc.sq_mass.value());
        return {acc.value.value(), err};
    }

    // Half-period segments [u0 + m h, u0 + (m+1) h]: node phases are
    // phase(u0) + m/2 + (j + (1 + x_i)/2) / (2 nsub), independent of rounding in u.
    const Quad span = b - u0;
    const auto M = static_cast<std::int64_t>(floorq(span / h));
    const Complex base0 = unit_phasor(frac_phase(aq, u0));
    if (M > 0) {
        const double hd = static_cast<double>(h);
        const double hp = hd / nsub;
        const double half = 0.5 * hp;
        std::vector<Complex> c(static_cast<std::size_t>(nsub) * GK::kNodes);
        for (int j = 0; j < nsub; ++j)
            for (std::size_t i = 0; i < GK::kNodes; ++i)
                c[j * GK::kNodes + i] = unit_phasor((j + 0.5 * (1.0 + GK::nodes[i])) / (2.0 * nsub));
        const double ud = static_cast<double>(u0);

        auto segment = [&](std::int64_t m, Complex& kv, Complex& gv, double& mass) {
            kv = gv = Complex{};
            mass = 0.0;
            for (int j = 0; j < nsub; ++j) {
                Complex kk{}, gg{};
                double mm = 0.0;
                for (std::size_t i = 0; i < GK::kNodes; ++i) {
                    double u = ud + (hd * static_cast<double>(m) + (hp * j + half * (1.0 + GK::nodes[i])));
                    double av = amp(u);
                    Complex v = av * c[j * GK::kNodes + i];
                    kk += GK::kronrod_weights[i] * v;
                    gg += GK::gauss_weights[i] * v;
                    mm += GK::kronrod_weights[i] * av;
                }
                kv += half * kk;
                gv += half * gg;
                mass += half * mm;
            }
        };

        if (constant_amp) {
            Complex kv, gv;
            double mass;
            segment(0, kv, gv, mass);
            // sum_{m<M} (-1)^m is 1 for odd M and 0 for even M
            Complex s = (M % 2) ? kv : Complex{};
            acc.value.add(base0 * s);
            acc.gk_error.add(static_cast<double>(M) * std::abs(kv - gv));
            acc.sq_mass.add(static_cast<double>(M) * mass * mass);
        } else {
            CompensatedComplexSum seg_sum;
            CompensatedSum seg_err, seg_sq;
            for (std::int64_t m = 0; m < M; ++m) {
                Complex kv, gv;
                double mass;
                segment(m, kv, gv, mass);
                double sgn = (m % 2) ? -1.0 : 1.0;
                seg_sum.add(sgn * kv);
                seg_err.add(std::abs(kv - gv));
                seg_sq.add(mass * mass);
            }
            acc.value.add(base0 * seg_sum.value());
            acc.gk_error.add(seg_err.value());
            acc.sq_mass.add(seg_sq.value());
        }
    }

    // Remaining partial segment, starting at phase(u0) + M/2.
    Quad ustart = u0 + static_cast<Quad>(M) * h;
    double rest = static_cast<double>(span - static_cast<Quad>(M) * h);
    if (rest > 0.0) {
        Complex base = (M % 2) ? -base0 : base0;
        direct_pieces(acc, amp, base, alpha, ustart, rest, nsub);
    }
    double err = acc.gk_error.value() + 10.0 * kEps * std::sqrt(acc.sq_mass.value());
    return {acc.value.value(), err};
}

}  // namespace

TValue eval_T(double k, double delta, double X, double alpha, double tol) {
    if (!(tol > 0.0)) throw ConfigError("eval_T: tol must be positive");
    if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("eval_T: delta must lie in (0, 1)");
    if (!(X > 0.0) || !(k >= 1.0)) throw ConfigError("eval_T: need X > 0 and k >= 1");
    if (!std::isfinite(alpha)) throw ConfigError("eval_T: alpha must be finite");
    const Quad a = static_cast<Quad>(delta) * static_cast<Quad>(X);
    const Quad b = X;
    if (alpha == 0.0) {
        Quad e = Quad(1.0) / static_cast<Quad>(k);
        Quad v = (k == 1.0) ? b - a : powq(b, e) - powq(a, e);
        return {Complex(static_cast<double>(v), 0.0), 0.0};
    }
    const bool neg = alpha < 0.0;
    const double al = std::fabs(alpha);
    constexpr int kMaxRefine = 4;
    TValue r;
    for (int level = 0; level <= kMaxRefine; ++level) {
        r = t_pass(k, a, b, al, 1 << level);
        if (r.error <= tol) break;
        if (level == kMaxRefine)
            throw ToleranceError("eval_T: tolerance " + format_real(tol) + " not reached", std::abs(r.value),
                                 r.error);
    }
    if (neg) r.value = std::conj(r.value);
    return r;
}

namespace {

// int_0^inf amp(c + i y) e^{-2 pi beta y} dy for amp(u) = u^{1/k - 1} / k.
Complex vertical_ray(double k, double c, double beta, double& err) {
    static constexpr std::array<double, 8> cuts = {0.0, 1.0, 3.0, 6.0, 11.0, 18.0, 28.0, 50.0};
    const double inv_k = 1.0 / k;
    const double scale = 1.0 / (kTwoPi * beta);
    Complex total{};
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
        const double half = 0.5 * (cuts[s + 1] - cuts[s]), mid = 0.5 * (cuts[s] + cuts[s + 1]);
        Complex kk{}, gg{};
        for (std::size_t i = 0; i < GK::kNodes; ++i) {
            double x = mid + half * GK::nodes[i];
            Complex u(c, x * scale);
            Complex v = (k == 1.0 ? Complex(1.0) : inv_k * std::pow(u, inv_k - 1.0)) * std::exp(-x);
            kk += GK::kronrod_weights[i] * v;
            gg += GK::gauss_weights[i] * v;
        }
        total += half * kk;
        err += scale * half * std::abs(kk - gg);
    }
    return scale * total;
}

}  // namespace

TValue eval_T_contour(double k, double delta, double X, double alpha) {
    if (!(delta > 0.0) || !(delta < 1.0)) throw ConfigError("eval_T_contour: delta must lie in (0, 1)");
    if (!(X > 0.0) || !(k >= 1.0)) throw ConfigError("eval_T_contour: need X > 0 and k >= 1");
    if (alpha == 0.0 || !std::isfinite(alpha)) return eval_T(k, delta, X, alpha, 1.0);
    const double beta = std::fabs(alpha);
    const double inv_k = 1.0 / k;
    const Quad a = static_cast<Quad>(delta) * static_cast<Quad>(X);
    const Quad b = X;
    const Quad bq = beta;
    const double cut = 10.0 / (kTwoPi * beta);
    const Quad c = fmaxq(a, fminq(b, static_cast<Quad>(cut)));
    auto amp = [&](double u) { return k == 1.0 ? 1.0 : inv_k * std::pow(u, inv_k - 1.0); };

    PieceSums acc;
    // Real-line part [a, c]: fewer than two periods; geometric pieces follow the amplitude.
    Quad u0 = a;
    while (u0 < c) {
        Quad u1 = fminq(Quad(2.0) * u0, c);
        direct_pieces(acc, amp, unit_phasor(frac_phase(bq, u0)), beta, u0, static_cast<double>(u1 - u0), 1);
        u0 = u1;
    }
    TValue r{acc.value.value(), acc.gk_error.value() + 10.0 * kEps * std::sqrt(acc.sq_mass.value())};
    if (c < b) {
        double err = 0.0;
        Complex jc = vertical_ray(k, static_cast<double>(c), beta, err);
        Complex jb = vertical_ray(k, X, beta, err);
        const Complex I(0.0, 1.0);
        r.value += I * (unit_phasor(frac_phase(bq, c)) * jc - unit_phasor(frac_phase(bq, b)) * jb);
        r.error += err + 10.0 * kEps * (std::abs(jc) + std::abs(jb));
    }
    if (alpha < 0.0) r.value = std::conj(r.value);
    return r;
}

double kernel_K(double eta, double alpha) {
    if (!(eta > 0.0)) throw ConfigError("kernel_K: eta must be positive");
    double x = alpha * eta;
    if (std::fabs(x) < 1e-4) {
        double y = std::numbers::pi * x;
        double y2 = y * y;
        return eta * eta * (1.0 - y2 / 3.0 + 2.0 * y2 * y2 / 45.0);
    }
    double s = sin_pi(x) / (std::numbers::pi * alpha);
    return s * s;
}

double kernel_Khat(double eta, double t) {
    if (!(eta > 0.0)) throw ConfigError("kernel_Khat: eta must be positive");
    return std::max(0.0, eta - std::fabs(t));
}

double default_t_tolerance(double k, double delta, double X) {
    (void)delta;
    return 1e-12 * std::max(1.0, std::pow(X, 1.0 / k));
}

ExpSumGrid evaluate_grid(SumKind kind, const PrimeTable& table, double k, double delta, double X,
                         std::span<const double> alphas, Exec exec) {
    for (std::size_t i = 1; i < alphas.size(); ++i)
        if (!(alphas[i] > alphas[i - 1])) throw ConfigError("alpha grid must be strictly ascending");
    ExpSumGrid g;
    g.alphas.assign(alphas.begin(), alphas.end());
    g.values.resize(alphas.size());
    g.kind = kind;
    g.k = k;
    g.delta = delta;
    g.X = X;
    const auto n = static_cast<std::int64_t>(alphas.size());

    if (kind == SumKind::T) {
        g.quad_error.resize(alphas.size());
        const double tol = default_t_tolerance(k, delta, X);
        g.trivial_bound = std::pow(X, 1.0 / k);
        if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
            for (std::int64_t i = 0; i < n; ++i) {
                auto r = eval_T(k, delta, X, alphas[i], tol);
                g.values[i] = r.value;
                g.quad_error[i] = r.error;
            }
        } else {
            for (std::int64_t i = 0; i < n; ++i) {
                auto r = eval_T(k, delta, X, alphas[i], tol);
                g.values[i] = r.value;
                g.quad_error[i] = r.error;
            }
        }
        return g;
    }

    PowerSum sum(table, k, delta, X);
    Weighting w = kind == SumKind::S ? Weighting::log_p : Weighting::unit;
    PhaseSum ps = sum.phase_sum(1.0, w);
    g.trivial_bound = sum.total(w);
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 8)
        for (std::int64_t i = 0; i < n; ++i) g.values[i] = ps.eval(alphas[i]);
    } else {
        for (std::int64_t i = 0; i < n; ++i) g.values[i] = ps.eval(alphas[i]);
    }
    return g;
}

std::string grid_csv(const ExpSumGrid& grid) {
    std::string out = csv_row({"alpha", "re", "im", "abs", "kind", "quad_error"});
    for (std::size_t i = 0; i < grid.alphas.size(); ++i) {
        const Complex v = grid.values[i];
        out += csv_row({format_real(grid.alphas[i]), format_real(v.real()), format_real(v.imag()),
                        format_real(std::abs(v)), to_string(grid.kind),
                        grid.kind == SumKind::T ? format_real(grid.quad_error[i]) : std::string()});
    }
    return out;
}

TuGap tu_gap_check(const PrimeTable& table, double k, double delta, double X, std::span<const double> alphas) {
    if (alphas.empty()) throw ConfigError("tu_gap_check: empty grid");
    for (double a : alphas)
        if (!(std::fabs(a) <= 1.0)) throw ConfigError("tu_gap_check: grid must lie in [-1, 1]");
    PhaseSum u = PowerSum(table, k, delta, X).phase_sum(1.0, Weighting::unit);
    const double tol = default_t_tolerance(k, delta, X);
    const auto n = static_cast<std::int64_t>(alphas.size());
    std::vector<double> ratio(alphas.size()), lo(alphas.size()), hi(alphas.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        auto t = eval_T(k, delta, X, alphas[i], tol);
        double gap = std::abs(t.value - u.eval(alphas[i]));
        double den = 1.0 + std::fabs(alphas[i]) * X;
        ratio[i] = gap / den;
        lo[i] = std::max(0.0, gap - t.error) / den;
        hi[i] = (gap + t.error) / den;
    }
    TuGap out;
    for (std::size_t i = 0; i < ratio.size(); ++i) {
        if (i == 0 || ratio[i] > out.constant) {
            out.constant = ratio[i];
            out.argmax = alphas[i];
        }
        out.lower = std::max(out.lower, lo[i]);
        out.upper = std::max(out.upper, hi[i]);
    }
    return out;
}

double t_decay_constant(double k, double delta, double X, std::span<const double> alphas) {
    const double tol = default_t_tolerance(k, delta, X);
    const double scale = std::pow(X, 1.0 / k - 1.0);
    double c = 0.0;
    for (double a : alphas) {
        if (a == 0.0) continue;
        auto t = eval_T(k, delta, X, a, tol);
        c = std::max(c, std::abs(t.value) * std::fabs(a) / scale);
    }
    return c;
}

}  // namespace dioph
