#include "dioph/arcs.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dioph/errors.hpp"
#include "dioph/format.hpp"
#include "dioph/solver.hpp"
#include "json.hpp"

namespace dioph {

std::string to_string(Arc arc) {
    switch (arc) {
        case Arc::major: return "major";
        case Arc::minor: return "minor";
        case Arc::trivial: return "trivial";
        case Arc::full: return "full";
    }
    return "?";
}

Arc parse_arc(const std::string& text) {
    if (text == "major") return Arc::major;
    if (text == "minor") return Arc::minor;
    if (text == "trivial") return Arc::trivial;
    if (text == "full") return Arc::full;
    throw ConfigError("unknown arc '" + text + "' (expected major, minor, trivial or full)");
}

std::vector<Interval> ArcDecomposition::pieces(Arc arc, double A) const {
    const double m = major_edge();
    switch (arc) {
        case Arc::major: return {{-m, m}};
        case Arc::minor: return {{-R, -m}, {m, R}};
        case Arc::trivial:
            if (!(A > R)) return {};
            return {{-A, -R}, {R, A}};
        case Arc::full: {
            std::vector<Interval> out = {{-R, -m}, {-m, m}, {m, R}};
            if (A > R) {
                out.insert(out.begin(), Interval{-A, -R});
                out.push_back({R, A});
            }
            return out;
        }
    }
    return {};
}

ArcDecomposition decompose(double X, double P, double R, std::optional<double> eta) {
    if (!(X > 0.0)) throw ConfigError("decompose: X must be positive");
    if (!(P >= 1.0)) throw ConfigError("decompose: P must be >= 1");
    if (!(P / X < R)) throw ConfigError("decompose: P/X must be below R (empty minor arc)");
    if (eta && !(R > 1.0 / *eta)) throw ConfigError("decompose: R must exceed 1/eta");
    return {X, P, R};
}

ArcDecomposition default_decomposition(const Params& params, double X, double eta) {
    return decompose(X, major_arc_P(X, params.k, params.epsilon), trivial_arc_R(X, eta), eta);
}

Integrand::Integrand(const Params& params, const PrimeTable& table, double X, double eta, bool unit_sums)
    : eta_(eta) {
    if (!(eta > 0.0)) throw ConfigError("integrand: eta must be positive");
    const auto ks = params.exponents();
    sums_.reserve(5);
    for (int i = 0; i < 4; ++i) {
        if (unit_sums) {
            sums_.push_back(PhaseSum{{1.0}, {DoubleDouble{}}});
            at_zero_[i] = 1.0;
        } else {
            PowerSum ps(table, ks[i], params.delta, X);
            sums_.push_back(ps.phase_sum(params.lambda[i], Weighting::log_p));
            at_zero_[i] = ps.total(Weighting::log_p);
            max_freq_ += sums_.back().max_abs_freq();
        }
        trivial_ *= at_zero_[i];
    }
    sums_.push_back(PhaseSum{{1.0}, {DoubleDouble{-params.omega, 0.0}}});
    max_freq_ += std::fabs(params.omega);
}

Complex Integrand::combine(std::span<const Complex> v, double alpha) const {
    return v[0] * v[1] * v[2] * v[3] * v[4] * kernel_K(eta_, alpha);
}

Complex Integrand::operator()(double alpha) const {
    std::array<Complex, 5> v;
    for (std::size_t i = 0; i < 5; ++i) v[i] = sums_[i].eval(alpha);
    return combine(v, alpha);
}

Complex integrand(const Params& params, const PrimeTable& table, double X, double eta, double alpha) {
    return Integrand(params, table, X, eta)(alpha);
}

std::string to_json(const IntegralResult& r) {
    nlohmann::ordered_json j;
    j["arc"] = to_string(r.arc);
    j["value"] = r.value;
    j["quad_error"] = r.quad_error;
    j["tail_bound"] = r.tail_bound;
    j["imag_residual"] = r.imag_residual;
    j["truncation"] = r.truncation;
    j["evaluations"] = r.evaluations;
    j["params_digest"] = r.params_digest;
    j["version"] = std::string(kVersion);
    return j.dump(2) + "\n";
}

IntegralResult integrate_I(const Params& params, const PrimeTable& table, double X, double eta,
                           const ArcDecomposition& arcs, Arc arc, const GridPolicy& policy) {
    if (!(policy.panels_per_period > 0.0) || !(policy.major_divisor > 0.0))
        throw ConfigError("integrate_I: grid policy widths must be positive");
    Integrand f(params, table, X, eta, policy.unit_sums);
    const double A = policy.truncation > 0.0 ? policy.truncation : std::max(arcs.R, 50.0 / eta);
    const double base_width = 1.0 / (policy.panels_per_period * (f.max_frequency() + eta));
    const double major_width = std::min(base_width, arcs.major_edge() / policy.major_divisor);
    auto combine = [&](std::span<const Complex> v, double a) { return f.combine(v, a); };

    IntegralResult res;
    res.arc = arc;
    res.params_digest = params_digest(params);
    CompensatedComplexSum total;
    CompensatedSum err;
    bool missed = false;
    for (const auto& piece : arcs.pieces(arc, A)) {
        const double len = piece.hi - piece.lo;
        if (!(len > 0.0)) continue;
        const bool is_major = piece.lo == -arcs.major_edge() && piece.hi == arcs.major_edge();
        const double w = is_major ? major_width : base_width;
        auto n = static_cast<std::size_t>(std::ceil(len / w));
        IntegrationTotals t;
        for (int level = 0;; ++level) {
            t = integrate_phase_product(f.sums(), UniformPanels{piece.lo, len / static_cast<double>(n), n},
                                        combine, policy.exec);
            res.evaluations += t.evaluations;
            if (t.gk_error <= policy.rel_tol * t.abs_mass) break;
            if (level == policy.max_refinements) {
                missed = true;
                break;
            }
            n *= 2;
        }
        total.add(t.value);
        err.add(t.gk_error + 100.0 * kEps * t.abs_mass);
    }
    const Complex v = total.value();
    res.value = v.real();
    res.imag_residual = std::fabs(v.imag());
    res.quad_error = err.value();
    if (arc == Arc::trivial || arc == Arc::full) {
        res.truncation = A;
        const double unit = 2.0 / (std::numbers::pi * std::numbers::pi * A);
        res.tail_bound = policy.unit_sums ? unit
                                          : std::min(tail_estimate(params, table, X, eta, A),
                                                     tail_estimate_trivial(params, table, X, eta, A));
    }
    if (missed)
        throw ToleranceError("integrate_I: quadrature target missed on the " + to_string(arc) + " arc", res.value,
                             res.quad_error);
    return res;
}

double direct_sum_I(const Params& params, const PrimeTable& table, double X, double eta) {
    return find_solutions(params, table, X, eta).stats.weighted_sum;
}

namespace {

// int_{|b| > B} f(b) / b^2 db for 1-periodic f >= 0 with mean L.
double periodic_tail(double L, double B) { return 2.0 * L * (2.0 / (B * B) + 1.0 / B); }

}  // namespace

double tail_estimate(const Params& params, const PrimeTable& table, double X, double eta, double A) {
    (void)eta;
    if (!(A >= 1.0)) throw ConfigError("tail_estimate: A must be >= 1");
    const auto ks = params.exponents();
    PowerSum s1(table, ks[0], params.delta, X);
    PowerSum s2(table, ks[1], params.delta, X);
    PowerSum sk(table, ks[3], params.delta, X);

    // mean square of S1 over a period: sum of log^2 p
    CompensatedSum l2;
    for (auto p : s1.primes()) {
        double lp = std::log(static_cast<double>(p));
        l2.add(lp * lp);
    }
    // fourth moment of S2: sum over n of (sum_{p^2 + q^2 = n} log p log q)^2
    std::vector<std::pair<std::uint64_t, double>> pairs;
    const auto pr = s2.primes();
    pairs.reserve(pr.size() * pr.size());
    for (auto p : pr)
        for (auto q : pr)
            pairs.push_back({p * p + q * q, std::log(static_cast<double>(p)) * std::log(static_cast<double>(q))});
    std::sort(pairs.begin(), pairs.end());
    CompensatedSum l4;
    for (std::size_t i = 0; i < pairs.size();) {
        std::size_t j = i;
        double c = 0.0;
        while (j < pairs.size() && pairs[j].first == pairs[i].first) c += pairs[j++].second;
        l4.add(c * c);
        i = j;
    }

    const double lam1 = std::fabs(params.lambda[0]);
    const double f2 = lam1 * periodic_tail(l2.value(), lam1 * A);
    double sum = 0.0;
    for (int j : {1, 2}) {
        const double lj = std::fabs(params.lambda[j]);
        sum += std::sqrt(f2) * std::sqrt(lj * periodic_tail(l4.value(), lj * A));
    }
    return sk.total(Weighting::log_p) / (2.0 * std::numbers::pi * std::numbers::pi) * sum;
}

double tail_estimate_trivial(const Params& params, const PrimeTable& table, double X, double eta, double A) {
    (void)eta;
    if (!(A > 0.0)) throw ConfigError("tail_estimate_trivial: A must be positive");
    const auto ks = params.exponents();
    double prod = 1.0;
    for (int i = 0; i < 4; ++i) prod *= PowerSum(table, ks[i], params.delta, X).total(Weighting::log_p);
    return prod * 2.0 / (std::numbers::pi * std::numbers::pi * A);
}

namespace {

// int_{-inf}^{y} max(0, eta - |s|) ds
double khat_primitive(double eta, double y) {
    if (y <= -eta) return 0.0;
    if (y <= 0.0) return 0.5 * (y + eta) * (y + eta);
    if (y < eta) return eta * eta - 0.5 * (eta - y) * (eta - y);
    return eta * eta;
}

struct PointEstimate {
    double value = 0.0;
    double error = 0.0;
};

// Adaptive GK21 for an integrand that carries its own error bound.
template <class F>
QuadEstimate adaptive_with_error(F&& f, double a, double b, double tol, int max_depth = 30) {
    using GK = GaussKronrod21;
    if (!(b > a)) return {};
    struct Panel {
        double k, g, prop;
    };
    auto panel = [&](double lo, double hi) {
        const double half = 0.5 * (hi - lo), mid = 0.5 * (lo + hi);
        Panel p{0.0, 0.0, 0.0};
        for (std::size_t i = 0; i < GK::kNodes; ++i) {
            PointEstimate v = f(mid + half * GK::nodes[i]);
            p.k += GK::kronrod_weights[i] * v.value;
            p.g += GK::gauss_weights[i] * v.value;
            p.prop += GK::kronrod_weights[i] * v.error;
        }
        p.k *= half;
        p.g *= half;
        p.prop *= half;
        return p;
    };
    CompensatedSum value, error;
    const double width = b - a;
    auto rec = [&](auto&& self, double lo, double hi, const Panel& p, int depth) -> void {
        double e = std::fabs(p.k - p.g);
        if (e <= tol * (hi - lo) / width || depth >= max_depth) {
            value.add(p.k);
            error.add(e + p.prop);
            return;
        }
        double mid = 0.5 * (lo + hi);
        self(self, lo, mid, panel(lo, mid), depth + 1);
        self(self, mid, hi, panel(mid, hi), depth + 1);
    };
    rec(rec, a, b, panel(a, b), 0);
    return {value.value(), error.value()};
}

struct MeasureSetup {
    double eta, omega;
    double lam1, lam2, lam3, lam4, k;
    double e_lo, e_hi;  // range of lambda1 t1
    double lo, hi;      // u-range [delta X, X] shared by all variables
    double l4, h4;      // t4 range
    double rel_tol;

    // int over t1 of Khat(lambda1 t1 - w)
    double D(double w) const {
        return (khat_primitive(eta, e_hi - w) - khat_primitive(eta, e_lo - w)) / std::fabs(lam1);
    }

    // int over t1, t4 of Khat(lambda1 t1 + lambda4 t4^k - z)
    PointEstimate Psi(double z) const {
        std::vector<double> br;
        for (double e : {e_lo, e_hi})
            for (double v : {-eta, 0.0, eta}) {
                double arg = (v - e + z) / lam4;
                if (arg > 0.0) br.push_back(std::pow(arg, 1.0 / k));
            }
        for (double t = 2.0 * l4; t < h4; t *= 2.0) br.push_back(t);
        br = clip_breaks(std::move(br), l4, h4);
        PointEstimate out;
        CompensatedSum s;
        for (std::size_t i = 0; i + 1 < br.size(); ++i) {
            auto q = gk21_panel([&](double t) { return D(z - lam4 * std::pow(t, k)); }, br[i], br[i + 1]);
            s.add(q.value);
            out.error += q.error;
        }
        out.value = s.value();
        return out;
    }

    // density of lambda2 t2^2 + lambda3 t3^2 at y (t uniform on its range)
    PointEstimate phi(double y) const {
        // u2 such that u3 = (y - lambda2 u2) / lambda3 lies in [lo, hi]
        double a = (y - lam3 * lo) / lam2, b = (y - lam3 * hi) / lam2;
        double u_lo = std::max(lo, std::min(a, b)), u_hi = std::min(hi, std::max(a, b));
        if (!(u_hi > u_lo)) return {};
        auto g = [&](double u2) {
            double u3 = (y - lam2 * u2) / lam3;
            if (u3 <= 0.0) return 0.0;
            return 0.25 / std::fabs(lam3) / std::sqrt(u2 * u3);
        };
        // both endpoint singularities sit at least delta X away; grade toward them
        auto crude = adaptive_gk21(g, u_lo, u_hi, 1e-3 * (u_hi - u_lo) * g(0.5 * (u_lo + u_hi)) + 1e-300);
        auto fine = adaptive_gk21(g, u_lo, u_hi, rel_tol * std::fabs(crude.value) + 1e-300);
        return {fine.value, fine.error};
    }
};

}  // namespace

QuadEstimate j1_measure_side(const Params& params, double X, double eta, double rel_tol) {
    if (!(eta > 0.0)) throw ConfigError("main_term_J1: eta must be positive");
    if (!(params.delta > 0.0 && params.delta < 1.0)) throw ConfigError("main_term_J1: delta must lie in (0, 1)");
    for (double l : params.lambda)
        if (l == 0.0) throw ConfigError("main_term_J1: lambda must be nonzero");
    MeasureSetup m;
    m.eta = eta;
    m.omega = params.omega;
    m.lam1 = params.lambda[0];
    m.lam2 = params.lambda[1];
    m.lam3 = params.lambda[2];
    m.lam4 = params.lambda[3];
    m.k = params.k;
    m.lo = params.delta * X;
    m.hi = X;
    m.e_lo = std::min(m.lam1 * m.lo, m.lam1 * m.hi);
    m.e_hi = std::max(m.lam1 * m.lo, m.lam1 * m.hi);
    m.l4 = std::pow(m.lo, 1.0 / m.k);
    m.h4 = std::pow(m.hi, 1.0 / m.k);
    m.rel_tol = rel_tol;

    // y ranges over lambda2 u2 + lambda3 u3
    std::vector<double> corners;
    for (double u2 : {m.lo, m.hi})
        for (double u3 : {m.lo, m.hi}) corners.push_back(m.lam2 * u2 + m.lam3 * u3);
    const double y_lo = *std::min_element(corners.begin(), corners.end());
    const double y_hi = *std::max_element(corners.begin(), corners.end());
    std::vector<double> br = corners;
    for (double e : {m.e_lo, m.e_hi})
        for (double v : {-eta, 0.0, eta})
            for (double t4 : {m.l4, m.h4}) br.push_back(m.omega - (e - v + m.lam4 * std::pow(t4, m.k)));
    br = clip_breaks(std::move(br), y_lo, y_hi);

    auto f = [&](double y) {
        PointEstimate p = m.phi(y);
        if (p.value == 0.0 && p.error == 0.0) return PointEstimate{};
        PointEstimate q = m.Psi(m.omega - y);
        return PointEstimate{p.value * q.value, p.error * std::fabs(q.value) + std::fabs(p.value) * q.error};
    };
    // crude pass to set an absolute tolerance
    double crude = 0.0;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double half = 0.5 * (br[i + 1] - br[i]), mid = 0.5 * (br[i] + br[i + 1]);
        for (std::size_t j = 0; j < GaussKronrod21::kNodes; ++j)
            crude += half * GaussKronrod21::kronrod_weights[j] * f(mid + half * GaussKronrod21::nodes[j]).value;
    }
    const double tol = rel_tol * std::fabs(crude) + 1e-300;
    CompensatedSum value, error;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        double share = tol * (br[i + 1] - br[i]) / (y_hi - y_lo);
        auto q = adaptive_with_error(f, br[i], br[i + 1], share);
        value.add(q.value);
        error.add(q.error);
    }
    return {value.value(), error.value()};
}

J1Result main_term_J1(const Params& params, double X, double eta, const J1Policy& policy) {
    if (!(policy.rel_tol > 0.0)) throw ConfigError("main_term_J1: rel_tol must be positive");
    J1Result r;
    auto meas = j1_measure_side(params, X, eta, policy.rel_tol);
    r.measure = meas.value;
    r.measure_error = meas.error;

    const auto ks = params.exponents();
    const double dX = params.delta * X;
    // |T_i(b)| <= g_i / (pi |b|), g_i the largest amplitude (1/k) u^{1/k - 1}
    double coef = 2.0 * eta * eta / (3.0 * std::pow(std::numbers::pi, 4));
    double freq = std::fabs(params.omega) + eta;
    for (int i = 0; i < 4; ++i) {
        coef *= (1.0 / ks[i]) * std::pow(dX, 1.0 / ks[i] - 1.0) / std::fabs(params.lambda[i]);
        freq += std::fabs(params.lambda[i]) * X;
    }
    const double target = 0.5 * policy.rel_tol * std::fabs(r.measure) + 1e-300;
    const double A = std::cbrt(coef / target);
    r.truncation = A;
    r.fourier_tail = coef / (A * A * A);

    const auto n = static_cast<std::size_t>(std::ceil(2.0 * A * freq));
    const UniformPanels panels{-A, 2.0 * A / static_cast<double>(n), n};
    const auto off = node_offsets(panels.width);
    const DoubleDouble om{-params.omega, 0.0};
    const std::size_t nchunks = (n + kChunkPanels - 1) / kChunkPanels;
    std::vector<double> t_err(nchunks, 0.0);  // propagated T errors, per chunk

    auto eval = [&](std::size_t first, std::size_t count, std::span<Complex> out) {
        double e_acc = 0.0;
        for (std::size_t mm = 0; mm < count; ++mm) {
            const double a0 = panels.panel_start(first + mm);
            for (std::size_t i = 0; i < off.size(); ++i) {
                const double a = a0 + off[i];
                Complex prod(1.0, 0.0);
                double rel = 0.0;
                for (int s = 0; s < 4; ++s) {
                    TValue t = eval_T_contour(ks[s], params.delta, X, params.lambda[s] * a);
                    prod *= t.value;
                    double mag = std::abs(t.value);
                    rel += mag > 0.0 ? t.error / mag : 0.0;
                }
                const double kk = kernel_K(eta, a);
                Complex v = prod * kk * unit_phasor(reduced_phase(om, a));
                out[mm * off.size() + i] = v;
                e_acc += 0.5 * panels.width * GaussKronrod21::kronrod_weights[i] * std::abs(v) * rel;
            }
        }
        t_err[first / kChunkPanels] = e_acc;
    };
    IntegrationTotals t = integrate_chunks(panels, eval, policy.exec);
    CompensatedSum prop;
    for (double e : t_err) prop.add(e);
    r.fourier = t.value.real();
    r.fourier_error = t.gk_error + 100.0 * kEps * t.abs_mass + prop.value();
    r.discrepancy = std::fabs(r.fourier - r.measure);
    r.ratio = r.measure / (eta * eta * std::pow(X, 1.0 / params.k + 1.0));
    return r;
}

}  // namespace dioph
