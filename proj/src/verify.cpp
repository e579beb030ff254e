#include "dioph/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>

#include "dioph/errors.hpp"
#include "dioph/expsums.hpp"
#include "dioph/format.hpp"
#include "json.hpp"

namespace dioph {

BaseRange robert_sargos_bases(double X, double k) {
    if (!(X >= 1.0) || !(k >= 1.0)) throw ConfigError("robert_sargos: need X >= 1 and k >= 1");
    const Quad Xq = X;
    auto n = static_cast<std::uint64_t>(std::floor(std::pow(X, 1.0 / k)));
    while (n > 1 && power_q(n - 1, k) >= Xq) --n;
    while (power_q(n, k) < Xq) ++n;
    BaseRange r;
    r.lo = n;
    // n <= 2 X^{1/k}  <=>  (n/2)^k <= X
    auto in_top = [&](std::uint64_t m) { return powq(static_cast<Quad>(m) / 2, static_cast<Quad>(k)) <= Xq; };
    std::uint64_t m = static_cast<std::uint64_t>(std::floor(2.0 * std::pow(X, 1.0 / k)));
    while (m > 0 && !in_top(m)) --m;
    while (in_top(m + 1)) ++m;
    r.hi = m;
    return r;
}

std::uint64_t robert_sargos_count(double X, double k, double gamma, double max_base) {
    if (!(gamma > 0.0)) throw ConfigError("robert_sargos_count: gamma must be positive");
    if (std::pow(X, 1.0 / k) > max_base)
        throw ResourceError("robert_sargos_count: X^{1/k} above the size cap " + format_real(max_base));
    auto [lo, hi] = robert_sargos_bases(X, k);
    if (hi < lo) return 0;
    std::vector<Quad> powk;
    for (std::uint64_t n = lo; n <= hi; ++n) powk.push_back(power_q(n, k));
    std::vector<Quad> sums;
    sums.reserve(powk.size() * powk.size());
    for (Quad a : powk)
        for (Quad b : powk) sums.push_back(a + b);
    std::sort(sums.begin(), sums.end());
    const Quad g = gamma;
    std::uint64_t count = 0;
    std::size_t left = 0, right = 0;
    for (std::size_t i = 0; i < sums.size(); ++i) {
        while (sums[left] <= sums[i] - g) ++left;
        while (right < sums.size() && sums[right] < sums[i] + g) ++right;
        count += right - left;
    }
    return count;
}

double robert_sargos_shape(double X, double k, double gamma, double epsilon) {
    return (gamma * std::pow(X, 4.0 / k - 1.0) + std::pow(X, 2.0 / k)) * std::pow(X, epsilon);
}

QuadEstimate selberg_integral(const PrimeTable& table, double k, double X, double h) {
    if (!(X > 0.0) || !(h > 0.0) || !(k >= 1.0)) throw ConfigError("selberg_integral: need X > 0, h > 0, k >= 1");
    const double top = 2.0 * X + h;
    const double base_top = std::pow(top, 1.0 / k);
    if (std::floor(base_top) > static_cast<double>(table.limit()))
        throw TableTooSmall("selberg_integral: prime table limit " + std::to_string(table.limit()) + " below " +
                            format_real(std::floor(base_top)));

    // prime powers in (X - 1, top], as doubles with their log weights
    std::vector<double> pw, lg;
    for (auto p : table.primes()) {
        double v = static_cast<double>(power_q(p, k));
        if (v > top) break;
        if (v <= X - 1.0) continue;
        pw.push_back(v);
        lg.push_back(std::log(static_cast<double>(p)));
    }
    std::vector<double> br;
    for (double v : pw) {
        br.push_back(v);
        br.push_back(v - h);
    }
    br = clip_breaks(std::move(br), X, 2.0 * X);

    const double inv_k = 1.0 / k;
    auto smooth = [&](double x) {
        return k == 1.0 ? h : std::pow(x, inv_k) * std::expm1(std::log1p(h / x) * inv_k);
    };
    CompensatedSum value, error;
    for (std::size_t i = 0; i + 1 < br.size(); ++i) {
        const double a = br[i], b = br[i + 1];
        const double mid = 0.5 * (a + b);
        // theta((x+h)^{1/k}) - theta(x^{1/k}) = sum of log p over x < p^k <= x + h
        auto first = std::upper_bound(pw.begin(), pw.end(), mid);
        auto last = std::upper_bound(pw.begin(), pw.end(), mid + h);
        double c = 0.0;
        for (auto it = first; it != last; ++it) c += lg[static_cast<std::size_t>(it - pw.begin())];
        auto q = gk21_panel(
            [&](double x) {
                double d = c - smooth(x);
                return d * d;
            },
            a, b);
        value.add(q.value);
        error.add(q.error);
    }
    return {value.value(), error.value()};
}

MeanSquareTerms su_mean_square_terms(const PrimeTable& table, double k, double delta, double X, double Y) {
    if (!(Y > 0.0 && Y < 0.5)) throw ConfigError("su_mean_square_terms: Y must lie in (0, 1/2)");
    PowerSum sum(table, k, delta, X);
    PhaseSum diff = sum.phase_sum(1.0, Weighting::log_p);
    for (auto& w : diff.weights) w -= 1.0;
    const std::vector<PhaseSum> sums = {diff};
    const double F = std::max(1.0, diff.max_abs_freq());
    const auto n = static_cast<std::size_t>(std::ceil(2.0 * Y * F));
    auto t = integrate_phase_product(std::span<const PhaseSum>(sums),
                                     UniformPanels{-Y, 2.0 * Y / static_cast<double>(n), n},
                                     [](std::span<const Complex> v, double) { return Complex(std::norm(v[0])); },
                                     Exec::parallel);
    MeanSquareTerms r;
    r.lhs = t.value.real();
    r.lhs_error = t.gk_error + 100.0 * kEps * t.abs_mass;
    const double L = std::log(X);
    r.term_log = std::pow(X, 2.0 / k - 2.0) * L * L / Y;
    r.term_y2x = Y * Y * X;
    r.term_selberg = Y * Y * selberg_integral(table, k, X, 1.0 / (2.0 * Y)).value;
    return r;
}

std::string to_string(MeanValue which) {
    switch (which) {
        case MeanValue::s1_square: return "s1_square";
        case MeanValue::s2_fourth: return "s2_fourth";
        case MeanValue::sk_fourth: return "sk_fourth";
    }
    return "?";
}

MeanValue parse_mean_value(const std::string& text) {
    if (text == "s1_square") return MeanValue::s1_square;
    if (text == "s2_fourth") return MeanValue::s2_fourth;
    if (text == "sk_fourth") return MeanValue::sk_fourth;
    throw ConfigError("unknown mean value '" + text + "' (expected s1_square, s2_fourth or sk_fourth)");
}

MeanValueResult mean_value_integral(const Params& params, const PrimeTable& table, double X, MeanValue which,
                                    Exec exec) {
    const double eta = params.eta(X);
    const ArcDecomposition arcs = default_decomposition(params, X, eta);
    double k = 1.0, lam = 1.0;
    int power = 2;
    MeanValueResult r;
    const double L = std::log(X);
    switch (which) {
        case MeanValue::s1_square:
            r.shape = eta * X * L;
            break;
        case MeanValue::s2_fourth:
            k = 2.0;
            power = 4;
            r.shape = eta * X * L * L;
            break;
        case MeanValue::sk_fourth:
            k = params.k;
            lam = params.lambda[3];
            power = 4;
            r.shape = eta * std::pow(X, params.epsilon) * std::max(std::pow(X, 2.0 / k), std::pow(X, 4.0 / k - 1.0));
            break;
    }
    const double al = std::fabs(lam);
    if (al == 0.0) throw ConfigError("mean_value_integral: lambda must be nonzero");

    PowerSum ps(table, k, params.delta, X);
    const std::vector<PhaseSum> sums = {ps.phase_sum(1.0, Weighting::log_p)};
    const std::span<const PhaseSum> sp(sums);
    // |S|^m carries frequencies up to (m/2) max p^k
    const double F = std::max(1.0, 0.5 * power * sums[0].max_abs_freq());
    auto mag = [power](Complex v) {
        double s = std::norm(v);
        return power == 2 ? s : s * s;
    };

    // substitute b = |lambda| a; both halves of the arc contribute equally
    const double b0 = al * arcs.major_edge(), b1 = al * arcs.R;
    CompensatedSum value, error;
    auto direct = [&](double lo, double hi) {
        if (!(hi > lo)) return;
        auto n = static_cast<std::size_t>(std::ceil((hi - lo) * F));
        auto t = integrate_phase_product(
            sp, UniformPanels{lo, (hi - lo) / static_cast<double>(n), n},
            [&](std::span<const Complex> v, double b) { return Complex(mag(v[0]) * kernel_K(eta, b / al)); }, exec);
        value.add(t.value.real());
        error.add(t.gk_error + 100.0 * kEps * t.abs_mass);
    };

    if (is_integer_exponent(k)) {
        const double n0 = std::ceil(b0), n1 = std::floor(b1);
        if (n1 > n0) {
            r.periodic = true;
            direct(b0, n0);
            direct(n1, b1);
            // sum over whole periods [n, n+1) folded onto [0, 1)
            const auto periods = static_cast<std::int64_t>(n1 - n0);
            auto n = static_cast<std::size_t>(std::ceil(F));
            auto t = integrate_phase_product(
                sp, UniformPanels{0.0, 1.0 / static_cast<double>(n), n},
                [&](std::span<const Complex> v, double b) {
                    double w = 0.0;
                    for (std::int64_t j = 0; j < periods; ++j) w += kernel_K(eta, (n0 + j + b) / al);
                    return Complex(mag(v[0]) * w);
                },
                exec);
            value.add(t.value.real());
            error.add(t.gk_error + 100.0 * kEps * t.abs_mass);
        } else {
            direct(b0, b1);
        }
    } else {
        direct(b0, b1);
    }
    r.value = 2.0 / al * value.value();
    r.error = 2.0 / al * error.value();
    return r;
}

Thresholds minor_arc_thresholds(double X, double epsilon) {
    if (!(X >= 2.0)) throw ConfigError("minor_arc_thresholds: X must be >= 2");
    return {std::pow(X, 6.0 / 7.0 + epsilon), std::pow(X, 3.0 / 7.0 + epsilon)};
}

double threshold_exceedance(const Params& params, const PrimeTable& table, double X, std::size_t samples,
                            std::uint64_t seed) {
    if (samples == 0) throw ConfigError("threshold_exceedance: samples must be positive");
    const double eta = params.eta(X);
    const ArcDecomposition arcs = default_decomposition(params, X, eta);
    const Thresholds z = minor_arc_thresholds(X, params.epsilon);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> mag(arcs.major_edge(), arcs.R);
    std::bernoulli_distribution sign(0.5);
    std::vector<double> alphas(samples);
    for (auto& a : alphas) {
        double m = mag(rng);
        a = sign(rng) ? m : -m;
    }
    PhaseSum s1 = PowerSum(table, 1.0, params.delta, X).phase_sum(params.lambda[0], Weighting::log_p);
    PhaseSum s2 = PowerSum(table, 2.0, params.delta, X).phase_sum(params.lambda[1], Weighting::log_p);
    std::int64_t hits = 0;
    const auto n = static_cast<std::int64_t>(samples);
#pragma omp parallel for schedule(dynamic, 16) reduction(+ : hits)
    for (std::int64_t i = 0; i < n; ++i)
        if (std::abs(s1.eval(alphas[i])) > z.z1 && std::abs(s2.eval(alphas[i])) > z.z2) ++hits;
    return static_cast<double>(hits) / static_cast<double>(samples);
}

void finish_check(BoundCheck& c) {
    if (c.constants.empty()) {
        c.stable = false;
        return;
    }
    auto [mn, mx] = std::minmax_element(c.constants.begin(), c.constants.end());
    c.implied_constant = *mx;
    c.stable = *mn > 0.0 && std::isfinite(*mx) && *mx / *mn <= c.band;
}

std::string checks_json(std::span<const BoundCheck> checks, const std::string& params_digest) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& c : checks) {
        nlohmann::ordered_json j;
        j["name"] = c.name;
        j["rhs_formula"] = c.rhs_formula;
        j["scales_tested"] = c.scales_tested;
        j["lhs"] = c.lhs;
        j["constants"] = c.constants;
        j["implied_constant"] = c.implied_constant;
        j["band"] = c.band;
        j["verdict"] = c.verdict();
        j["inputs"] = c.inputs;
        arr.push_back(j);
    }
    nlohmann::ordered_json out;
    out["checks"] = arr;
    out["params_digest"] = params_digest;
    out["version"] = std::string(kVersion);
    return out.dump(2) + "\n";
}

std::string checks_table(std::span<const BoundCheck> checks) {
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-20s %-10s %-14s %s\n", "check", "verdict", "max/min", "constants");
    out += line;
    for (const auto& c : checks) {
        double spread = 0.0;
        if (!c.constants.empty()) {
            auto [mn, mx] = std::minmax_element(c.constants.begin(), c.constants.end());
            spread = *mx / *mn;
        }
        std::string cs;
        for (double v : c.constants) cs += (cs.empty() ? "" : " ") + format_real(v);
        std::snprintf(line, sizeof line, "%-20s %-10s %-14.6g ", c.name.c_str(), c.verdict().c_str(), spread);
        out += line + cs + "\n";
    }
    return out;
}

std::vector<double> symmetric_log_grid(std::size_t n_per_side, double lo, double hi) {
    if (n_per_side < 2 || !(lo > 0.0) || !(hi > lo)) throw ConfigError("symmetric_log_grid: bad arguments");
    std::vector<double> pos(n_per_side);
    const double l0 = std::log10(lo), l1 = std::log10(hi);
    for (std::size_t i = 0; i < n_per_side; ++i)
        pos[i] = std::pow(10.0, l0 + (l1 - l0) * static_cast<double>(i) / static_cast<double>(n_per_side - 1));
    std::vector<double> out;
    for (auto it = pos.rbegin(); it != pos.rend(); ++it) out.push_back(-*it);
    out.push_back(0.0);
    out.insert(out.end(), pos.begin(), pos.end());
    return out;
}

std::vector<BoundCheck> stability_suite(const Params& params, const PrimeTable& table, const StabilityOptions& opts) {
    if (opts.scales.size() < 2) throw ConfigError("stability_suite: need at least two scales");
    const double k = params.k;
    const auto grid = symmetric_log_grid(std::max<std::size_t>(2, opts.alpha_points / 2));

    auto make = [&](std::string name, std::string formula) {
        BoundCheck c;
        c.name = std::move(name);
        c.rhs_formula = std::move(formula);
        c.scales_tested = opts.scales;
        c.band = opts.band;
        c.inputs["k"] = format_real(k);
        c.inputs["delta"] = format_real(params.delta);
        c.inputs["epsilon"] = format_real(params.epsilon);
        c.inputs["eta"] = params.eta.to_string();
        return c;
    };

    BoundCheck gap = make("t_minus_u_gap", "|T_k - U_k| <= C (1 + |alpha| X)");
    BoundCheck sup = make("sk_sup_ratio", "|S_k(alpha)| <= C X^{1/k}");
    BoundCheck m1 = make("s1_mean_square", "int_m |S_1|^2 K_eta <= C eta X log X");
    BoundCheck m2 = make("s2_fourth_moment", "int_m |S_2|^4 K_eta <= C eta X log^2 X");
    BoundCheck mk = make("sk_fourth_moment", "int_m |S_k(l4 a)|^4 K_eta <= C eta X^eps max(X^{2/k}, X^{4/k-1})");
    BoundCheck sel = make("selberg_integral", "J_k(X, h) <= C h^2 X^{2/k-1}");
    for (auto* c : {&gap, &sup}) c->inputs["alpha_grid"] = "0, +-log10 grid [1e-6, 1], " + std::to_string(grid.size()) + " points";
    sel.inputs["h"] = "X^{1 - 5/(6k) + " + format_real(opts.h_offset) + "}";

    for (double X : opts.scales) {
        auto g = tu_gap_check(table, k, params.delta, X, grid);
        gap.lhs.push_back(g.constant * (1.0 + std::fabs(g.argmax) * X));
        gap.constants.push_back(g.constant);

        auto s = evaluate_grid(SumKind::S, table, k, params.delta, X, grid);
        double smax = 0.0;
        for (auto v : s.values) smax = std::max(smax, std::abs(v));
        sup.lhs.push_back(smax);
        sup.constants.push_back(smax / std::pow(X, 1.0 / k));

        for (auto [c, which] : {std::pair{&m1, MeanValue::s1_square}, std::pair{&m2, MeanValue::s2_fourth},
                                std::pair{&mk, MeanValue::sk_fourth}}) {
            auto mv = mean_value_integral(params, table, X, which);
            c->lhs.push_back(mv.value);
            c->constants.push_back(mv.value / mv.shape);
        }

        const double h = std::pow(X, 1.0 - 5.0 / (6.0 * k) + opts.h_offset);
        auto J = selberg_integral(table, k, X, h);
        sel.lhs.push_back(J.value);
        sel.constants.push_back(J.value / (h * h * std::pow(X, 2.0 / k - 1.0)));
    }
    std::vector<BoundCheck> out = {gap, sup, m1, m2, mk, sel};
    for (auto& c : out) finish_check(c);
    return out;
}

}  // namespace dioph
