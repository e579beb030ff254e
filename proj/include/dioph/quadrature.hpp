#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <vector>

#include "dioph/precise.hpp"

namespace dioph {

// 21-point Gauss-Kronrod rule with its embedded 10-point Gauss rule, on
// [-1, 1]. Values from QUADPACK (qk21).
struct GaussKronrod21 {
    static constexpr std::size_t kNodes = 21;

    // Nodes in increasing order; odd indices carry the Gauss weights.
    static constexpr std::array<double, kNodes> nodes = {
        -0.995657163025808080735527280689003, -0.973906528517171720077964012084452,
        -0.930157491355708226001207180059508, -0.865063366688984510732096688423493,
        -0.780817726586416897063717578345042, -0.679409568299024406234327365114874,
        -0.562757134668604683339000099272694, -0.433395394129247190799265943165784,
        -0.294392862701460198131126603103866, -0.148874338981631210884826001129720,
        0.0,
        0.148874338981631210884826001129720,  0.294392862701460198131126603103866,
        0.433395394129247190799265943165784,  0.562757134668604683339000099272694,
        0.679409568299024406234327365114874,  0.780817726586416897063717578345042,
        0.865063366688984510732096688423493,  0.930157491355708226001207180059508,
        0.973906528517171720077964012084452,  0.995657163025808080735527280689003};

    static constexpr std::array<double, kNodes> kronrod_weights = {
        0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
        0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
        0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
        0.123491976262065851077208980481201, 0.134709217311473325928054001771707,
        0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
        0.149445554002916905664936468389821,
        0.147739104901338491374841515972068, 0.142775938577060080797094273138717,
        0.134709217311473325928054001771707, 0.123491976262065851077208980481201,
        0.109387158802297641899210590325805, 0.093125454583697605535065465083366,
        0.075039674810919952767043140916190, 0.054755896574351996031381300244580,
        0.032558162307964727478818972459390, 0.011694638867371874278064396062192};

    // Zero at Kronrod-only nodes.
    static constexpr std::array<double, kNodes> gauss_weights = {
        0.0, 0.066671344308688137593568809893332,
        0.0, 0.149451349150580593145776339657697,
        0.0, 0.219086362515982043995534934228163,
        0.0, 0.269266719309996355091226921569469,
        0.0, 0.295524224714752870173892994651338,
        0.0,
        0.295524224714752870173892994651338, 0.0,
        0.269266719309996355091226921569469, 0.0,
        0.219086362515982043995534934228163, 0.0,
        0.149451349150580593145776339657697, 0.0,
        0.066671344308688137593568809893332, 0.0};
};

// Gauss-Legendre nodes and weights on [-1, 1] by Newton iteration on P_n.
struct GaussLegendre {
    std::vector<double> nodes;
    std::vector<double> weights;

    explicit GaussLegendre(std::size_t n) : nodes(n), weights(n) {
        for (std::size_t i = 0; i < n; ++i) {
            double x = std::cos(std::numbers::pi * (static_cast<double>(i) + 0.75) /
                                (static_cast<double>(n) + 0.5));
            double dp = 0.0;
            for (int it = 0; it < 100; ++it) {
                double p0 = 1.0, p1 = x;
                for (std::size_t j = 2; j <= n; ++j) {
                    double pj = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / static_cast<double>(j);
                    p0 = p1;
                    p1 = pj;
                }
                if (n == 1) p0 = 1.0;
                dp = static_cast<double>(n) * (x * p1 - p0) / (x * x - 1.0);
                double dx = p1 / dp;
                x -= dx;
                if (std::fabs(dx) < 1e-17) break;
            }
            nodes[n - 1 - i] = x;
            weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        if (n % 2 == 1) nodes[n / 2] = 0.0;
    }
};

struct QuadEstimate {
    double value = 0.0;
    double error = 0.0;
};

// Integrates f over [a, b], splitting at the supplied breakpoints (those
// outside (a, b) are ignored) and using `panels` equal Gauss-Legendre panels
// per piece. The error is estimated against a run with half as many panels.
template <class F>
QuadEstimate integrate_piecewise(F&& f, double a, double b, std::vector<double> breaks,
                                 const GaussLegendre& rule, std::size_t panels) {
    if (!(b > a)) return {};
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double x) { return !(x > a && x < b) || !std::isfinite(x); }),
                 breaks.end());
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    auto composite = [&](std::size_t m) {
        CompensatedSum total;
        for (std::size_t s = 0; s + 1 < breaks.size(); ++s) {
            double lo = breaks[s], hi = breaks[s + 1];
            double h = (hi - lo) / static_cast<double>(m);
            for (std::size_t j = 0; j < m; ++j) {
                double pa = lo + h * static_cast<double>(j);
                double pb = (j + 1 == m) ? hi : lo + h * static_cast<double>(j + 1);
                double half = 0.5 * (pb - pa), mid = 0.5 * (pa + pb);
                for (std::size_t i = 0; i < rule.nodes.size(); ++i)
                    total.add(half * rule.weights[i] * f(mid + half * rule.nodes[i]));
            }
        }
        return total.value();
    };
    std::size_t coarse = std::max<std::size_t>(1, panels / 2);
    double fine = composite(panels);
    double rough = composite(coarse);
    return {fine, std::fabs(fine - rough)};
}

// Single 21-point Gauss-Kronrod panel of a real function; error = |K - G|.
template <class F>
QuadEstimate gk21_panel(F&& f, double a, double b) {
    using GK = GaussKronrod21;
    const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
    double k = 0.0, g = 0.0;
    for (std::size_t i = 0; i < GK::kNodes; ++i) {
        double v = f(mid + half * GK::nodes[i]);
        k += GK::kronrod_weights[i] * v;
        g += GK::gauss_weights[i] * v;
    }
    return {half * k, std::fabs(half * (k - g))};
}

// Recursive bisection until each panel's |K - G| is below its share of tol
// (proportional to width). Deterministic: the recursion order is fixed.
template <class F>
QuadEstimate adaptive_gk21(F&& f, double a, double b, double tol, int max_depth = 40) {
    if (!(b > a)) return {};
    const double total_width = b - a;
    CompensatedSum value, error;
    auto rec = [&](auto&& self, double lo, double hi, QuadEstimate est, int depth) -> void {
        double share = tol * (hi - lo) / total_width;
        if (est.error <= share || depth >= max_depth || !(hi - lo > 4.0 * kEps * std::fabs(lo))) {
            value.add(est.value);
            error.add(est.error);
            return;
        }
        double mid = 0.5 * (lo + hi);
        QuadEstimate left = gk21_panel(f, lo, mid), right = gk21_panel(f, mid, hi);
        self(self, lo, mid, left, depth + 1);
        self(self, mid, hi, right, depth + 1);
    };
    rec(rec, a, b, gk21_panel(f, a, b), 0);
    return {value.value(), error.value()};
}

// Sorted, deduplicated breakpoints inside (a, b), with a and b at the ends.
inline std::vector<double> clip_breaks(std::vector<double> breaks, double a, double b) {
    breaks.erase(std::remove_if(breaks.begin(), breaks.end(),
                                [&](double x) { return !(x > a && x < b) || !std::isfinite(x); }),
                 breaks.end());
    breaks.push_back(a);
    breaks.push_back(b);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
    return breaks;
}

}  // namespace dioph
