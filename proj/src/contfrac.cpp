#include "dioph/contfrac.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <utility>

#include <boost/multiprecision/cpp_bin_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

#include "dioph/errors.hpp"
#include "dioph/format.hpp"

namespace dioph {

namespace {

using BigInt = boost::multiprecision::cpp_int;
using BigFloat = boost::multiprecision::cpp_bin_float_100;

BigInt floor_div(const BigInt& a, const BigInt& b) {
    BigInt q = a / b;
    BigInt r = a % b;
    if (r != 0 && ((r < 0) != (b < 0))) --q;
    return q;
}

bool fits_int64(const BigInt& v) {
    return v >= std::numeric_limits<std::int64_t>::min() && v <= std::numeric_limits<std::int64_t>::max();
}

// Returns false (and flags overflow) if the quotient does not fit.
bool push_quotient(ContinuedFraction& cf, const BigInt& a) {
    if (!fits_int64(a)) {
        cf.overflow = true;
        return false;
    }
    cf.quotients.push_back(static_cast<std::int64_t>(a));
    return true;
}

void expand_rational(ContinuedFraction& cf, BigInt num, BigInt den, std::size_t n_terms) {
    if (den < 0) {
        num = -num;
        den = -den;
    }
    while (cf.quotients.size() < n_terms) {
        BigInt a = floor_div(num, den);
        if (!push_quotient(cf, a)) return;
        BigInt rem = num - a * den;
        if (rem == 0) {
            cf.terminated = true;
            return;
        }
        num = den;
        den = rem;
    }
}

void expand_surd(ContinuedFraction& cf, const QuadraticSurd& s, std::size_t n_terms) {
    BigInt P = s.p, Q = s.q, D = s.d;
    BigInt root = boost::multiprecision::sqrt(D);
    if (root * root == D) {
        expand_rational(cf, P + root, Q, n_terms);
        return;
    }
    if ((D - P * P) % Q != 0) {
        BigInt absQ = Q < 0 ? BigInt(-Q) : Q;
        P *= absQ;
        D *= Q * Q;
        Q *= absQ;
        root = boost::multiprecision::sqrt(D);
    }
    std::map<std::pair<BigInt, BigInt>, std::size_t> seen;
    while (cf.quotients.size() < n_terms) {
        if (!cf.period_start) {
            auto [it, inserted] = seen.emplace(std::make_pair(P, Q), cf.quotients.size());
            if (!inserted) {
                cf.period_start = it->second;
                cf.period_length = cf.quotients.size() - it->second;
            }
        }
        BigInt a = Q > 0 ? floor_div(P + root, Q) : floor_div(P + root + 1, Q);
        if (!push_quotient(cf, a)) return;
        P = a * Q - P;
        Q = (D - P * P) / Q;
    }
}

struct ExactDecimal {
    BigInt num;
    BigInt den;
};

ExactDecimal parse_exact_decimal(const std::string& text) {
    std::size_t i = 0;
    bool neg = false;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) neg = text[i++] == '-';
    BigInt mant = 0;
    long frac_digits = 0;
    bool any = false, in_frac = false;
    for (; i < text.size(); ++i) {
        char c = text[i];
        if (c == '.' && !in_frac) {
            in_frac = true;
        } else if (c >= '0' && c <= '9') {
            mant = mant * 10 + (c - '0');
            if (in_frac) ++frac_digits;
            any = true;
        } else {
            break;
        }
    }
    long exp10 = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) exp10 = std::stol(text.substr(i + 1));
    else if (i != text.size()) throw ConfigError("invalid decimal ratio '" + text + "'");
    if (!any) throw ConfigError("invalid decimal ratio '" + text + "'");
    long scale = exp10 - frac_digits;
    BigInt num = neg ? BigInt(-mant) : mant;
    BigInt den = 1;
    BigInt ten = 10;
    if (scale >= 0) num *= boost::multiprecision::pow(ten, static_cast<unsigned>(scale));
    else den = boost::multiprecision::pow(ten, static_cast<unsigned>(-scale));
    return {num, den};
}

void expand_decimal(ContinuedFraction& cf, const DecimalRatio& d, std::size_t n_terms) {
    cf.exact = false;
    auto x = parse_exact_decimal(d.digits);
    BigInt absnum = x.num < 0 ? BigInt(-x.num) : x.num;
    BigInt scale = BigInt(1) << d.precision_bits;
    // lo = x - |x| 2^-b, hi = x + |x| 2^-b over the common denominator den * 2^b.
    BigInt den = x.den * scale;
    BigInt ln = x.num * scale - absnum, hn = x.num * scale + absnum;
    BigInt ld = den, hd = den;
    while (cf.quotients.size() < n_terms) {
        BigInt al = floor_div(ln, ld), ah = floor_div(hn, hd);
        if (al != ah) {
            cf.precision_exhausted = true;
            return;
        }
        if (!push_quotient(cf, al)) return;
        BigInt rl = ln - al * ld, rh = hn - ah * hd;
        if (rl == 0 || rh == 0) {
            cf.precision_exhausted = true;
            return;
        }
        // Reciprocal of the fractional parts swaps the interval ends.
        BigInt nln = hd, nld = rh, nhn = ld, nhd = rl;
        ln = nln;
        ld = nld;
        hn = nhn;
        hd = nhd;
    }
}

}  // namespace

ContinuedFraction expand(const RatioKind& x, std::size_t n_terms) {
    if (n_terms == 0) throw ConfigError("expand: n_terms must be >= 1");
    ContinuedFraction cf;
    cf.value = x;
    if (const auto* s = std::get_if<QuadraticSurd>(&x)) expand_surd(cf, *s, n_terms);
    else if (const auto* r = std::get_if<RationalRatio>(&x)) expand_rational(cf, r->p, r->q, n_terms);
    else expand_decimal(cf, std::get<DecimalRatio>(x), n_terms);
    return cf;
}

std::vector<Convergent> convergents(const ContinuedFraction& cf, std::size_t n) {
    std::vector<Convergent> out;
    __int128 h2 = 0, h1 = 1, k2 = 1, k1 = 0;
    const __int128 lim = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < std::min(n, cf.quotients.size()); ++i) {
        __int128 a = cf.quotients[i];
        __int128 h = a * h1 + h2;
        __int128 k = a * k1 + k2;
        if (h > lim || h < -lim || k > lim) break;
        out.push_back({static_cast<std::int64_t>(h), static_cast<std::int64_t>(k), i});
        h2 = h1;
        h1 = h;
        k2 = k1;
        k1 = k;
    }
    return out;
}

BestApproxResult best_approx_check(const RatioKind& x, const Convergent& conv, std::int64_t next_q) {
    if (next_q <= 0) throw ConfigError("best_approx_check: next_q must be positive");
    BestApproxResult res;
    if (const auto* r = std::get_if<RationalRatio>(&x)) {
        // q p/Q - a = (q p - a Q) / Q
        BigInt numer = BigInt(conv.q) * r->p - BigInt(conv.a) * r->q;
        BigInt absn = numer < 0 ? BigInt(-numer) : numer;
        BigInt absq = r->q < 0 ? BigInt(-r->q) : BigInt(r->q);
        res.holds = absn * next_q < absq;
        res.residual = static_cast<double>(static_cast<long double>(numer.convert_to<long double>()) /
                                           static_cast<long double>(r->q));
        return res;
    }
    if (const auto* s = std::get_if<QuadraticSurd>(&x)) {
        BigFloat v = (BigFloat(s->p) + boost::multiprecision::sqrt(BigFloat(s->d))) / BigFloat(s->q);
        BigFloat resid = BigFloat(conv.q) * v - BigFloat(conv.a);
        res.residual = static_cast<double>(resid);
        res.holds = boost::multiprecision::abs(resid) * BigFloat(next_q) < 1;
        return res;
    }
    const auto& d = std::get<DecimalRatio>(x);
    auto ex = parse_exact_decimal(d.digits);
    BigFloat v = BigFloat(ex.num) / BigFloat(ex.den);
    BigFloat u = boost::multiprecision::abs(v) * boost::multiprecision::pow(BigFloat(2), -d.precision_bits);
    BigFloat resid = BigFloat(conv.q) * v - BigFloat(conv.a);
    BigFloat thr = BigFloat(1) / BigFloat(next_q);
    BigFloat mag = boost::multiprecision::abs(resid);
    BigFloat slack = u * BigFloat(conv.q);
    res.residual = static_cast<double>(resid);
    res.holds = mag < thr;
    res.certified = (mag + slack < thr) || (mag - slack >= thr);
    return res;
}

std::vector<double> x_sequence(std::span<const Convergent> convs) {
    std::vector<double> out;
    for (const auto& c : convs) {
        if (c.q < 1) throw ConfigError("x_sequence: denominators must be >= 1");
        BigFloat X = boost::multiprecision::exp(boost::multiprecision::log(BigFloat(c.q)) * 7 / 3);
        if (X > BigFloat(1e300)) break;
        out.push_back(static_cast<double>(X));
    }
    return out;
}

std::string convergents_csv(std::span<const Convergent> convs) {
    std::string out = csv_row({"index", "a", "q", "X"});
    auto xs = x_sequence(convs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const auto& c = convs[i];
        out += csv_row({std::to_string(c.index), std::to_string(c.a), std::to_string(c.q), format_real(xs[i])});
    }
    return out;
}

}  // namespace dioph
