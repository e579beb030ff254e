#pragma once

// Problem instance for |l1 p1 + l2 p2^2 + l3 p3^2 + l4 p4^k - omega| <= eta
// and the closed-form parameter choices of the circle-method argument.

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dioph {

// (p + sqrt(d)) / q
struct QuadraticSurd {
    std::int64_t d = 2;
    std::int64_t p = 0;
    std::int64_t q = 1;
};

struct RationalRatio {
    std::int64_t p = 0;
    std::int64_t q = 1;
};

// A decimal literal known to relative precision 2^-precision_bits.
struct DecimalRatio {
    std::string digits;
    int precision_bits = 52;
};

using RatioKind = std::variant<QuadraticSurd, RationalRatio, DecimalRatio>;

double ratio_value(const RatioKind& r);
std::string ratio_to_string(const RatioKind& r);
RatioKind parse_ratio(std::string_view text);

struct FixedEta {
    double eta = 1.0;
};

// eta(X) = scale * X^(-theta)
struct PowerEta {
    double theta = 0.0;
    double scale = 1.0;
};

struct EtaPolicy {
    std::variant<FixedEta, PowerEta> mode = FixedEta{};

    double operator()(double X) const;
    std::string to_string() const;
};

struct Params {
    std::array<double, 4> lambda = {1.4142135623730951, 1.0, -1.0, -1.0};
    double omega = 0.0;
    double k = 2.0;
    double delta = 1e-3;
    double epsilon = 1e-2;
    RatioKind ratio = QuadraticSurd{};
    EtaPolicy eta;

    // Exponent attached to each of the four prime variables.
    std::array<double, 4> exponents() const { return {1.0, 2.0, 2.0, k}; }
};

// (14 - 5k) / (28k); requires 1 < k < 14/5.
double eta_exponent(double k);

// Exponent of X in min(X^(2/5 - eps), X^(5/(6k) - eps)).
double major_arc_exponent(double k, double epsilon);
double major_arc_P(double X, double k, double epsilon);

// log^2 X / eta^2
double trivial_arc_R(double X, double eta);

enum class HypothesisStatus { satisfied, violated, unverified };

struct Hypothesis {
    std::string name;
    HypothesisStatus status = HypothesisStatus::satisfied;
    std::string detail;
};

struct ValidationReport {
    std::vector<Hypothesis> items;

    bool all_satisfied() const;
    const Hypothesis* find(std::string_view name) const;
};

// Flags every hypothesis of the theorem independently; never throws.
ValidationReport validate(const Params& p);

std::string_view to_string(HypothesisStatus s);

// Flat `key = value` configuration, `#` comments, UTF-8.
using KeyValues = std::map<std::string, std::string, std::less<>>;

KeyValues parse_key_values(std::string_view text);
std::string serialize_key_values(const KeyValues& kv);

// Recognised keys: lambda, omega, k, delta, epsilon, ratio, eta. Unknown keys
// are ignored so one file can also carry command options.
Params params_from_key_values(const KeyValues& kv);
KeyValues params_to_key_values(const Params& p);

std::string serialize_params(const Params& p);
std::string params_digest(const Params& p);

double parse_real(std::string_view text, std::string_view key);
std::vector<double> parse_real_list(std::string_view text, std::string_view key);

}  // namespace dioph
