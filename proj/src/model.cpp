#include "dioph/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "dioph/errors.hpp"
#include "dioph/format.hpp"

namespace dioph {

namespace {

std::string_view trim(std::string_view s) {
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\n'; };
    while (!s.empty() && is_space(s.front())) s.remove_prefix(1);
    while (!s.empty() && is_space(s.back())) s.remove_suffix(1);
    return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = s.find(sep, start);
        out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return out;
}

std::int64_t parse_int(std::string_view text, std::string_view key) {
    text = trim(text);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw ConfigError("invalid integer for '" + std::string(key) + "': '" + std::string(text) + "'");
    return v;
}

bool is_perfect_square(std::int64_t d) {
    if (d < 0) return false;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<long double>(d)));
    while (r * r > d) --r;
    while ((r + 1) * (r + 1) <= d) ++r;
    return r * r == d;
}

}  // namespace

double parse_real(std::string_view text, std::string_view key) {
    text = trim(text);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || ptr != text.data() + text.size() || text.empty())
        throw ConfigError("invalid number for '" + std::string(key) + "': '" + std::string(text) + "'");
    return v;
}

std::vector<double> parse_real_list(std::string_view text, std::string_view key) {
    std::vector<double> out;
    for (auto part : split(text, ',')) out.push_back(parse_real(part, key));
    return out;
}

double ratio_value(const RatioKind& r) {
    return std::visit(
        [](const auto& v) -> double {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, QuadraticSurd>) {
                long double s = std::sqrt(static_cast<long double>(v.d));
                return static_cast<double>((static_cast<long double>(v.p) + s) / static_cast<long double>(v.q));
            } else if constexpr (std::is_same_v<T, RationalRatio>) {
                return static_cast<double>(static_cast<long double>(v.p) / static_cast<long double>(v.q));
            } else {
                return parse_real(v.digits, "ratio");
            }
        },
        r);
}

std::string ratio_to_string(const RatioKind& r) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, QuadraticSurd>) {
                return "surd:" + std::to_string(v.d) + "," + std::to_string(v.p) + "," + std::to_string(v.q);
            } else if constexpr (std::is_same_v<T, RationalRatio>) {
                return "rational:" + std::to_string(v.p) + "," + std::to_string(v.q);
            } else {
                return "decimal:" + v.digits + "," + std::to_string(v.precision_bits);
            }
        },
        r);
}

RatioKind parse_ratio(std::string_view text) {
    text = trim(text);
    if (text == "sqrt2") return QuadraticSurd{2, 0, 1};
    if (text == "sqrt3") return QuadraticSurd{3, 0, 1};
    if (text == "golden") return QuadraticSurd{5, 1, 2};
    auto colon = text.find(':');
    std::string_view head = colon == std::string_view::npos ? std::string_view{} : text.substr(0, colon);
    std::string_view body = colon == std::string_view::npos ? text : text.substr(colon + 1);
    if (head == "surd") {
        auto parts = split(body, ',');
        if (parts.size() != 3) throw ConfigError("ratio surd expects d,p,q");
        QuadraticSurd s{parse_int(parts[0], "ratio"), parse_int(parts[1], "ratio"), parse_int(parts[2], "ratio")};
        if (s.q == 0 || s.d < 0) throw ConfigError("ratio surd needs q != 0 and d >= 0");
        return s;
    }
    if (head == "rational" || (head.empty() && body.find('/') != std::string_view::npos)) {
        auto parts = head.empty() ? split(body, '/') : split(body, ',');
        if (parts.size() != 2) throw ConfigError("ratio rational expects p,q");
        RationalRatio r{parse_int(parts[0], "ratio"), parse_int(parts[1], "ratio")};
        if (r.q == 0) throw ConfigError("ratio rational needs q != 0");
        return r;
    }
    if (head == "decimal" || head.empty()) {
        auto parts = split(body, ',');
        DecimalRatio d{std::string(parts[0]), 52};
        if (parts.size() == 2) d.precision_bits = static_cast<int>(parse_int(parts[1], "ratio"));
        else if (parts.size() > 2) throw ConfigError("ratio decimal expects digits[,bits]");
        parse_real(d.digits, "ratio");
        if (d.precision_bits <= 0 || d.precision_bits > 4000) throw ConfigError("ratio precision bits out of range");
        return d;
    }
    throw ConfigError("unknown ratio kind '" + std::string(head) + "'");
}

double EtaPolicy::operator()(double X) const {
    if (const auto* f = std::get_if<FixedEta>(&mode)) return f->eta;
    const auto& p = std::get<PowerEta>(mode);
    return p.scale * std::pow(X, -p.theta);
}

std::string EtaPolicy::to_string() const {
    if (const auto* f = std::get_if<FixedEta>(&mode)) return "fixed:" + format_real(f->eta);
    const auto& p = std::get<PowerEta>(mode);
    return "power:" + format_real(p.theta) + "," + format_real(p.scale);
}

double eta_exponent(double k) {
    if (!(k > 1.0 && k < 14.0 / 5.0))
        throw ConfigError("eta_exponent: k must lie in (1, 14/5)");
    return (14.0 - 5.0 * k) / (28.0 * k);
}

double major_arc_exponent(double k, double epsilon) {
    if (!(k > 0.0)) throw ConfigError("major_arc_exponent: k must be positive");
    return std::min(0.4 - epsilon, 5.0 / (6.0 * k) - epsilon);
}

double major_arc_P(double X, double k, double epsilon) {
    if (!(X >= 2.0)) throw ConfigError("major_arc_P: X must be >= 2");
    return std::pow(X, major_arc_exponent(k, epsilon));
}

double trivial_arc_R(double X, double eta) {
    if (!(eta > 0.0)) throw ConfigError("trivial_arc_R: eta must be positive");
    if (!(X > 1.0)) throw ConfigError("trivial_arc_R: X must exceed 1");
    double l = std::log(X);
    return l * l / (eta * eta);
}

bool ValidationReport::all_satisfied() const {
    return std::all_of(items.begin(), items.end(),
                       [](const Hypothesis& h) { return h.status == HypothesisStatus::satisfied; });
}

const Hypothesis* ValidationReport::find(std::string_view name) const {
    for (const auto& h : items)
        if (h.name == name) return &h;
    return nullptr;
}

std::string_view to_string(HypothesisStatus s) {
    switch (s) {
        case HypothesisStatus::satisfied: return "satisfied";
        case HypothesisStatus::violated: return "violated";
        case HypothesisStatus::unverified: return "unverified";
    }
    return "?";
}

ValidationReport validate(const Params& p) {
    ValidationReport r;
    auto add = [&](std::string name, bool ok, std::string detail = {}) {
        r.items.push_back({std::move(name), ok ? HypothesisStatus::satisfied : HypothesisStatus::violated,
                           std::move(detail)});
    };

    bool nonzero = std::all_of(p.lambda.begin(), p.lambda.end(), [](double l) { return l != 0.0; });
    add("lambda nonzero", nonzero);

    bool all_pos = std::all_of(p.lambda.begin(), p.lambda.end(), [](double l) { return l > 0.0; });
    bool all_neg = std::all_of(p.lambda.begin(), p.lambda.end(), [](double l) { return l < 0.0; });
    add("not all of the same sign", !(all_pos || all_neg));

    Hypothesis irr{"lambda1/lambda2 irrational", HypothesisStatus::satisfied, {}};
    if (const auto* s = std::get_if<QuadraticSurd>(&p.ratio)) {
        if (is_perfect_square(s->d)) {
            irr.status = HypothesisStatus::violated;
            irr.detail = "surd with square radicand is rational";
        }
    } else if (std::holds_alternative<RationalRatio>(p.ratio)) {
        irr.status = HypothesisStatus::violated;
        irr.detail = "rational ratio";
    } else {
        irr.status = HypothesisStatus::unverified;
        irr.detail = "decimal input cannot certify irrationality";
    }
    r.items.push_back(irr);

    if (p.lambda[1] != 0.0) {
        double rv = ratio_value(p.ratio);
        double lr = p.lambda[0] / p.lambda[1];
        bool consistent = std::fabs(rv - lr) <= 1e-12 * std::max(1.0, std::fabs(rv));
        add("ratio matches lambda1/lambda2", consistent,
            consistent ? std::string{} : "ratio " + format_real(rv) + " vs " + format_real(lr));
    } else {
        add("ratio matches lambda1/lambda2", false, "lambda2 is zero");
    }

    add("1 < k < 14/5", p.k > 1.0 && p.k < 14.0 / 5.0);
    add("0 < delta < 1", p.delta > 0.0 && p.delta < 1.0);
    add("0 < epsilon <= 1/100", p.epsilon > 0.0 && p.epsilon <= 0.01);
    return r;
}

KeyValues parse_key_values(std::string_view text) {
    KeyValues kv;
    std::size_t line_no = 0;
    for (auto raw : split(text, '\n')) {
        ++line_no;
        auto hash = raw.find('#');
        auto line = trim(hash == std::string_view::npos ? raw : raw.substr(0, hash));
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        auto key = trim(line.substr(0, eq));
        if (key.empty()) throw ConfigError("config line " + std::to_string(line_no) + ": empty key");
        kv[std::string(key)] = std::string(trim(line.substr(eq + 1)));
    }
    return kv;
}

std::string serialize_key_values(const KeyValues& kv) {
    std::string out;
    for (const auto& [k, v] : kv) out += k + " = " + v + "\n";
    return out;
}

Params params_from_key_values(const KeyValues& kv) {
    Params p;
    auto get = [&](std::string_view key) -> const std::string* {
        auto it = kv.find(key);
        return it == kv.end() ? nullptr : &it->second;
    };
    if (auto v = get("omega")) p.omega = parse_real(*v, "omega");
    if (auto v = get("k")) p.k = parse_real(*v, "k");
    if (auto v = get("delta")) p.delta = parse_real(*v, "delta");
    if (auto v = get("epsilon")) p.epsilon = parse_real(*v, "epsilon");

    const std::string* lam = get("lambda");
    const std::string* rat = get("ratio");
    if (rat) p.ratio = parse_ratio(*rat);
    if (lam) {
        auto l = parse_real_list(*lam, "lambda");
        if (l.size() != 4) throw ConfigError("lambda expects four comma-separated values");
        std::copy(l.begin(), l.end(), p.lambda.begin());
        if (!rat) {
            if (p.lambda[1] == 0.0) throw ConfigError("lambda2 must be non-zero");
            p.ratio = DecimalRatio{format_real(p.lambda[0] / p.lambda[1]), 52};
        }
    } else if (rat) {
        p.lambda = {ratio_value(p.ratio), 1.0, -1.0, -1.0};
    }

    if (auto v = get("eta")) {
        std::string_view s = trim(*v);
        if (s.starts_with("power:")) {
            auto parts = split(s.substr(6), ',');
            if (parts.empty() || parts.size() > 2) throw ConfigError("eta power expects theta[,scale]");
            PowerEta pe;
            if (parts[0] == "auto") pe.theta = eta_exponent(p.k) - p.epsilon;
            else pe.theta = parse_real(parts[0], "eta");
            if (parts.size() == 2) pe.scale = parse_real(parts[1], "eta");
            if (!(pe.scale > 0.0) || !(pe.theta > 0.0)) throw ConfigError("eta power needs theta > 0, scale > 0");
            p.eta.mode = pe;
        } else {
            if (s.starts_with("fixed:")) s.remove_prefix(6);
            double e = parse_real(s, "eta");
            if (!(e > 0.0)) throw ConfigError("eta must be positive");
            p.eta.mode = FixedEta{e};
        }
    }
    return p;
}

KeyValues params_to_key_values(const Params& p) {
    KeyValues kv;
    kv["lambda"] = format_real(p.lambda[0]) + "," + format_real(p.lambda[1]) + "," + format_real(p.lambda[2]) +
                   "," + format_real(p.lambda[3]);
    kv["omega"] = format_real(p.omega);
    kv["k"] = format_real(p.k);
    kv["delta"] = format_real(p.delta);
    kv["epsilon"] = format_real(p.epsilon);
    kv["ratio"] = ratio_to_string(p.ratio);
    kv["eta"] = p.eta.to_string();
    return kv;
}

std::string serialize_params(const Params& p) { return serialize_key_values(params_to_key_values(p)); }

std::string params_digest(const Params& p) { return digest_hex(serialize_params(p)); }

}  // namespace dioph
