#include "dioph/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <tuple>

#include <omp.h>

#include "dioph/errors.hpp"
#include "dioph/format.hpp"
#include "json.hpp"

namespace dioph {

ComponentLists enumerate_components(const Params& params, const PrimeTable& table, double X,
                                    std::size_t memory_cap_bytes) {
    const auto ks = params.exponents();
    ComponentLists lists;
    std::size_t bytes = 0;
    for (int i = 0; i < 4; ++i) {
        auto primes = primes_in_power_range(table, ks[i], params.delta, X);
        bytes += primes.size() * sizeof(Component);
        if (bytes > memory_cap_bytes) throw ResourceError("component lists exceed memory cap");
        auto& list = lists[i];
        list.reserve(primes.size());
        const Quad lam = params.lambda[i];
        for (auto p : primes) {
            Quad v = lam * power_q(p, ks[i]);
            list.push_back({p, static_cast<double>(v), v});
        }
        std::sort(list.begin(), list.end(), [](const Component& a, const Component& b) {
            return std::tie(a.value, a.p) < std::tie(b.value, b.p);
        });
    }
    return lists;
}

namespace {

struct PairSum {
    double value;
    std::uint32_t i2;  // indices into lists[1], lists[2]
    std::uint32_t i3;
};

double max_abs(const std::vector<Component>& l) {
    double m = 0.0;
    for (const auto& c : l) m = std::max(m, std::fabs(c.value));
    return m;
}

void search_p1(const ComponentLists& L, const std::vector<PairSum>& B, std::size_t i1, double omega, Quad omega_q,
               double eta, double slack, std::vector<SolutionRecord>& out, std::size_t& examined) {
    const auto& c1 = L[0][i1];
    for (const auto& c4 : L[3]) {
        double target = omega - c1.value - c4.value;
        double lo = target - eta - slack, hi = target + eta + slack;
        auto first = std::lower_bound(B.begin(), B.end(), lo, [](const PairSum& s, double v) { return s.value < v; });
        for (auto it = first; it != B.end() && it->value <= hi; ++it) {
            ++examined;
            const auto& c2 = L[1][it->i2];
            const auto& c3 = L[2][it->i3];
            Quad form = c1.exact + c2.exact + c3.exact + c4.exact - omega_q;
            if (fabsq(form) > static_cast<Quad>(eta)) continue;
            SolutionRecord r;
            r.p = {c1.p, c2.p, c3.p, c4.p};
            r.form_value = static_cast<double>(form);
            r.log_weight = std::log(static_cast<double>(c1.p)) * std::log(static_cast<double>(c2.p)) *
                           std::log(static_cast<double>(c3.p)) * std::log(static_cast<double>(c4.p));
            r.max_p = *std::max_element(r.p.begin(), r.p.end());
            out.push_back(r);
        }
    }
}

}  // namespace

SearchResult find_solutions(const Params& params, const PrimeTable& table, double X, double eta, Exec exec,
                            std::size_t memory_cap_bytes) {
    if (!(eta >= 0.0) || !std::isfinite(eta)) throw ConfigError("find_solutions: eta must be finite and >= 0");
    auto t0 = std::chrono::steady_clock::now();
    const ComponentLists L = enumerate_components(params, table, X, memory_cap_bytes);

    SearchResult res;
    for (int i = 0; i < 4; ++i) res.stats.component_counts[i] = L[i].size();
    const std::size_t nb = L[1].size() * L[2].size();
    if (nb * sizeof(PairSum) > memory_cap_bytes) throw ResourceError("pair-sum array exceeds memory cap");
    if (L[1].size() > std::numeric_limits<std::uint32_t>::max()) throw ResourceError("component list too long");

    std::vector<PairSum> B;
    B.reserve(nb);
    for (std::uint32_t a = 0; a < L[1].size(); ++a)
        for (std::uint32_t b = 0; b < L[2].size(); ++b) B.push_back({L[1][a].value + L[2][b].value, a, b});
    std::sort(B.begin(), B.end(), [](const PairSum& x, const PairSum& y) {
        return std::tie(x.value, x.i2, x.i3) < std::tie(y.value, y.i2, y.i3);
    });
    res.stats.pair_sums = B.size();
    res.stats.outer_pairs = L[0].size() * L[3].size();

    // Each stored double is within half an ulp of its binary128 value; the sums
    // formed here add a few more. 4 eps of the largest magnitudes covers all.
    const double slack =
        4.0 * kEps * (std::fabs(params.omega) + max_abs(L[0]) + max_abs(L[1]) + max_abs(L[2]) + max_abs(L[3]) + eta);
    const Quad omega_q = params.omega;
    const auto n1 = static_cast<std::int64_t>(L[0].size());

    std::size_t examined = 0;
    if (exec == Exec::parallel) {
        int nt = omp_get_max_threads();
        std::vector<std::vector<SolutionRecord>> parts(static_cast<std::size_t>(nt));
#pragma omp parallel reduction(+ : examined)
        {
            auto& mine = parts[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(dynamic, 16)
            for (std::int64_t i = 0; i < n1; ++i)
                search_p1(L, B, static_cast<std::size_t>(i), params.omega, omega_q, eta, slack, mine, examined);
        }
        for (auto& p : parts) res.records.insert(res.records.end(), p.begin(), p.end());
    } else {
        for (std::int64_t i = 0; i < n1; ++i)
            search_p1(L, B, static_cast<std::size_t>(i), params.omega, omega_q, eta, slack, res.records, examined);
    }
    std::sort(res.records.begin(), res.records.end(),
              [](const SolutionRecord& a, const SolutionRecord& b) { return a.p < b.p; });

    auto w = count_and_weigh(res.records, eta);
    res.stats.candidates_examined = examined;
    res.stats.solutions = w.count;
    res.stats.weighted_sum = w.weighted_sum;
    res.stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

Weighed count_and_weigh(std::span<const SolutionRecord> records, double eta) {
    CompensatedSum s;
    for (const auto& r : records) s.add(r.log_weight * std::max(0.0, eta - std::fabs(r.form_value)));
    return {records.size(), s.value()};
}

std::string solutions_csv(std::span<const SolutionRecord> records) {
    std::string out = csv_row({"p1", "p2", "p3", "p4", "form_value", "log_weight"});
    for (const auto& r : records)
        out += csv_row({std::to_string(r.p[0]), std::to_string(r.p[1]), std::to_string(r.p[2]),
                        std::to_string(r.p[3]), format_real(r.form_value), format_real(r.log_weight)});
    return out;
}

std::string stats_json(const SearchStats& s, const std::string& params_digest, bool include_wall_time) {
    nlohmann::ordered_json j;
    j["component_counts"] = s.component_counts;
    j["pair_sums"] = s.pair_sums;
    j["outer_pairs"] = s.outer_pairs;
    j["candidates_examined"] = s.candidates_examined;
    j["solutions"] = s.solutions;
    j["weighted_sum"] = s.weighted_sum;
    if (include_wall_time) j["wall_seconds"] = s.wall_seconds;
    j["params_digest"] = params_digest;
    j["version"] = std::string(kVersion);
    return j.dump(2) + "\n";
}

std::vector<ScanRow> scan_sequence(const Params& params, const TableProvider& tables,
                                   std::span<const Convergent> convs, const EtaPolicy& eta,
                                   const ScanOptions& opts) {
    // q = 1 gives X = 1, an empty box; the sequence starts at q = 2.
    std::vector<Convergent> usable;
    for (const auto& c : convs)
        if (c.q >= 2) usable.push_back(c);
    auto xs = x_sequence(usable);

    std::vector<ScanRow> rows;
    std::size_t cumulative = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        ScanRow row;
        row.index = usable[i].index;
        row.q = usable[i].q;
        row.X = xs[i];
        try {
            row.eta = eta(row.X);
            if (row.X > opts.max_X) throw ResourceError("X = " + format_real(row.X) + " above scan cap");
            auto limit = static_cast<std::uint64_t>(row.X) + 1;
            auto table = tables(limit);
            auto res = find_solutions(params, *table, row.X, row.eta, opts.exec);
            row.stats = res.stats;
            row.ok = true;
            cumulative += res.stats.solutions;
        } catch (const ResourceError& e) {
            row.error = e.what();
        }
        row.cumulative = cumulative;
        rows.push_back(std::move(row));
    }
    return rows;
}

std::string scan_csv(std::span<const ScanRow> rows) {
    std::string out = csv_row({"index", "q", "X", "eta", "N", "cumulative", "weighted_sum", "status"});
    for (const auto& r : rows)
        out += csv_row({std::to_string(r.index), std::to_string(r.q), format_real(r.X), format_real(r.eta),
                        r.ok ? std::to_string(r.stats.solutions) : std::string(), std::to_string(r.cumulative),
                        r.ok ? format_real(r.stats.weighted_sum) : std::string(), r.ok ? "ok" : r.error});
    return out;
}

}  // namespace dioph
