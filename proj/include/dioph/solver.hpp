#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "dioph/contfrac.hpp"
#include "dioph/kernels.hpp"
#include "dioph/model.hpp"
#include "dioph/precise.hpp"
#include "dioph/primes.hpp"

namespace dioph {

// lambda_i p^{k_i}, rounded to double from a binary128 product.
struct Component {
    std::uint64_t p = 0;
    double value = 0.0;
    Quad exact = 0;
};

using ComponentLists = std::array<std::vector<Component>, 4>;

inline constexpr std::size_t kDefaultSolverMemoryCap = std::size_t{2} << 30;

// One list per variable, sorted by value (ties by p).
ComponentLists enumerate_components(const Params& params, const PrimeTable& table, double X,
                                    std::size_t memory_cap_bytes = kDefaultSolverMemoryCap);

struct SolutionRecord {
    std::array<std::uint64_t, 4> p{};
    double form_value = 0.0;  // lambda . powers - omega
    double log_weight = 0.0;  // product of log p_i
    std::uint64_t max_p = 0;
};

struct SearchStats {
    std::array<std::size_t, 4> component_counts{};
    std::size_t pair_sums = 0;            // size of the (p2, p3) array
    std::size_t outer_pairs = 0;          // (p1, p4) pairs
    std::size_t candidates_examined = 0;  // entries inside widened windows
    std::size_t solutions = 0;
    double weighted_sum = 0.0;
    double wall_seconds = 0.0;  // not part of deterministic output
};

struct SearchResult {
    std::vector<SolutionRecord> records;  // sorted by (p1, p2, p3, p4)
    SearchStats stats;
};

// Every quadruple with delta X <= p_i^{k_i} <= X and |form| <= eta. Windows are
// widened by a rounding budget and every candidate is re-checked in binary128.
SearchResult find_solutions(const Params& params, const PrimeTable& table, double X, double eta,
                            Exec exec = Exec::parallel,
                            std::size_t memory_cap_bytes = kDefaultSolverMemoryCap);

struct Weighed {
    std::size_t count = 0;
    double weighted_sum = 0.0;  // sum of log_weight * max(0, eta - |form|)
};

Weighed count_and_weigh(std::span<const SolutionRecord> records, double eta);

// p1,p2,p3,p4,form_value,log_weight
std::string solutions_csv(std::span<const SolutionRecord> records);
std::string stats_json(const SearchStats& stats, const std::string& params_digest, bool include_wall_time = false);

using TableProvider = std::function<std::shared_ptr<const PrimeTable>(std::uint64_t limit)>;

struct ScanRow {
    std::size_t index = 0;  // convergent index
    std::int64_t q = 0;
    double X = 0.0;
    double eta = 0.0;
    bool ok = false;
    std::string error;  // set when !ok
    SearchStats stats;
    std::size_t cumulative = 0;  // running total of solutions over the scan
};

struct ScanOptions {
    double max_X = 1e7;
    Exec exec = Exec::parallel;
};

// find_solutions at X_n = q_n^{7/3} for each convergent with q_n >= 2.
std::vector<ScanRow> scan_sequence(const Params& params, const TableProvider& tables,
                                   std::span<const Convergent> convs, const EtaPolicy& eta,
                                   const ScanOptions& opts = {});

// index,q,X,eta,N,cumulative,weighted_sum,status
std::string scan_csv(std::span<const ScanRow> rows);

}  // namespace dioph
