#include "dioph/primes.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <string>

#include "dioph/errors.hpp"

namespace dioph {

PrimeTable::PrimeTable(std::uint64_t limit, std::vector<std::uint64_t> primes)
    : limit_(limit), primes_(std::move(primes)) {
    theta_.reserve(primes_.size());
    CompensatedSum running;
    for (auto p : primes_) {
        running.add(std::log(static_cast<double>(p)));
        theta_.push_back(running.value());
    }
}

double PrimeTable::theta(double x) const {
    if (x > static_cast<double>(limit_))
        throw TableTooSmall("theta(" + std::to_string(x) + ") beyond table limit " + std::to_string(limit_));
    if (x < 2.0) return 0.0;
    auto n = static_cast<std::uint64_t>(std::floor(x));
    auto it = std::upper_bound(primes_.begin(), primes_.end(), n);
    if (it == primes_.begin()) return 0.0;
    return theta_[static_cast<std::size_t>(it - primes_.begin()) - 1];
}

double chebyshev_theta(const PrimeTable& table, double x) { return table.theta(x); }

namespace {

std::vector<std::uint64_t> small_primes(std::uint64_t limit) {
    std::vector<char> composite(limit + 1, 0);
    std::vector<std::uint64_t> out;
    for (std::uint64_t i = 2; i <= limit; ++i) {
        if (composite[i]) continue;
        out.push_back(i);
        for (std::uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
    }
    return out;
}

std::uint64_t isqrt(std::uint64_t n) {
    auto r = static_cast<std::uint64_t>(std::sqrt(static_cast<double>(n)));
    while (r * r > n) --r;
    while ((r + 1) * (r + 1) <= n) ++r;
    return r;
}

void check_limit(std::uint64_t limit, std::size_t cap) {
    if (limit < 2) throw ConfigError("sieve limit must be >= 2");
    if (limit > kMaxSieveLimit) throw ResourceError("sieve limit above 1e10");
    double est = 1.26 * static_cast<double>(limit) / std::log(static_cast<double>(limit)) + 16.0;
    if (est * 2.0 * sizeof(std::uint64_t) > static_cast<double>(cap))
        throw ResourceError("prime table for limit " + std::to_string(limit) + " exceeds memory cap");
}

}  // namespace

PrimeTable sieve(std::uint64_t limit, const SieveOptions& opts) {
    check_limit(limit, opts.memory_cap_bytes);
    const std::uint64_t seg = std::max<std::uint64_t>(opts.segment_size, 1024);
    const auto base = small_primes(isqrt(limit));
    const std::uint64_t nseg = (limit + 1 + seg - 1) / seg;
    std::vector<std::vector<std::uint64_t>> parts(nseg);

#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t s = 0; s < static_cast<std::int64_t>(nseg); ++s) {
        const std::uint64_t lo = static_cast<std::uint64_t>(s) * seg;
        const std::uint64_t hi = std::min(lo + seg, limit + 1);  // exclusive
        std::vector<char> composite(hi - lo, 0);
        for (auto p : base) {
            if (p * p >= hi) break;
            std::uint64_t start = std::max(p * p, (lo + p - 1) / p * p);
            for (std::uint64_t j = start; j < hi; j += p) composite[j - lo] = 1;
        }
        auto& out = parts[static_cast<std::size_t>(s)];
        for (std::uint64_t n = std::max<std::uint64_t>(lo, 2); n < hi; ++n)
            if (!composite[n - lo]) out.push_back(n);
    }

    std::size_t total = 0;
    for (const auto& p : parts) total += p.size();
    std::vector<std::uint64_t> primes;
    primes.reserve(total);
    for (auto& p : parts) primes.insert(primes.end(), p.begin(), p.end());
    return PrimeTable(limit, std::move(primes));
}

PrimeTable sieve_reference(std::uint64_t limit) {
    check_limit(limit, SieveOptions{}.memory_cap_bytes);
    return PrimeTable(limit, small_primes(limit));
}

PowerRange::PowerRange(double exponent, double delta, double X)
    : exponent_(exponent), lo_(static_cast<Quad>(delta) * static_cast<Quad>(X)), hi_(X) {
    if (!(exponent >= 1.0)) throw ConfigError("power range exponent must be >= 1");
    if (!(delta > 0.0) || !(X > 0.0)) throw ConfigError("power range needs delta > 0 and X > 0");
}

bool PowerRange::contains(std::uint64_t p) const {
    Quad v = power_q(p, exponent_);
    return v >= lo_ && v <= hi_;
}

std::uint64_t PowerRange::base_floor() const {
    double r = std::pow(static_cast<double>(lo_), 1.0 / exponent_);
    return r > 2.0 ? static_cast<std::uint64_t>(r) - 1 : 0;
}

std::uint64_t PowerRange::base_ceil() const {
    double r = std::pow(static_cast<double>(hi_), 1.0 / exponent_);
    return static_cast<std::uint64_t>(r) + 1;
}

std::vector<std::uint64_t> primes_in_power_range(const PrimeTable& table, double k, double delta, double X) {
    PowerRange range(k, delta, X);
    std::uint64_t top = range.base_ceil();
    // Largest base with base^k <= X must be covered by the table.
    std::uint64_t needed = top;
    while (needed > 0 && power_q(needed, k) > static_cast<Quad>(X)) --needed;
    if (needed > table.limit())
        throw TableTooSmall("prime table limit " + std::to_string(table.limit()) + " below " +
                            std::to_string(needed));

    auto primes = table.primes();
    auto first = std::lower_bound(primes.begin(), primes.end(), range.base_floor());
    std::vector<std::uint64_t> out;
    for (auto it = first; it != primes.end() && *it <= top; ++it)
        if (range.contains(*it)) out.push_back(*it);
    return out;
}

namespace {

void put_u64(std::ostream& os, std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    os.write(reinterpret_cast<const char*>(b), 8);
}

std::uint64_t get_u64(std::istream& is) {
    unsigned char b[8];
    if (!is.read(reinterpret_cast<char*>(b), 8)) throw ResourceError("prime cache truncated");
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return v;
}

constexpr char kMagic[8] = {'D', 'I', 'O', 'P', 'H', 'P', 'T', '1'};

}  // namespace

void write_prime_cache(const std::filesystem::path& path, const PrimeTable& table) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ResourceError("cannot write prime cache " + path.string());
    os.write(kMagic, sizeof kMagic);
    put_u64(os, table.limit());
    put_u64(os, table.primes().size());
    std::uint64_t prev = 0;
    for (auto p : table.primes()) {
        std::uint64_t gap = p - prev;
        prev = p;
        do {
            unsigned char byte = gap & 0x7f;
            gap >>= 7;
            if (gap) byte |= 0x80;
            os.put(static_cast<char>(byte));
        } while (gap);
    }
    if (!os) throw ResourceError("failed writing prime cache " + path.string());
}

PrimeTable read_prime_cache(const std::filesystem::path& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ResourceError("cannot open prime cache " + path.string());
    char magic[8];
    if (!is.read(magic, 8) || !std::equal(magic, magic + 8, kMagic))
        throw ResourceError("bad prime cache magic in " + path.string());
    std::uint64_t limit = get_u64(is);
    std::uint64_t count = get_u64(is);
    if (limit > kMaxSieveLimit) throw ResourceError("prime cache limit out of range");
    std::vector<std::uint64_t> primes;
    primes.reserve(count);
    std::uint64_t prev = 0;
    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t gap = 0;
        int shift = 0;
        while (true) {
            int c = is.get();
            if (c == EOF) throw ResourceError("prime cache truncated");
            gap |= static_cast<std::uint64_t>(c & 0x7f) << shift;
            if (!(c & 0x80)) break;
            shift += 7;
            if (shift > 63) throw ResourceError("prime cache corrupt");
        }
        prev += gap;
        if (prev > limit || (i > 0 && gap == 0)) throw ResourceError("prime cache corrupt");
        primes.push_back(prev);
    }
    return PrimeTable(limit, std::move(primes));
}

}  // namespace dioph
