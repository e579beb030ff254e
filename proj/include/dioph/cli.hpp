#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

#include "dioph/model.hpp"
#include "dioph/primes.hpp"

namespace dioph {

enum class Command { solve, scan, sums, arcs, verify, report };

struct RunConfig {
    Command command = Command::solve;
    std::filesystem::path params_file;
    KeyValues overrides;  // applied after the file, last wins
    std::filesystem::path output_dir;  // empty: primary output to stdout
    int threads = 0;                   // 0: DIOPH_THREADS, then the OpenMP default
    std::uint64_t seed = 1;
};

// Alpha grids: log:e0:e1:n (10^e, n points), lin:a:b:n, list:a,b,...
std::vector<double> parse_alpha_grid(const std::string& text);

// "# version=...,params_digest=..." followed by the CSV body.
std::string with_preamble(const std::string& csv, const std::string& params_digest);

// Prime table of at least `limit`, read from and written to
// $DIOPH_CACHE_DIR/primes.bin when the variable is set.
std::shared_ptr<const PrimeTable> load_prime_table(std::uint64_t limit);

// Exit codes: 0 ok, 1 config, 2 resource, 3 tolerance not reached.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace dioph
