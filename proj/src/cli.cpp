#include "dioph/cli.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <mutex>
#include <sstream>

#include "CLI11.hpp"
#include "dioph/arcs.hpp"
#include "dioph/contfrac.hpp"
#include "dioph/errors.hpp"
#include "dioph/expsums.hpp"
#include "dioph/format.hpp"
#include "dioph/solver.hpp"
#include "dioph/verify.hpp"
#include "json.hpp"

namespace dioph {

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::size_t parse_count(const std::string& s, const char* what) {
    double v = parse_real(s, what);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e8) throw ConfigError(std::string(what) + ": expected a positive integer");
    return static_cast<std::size_t>(v);
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_json(const char* kind, const std::string& message) {
    nlohmann::ordered_json j;
    j["error"] = kind;
    j["message"] = message;
    return j.dump() + "\n";
}

// Primary output goes to stdout unless an output directory is set; secondary
// outputs are only written to the directory.
class Sink {
public:
    Sink(std::filesystem::path dir, std::ostream& out) : dir_(std::move(dir)), out_(out) {}

    void emit(const std::string& name, const std::string& content, bool primary) {
        if (dir_.empty()) {
            if (primary) out_ << content;
            return;
        }
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        std::ofstream f(dir_ / name, std::ios::binary);
        if (!f) throw ConfigError("output directory not writable: " + dir_.string());
        f << content;
        if (!f) throw ResourceError("write failed: " + (dir_ / name).string());
    }

private:
    std::filesystem::path dir_;
    std::ostream& out_;
};

struct Options {
    std::string config;
    std::string out;
    int threads = 0;
    std::uint64_t seed = 1;
    std::string lambda, omega, k, delta, epsilon, eta, ratio;
    double X = 0.0;
    std::size_t n_convergents = 8;
    double max_X = 1e7;
    std::string kind = "S";
    std::string alpha_grid = "log:-3:0:50";
    std::string arc = "full";
    double truncation = 0.0;
    std::string check = "stability";
    std::vector<double> scales = {1e3, 1e4};
    double gamma = 1.0;
    std::size_t samples = 10000;
    std::string input;
};

RunConfig make_config(Command cmd, const Options& o) {
    RunConfig rc;
    rc.command = cmd;
    rc.params_file = o.config;
    rc.output_dir = o.out;
    rc.threads = o.threads;
    rc.seed = o.seed;
    auto put = [&](const char* key, const std::string& v) {
        if (!v.empty()) rc.overrides[key] = v;
    };
    put("lambda", o.lambda);
    put("omega", o.omega);
    put("k", o.k);
    put("delta", o.delta);
    put("epsilon", o.epsilon);
    put("eta", o.eta);
    put("ratio", o.ratio);
    if (rc.threads < 0) throw ConfigError("--threads must be >= 0");
    return rc;
}

Params load_params(const RunConfig& rc) {
    KeyValues kv;
    if (!rc.params_file.empty()) kv = parse_key_values(read_file(rc.params_file));
    for (const auto& [key, value] : rc.overrides) kv[key] = value;
    return params_from_key_values(kv);
}

void apply_threads(int threads) {
    if (threads == 0) {
        if (const char* env = std::getenv("DIOPH_THREADS")) {
            double v = parse_real(env, "DIOPH_THREADS");
            if (!(v >= 0.0) || v != std::floor(v)) throw ConfigError("DIOPH_THREADS must be a non-negative integer");
            threads = static_cast<int>(v);
        }
    }
    if (threads > 0) omp_set_num_threads(threads);
}

double require_X(const Options& o) {
    if (!(o.X >= 1.0) || !std::isfinite(o.X)) throw ConfigError("--X must be given and >= 1");
    return o.X;
}

std::uint64_t table_limit_for(double x) {
    if (!(x <= static_cast<double>(kMaxSieveLimit))) throw ResourceError("prime table limit above " + std::to_string(kMaxSieveLimit));
    return static_cast<std::uint64_t>(std::floor(x)) + 2;
}

int cmd_solve(const RunConfig& rc, const Options& o, Sink& sink) {
    Params p = load_params(rc);
    const double X = require_X(o);
    const double eta = p.eta(X);
    auto table = load_prime_table(table_limit_for(X));
    auto res = find_solutions(p, *table, X, eta);
    const std::string digest = params_digest(p);
    sink.emit("solutions.csv", with_preamble(solutions_csv(res.records), digest), true);
    sink.emit("stats.json", stats_json(res.stats, digest), false);
    return 0;
}

int cmd_scan(const RunConfig& rc, const Options& o, Sink& sink) {
    Params p = load_params(rc);
    // n counts convergents with q >= 2; q = 1 is not a usable scale
    auto cf = expand(p.ratio, o.n_convergents + 2);
    auto convs = convergents(cf, cf.quotients.size());
    std::vector<Convergent> usable;
    for (const auto& c : convs)
        if (c.q >= 2 && usable.size() < o.n_convergents) usable.push_back(c);
    ScanOptions so;
    so.max_X = o.max_X;
    auto rows = scan_sequence(p, load_prime_table, usable, p.eta, so);
    const std::string digest = params_digest(p);
    sink.emit("scan.csv", with_preamble(scan_csv(rows), digest), true);
    sink.emit("convergents.csv", with_preamble(convergents_csv(usable), digest), false);
    return 0;
}

int cmd_sums(const RunConfig& rc, const Options& o, Sink& sink) {
    Params p = load_params(rc);
    const double X = require_X(o);
    const SumKind kind = parse_sum_kind(o.kind);
    auto alphas = parse_alpha_grid(o.alpha_grid);
    std::shared_ptr<const PrimeTable> table;
    if (kind == SumKind::T) table = std::make_shared<PrimeTable>();
    else table = load_prime_table(table_limit_for(std::pow(X, 1.0 / p.k)));
    auto grid = evaluate_grid(kind, *table, p.k, p.delta, X, alphas);
    sink.emit("sums.csv", with_preamble(grid_csv(grid), params_digest(p)), true);
    return 0;
}

int cmd_arcs(const RunConfig& rc, const Options& o, Sink& sink) {
    Params p = load_params(rc);
    const double X = require_X(o);
    const double eta = p.eta(X);
    const Arc arc = parse_arc(o.arc);
    auto table = load_prime_table(table_limit_for(X));
    auto arcs = default_decomposition(p, X, eta);
    GridPolicy gp;
    gp.truncation = o.truncation;

    nlohmann::ordered_json j;
    int code = 0;
    IntegralResult r;
    try {
        r = integrate_I(p, *table, X, eta, arcs, arc, gp);
    } catch (const ToleranceError& e) {
        // keep going so the estimate is still reported
        r.arc = arc;
        r.value = e.estimate();
        r.quad_error = e.achieved_error();
        r.params_digest = params_digest(p);
        j["tolerance_warning"] = e.what();
        code = 3;
    }
    j["integral"] = nlohmann::ordered_json::parse(to_json(r));
    j["X"] = X;
    j["eta"] = eta;
    j["P"] = arcs.P;
    j["R"] = arcs.R;
    if (arc == Arc::full) {
        const double direct = direct_sum_I(p, *table, X, eta);
        const double diff = std::fabs(r.value - direct);
        j["direct_sum"] = direct;
        j["abs_discrepancy"] = diff;
        j["rel_discrepancy"] = direct != 0.0 ? diff / std::fabs(direct) : diff;
        j["within_bound"] = diff <= r.quad_error + r.tail_bound;
    }
    j["params_digest"] = params_digest(p);
    j["version"] = std::string(kVersion);
    sink.emit("arcs.json", j.dump(2) + "\n", true);
    return code;
}

int cmd_verify(const RunConfig& rc, const Options& o, Sink& sink) {
    Params p = load_params(rc);
    const std::string digest = params_digest(p);
    if (o.check == "stability") {
        StabilityOptions so;
        so.scales = o.scales;
        double top = 0.0;
        for (double s : so.scales) top = std::max(top, s);
        auto table = load_prime_table(table_limit_for(2.0 * top + std::pow(top, 1.0 - 5.0 / (6.0 * p.k) + so.h_offset) + 2.0));
        auto checks = stability_suite(p, *table, so);
        sink.emit("checks.txt", checks_table(checks), true);
        sink.emit("checks.json", checks_json(checks, digest), false);
        return 0;
    }
    nlohmann::ordered_json j;
    if (o.check == "robert_sargos") {
        const double X = require_X(o);
        auto count = robert_sargos_count(X, p.k, o.gamma);
        auto bases = robert_sargos_bases(X, p.k);
        j["X"] = X;
        j["k"] = p.k;
        j["gamma"] = o.gamma;
        j["bases"] = {bases.lo, bases.hi};
        j["count"] = count;
        j["shape"] = robert_sargos_shape(X, p.k, o.gamma, p.epsilon);
    } else if (o.check == "j1") {
        const double X = require_X(o);
        const double eta = p.eta(X);
        auto r = main_term_J1(p, X, eta);
        j["X"] = X;
        j["eta"] = eta;
        j["fourier"] = r.fourier;
        j["fourier_error"] = r.fourier_error;
        j["fourier_tail"] = r.fourier_tail;
        j["truncation"] = r.truncation;
        j["measure"] = r.measure;
        j["measure_error"] = r.measure_error;
        j["discrepancy"] = r.discrepancy;
        j["ratio"] = r.ratio;
    } else if (o.check == "thresholds") {
        const double X = require_X(o);
        auto table = load_prime_table(table_limit_for(X));
        auto z = minor_arc_thresholds(X, p.epsilon);
        j["X"] = X;
        j["z1"] = z.z1;
        j["z2"] = z.z2;
        j["samples"] = o.samples;
        j["seed"] = rc.seed;
        j["fraction"] = threshold_exceedance(p, *table, X, o.samples, rc.seed);
    } else {
        throw ConfigError("unknown check '" + o.check + "' (expected stability, robert_sargos, j1 or thresholds)");
    }
    j["params_digest"] = digest;
    j["version"] = std::string(kVersion);
    sink.emit("verify_" + o.check + ".json", j.dump(2) + "\n", true);
    return 0;
}

// Summary of the CSV and JSON files in a directory: version, digest and size.
int cmd_report(const RunConfig&, const Options& o, Sink& sink) {
    const std::filesystem::path dir = o.input.empty() ? std::filesystem::path(".") : std::filesystem::path(o.input);
    if (!std::filesystem::is_directory(dir)) throw ConfigError("report: not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        auto ext = e.path().extension();
        if (e.is_regular_file() && (ext == ".csv" || ext == ".json")) files.push_back(e.path());
    }
    std::sort(files.begin(), files.end());
    nlohmann::ordered_json list = nlohmann::ordered_json::array();
    for (const auto& f : files) {
        if (f.filename() == "report.json") continue;
        const std::string text = read_file(f);
        nlohmann::ordered_json item;
        item["file"] = f.filename().string();
        if (f.extension() == ".csv") {
            std::size_t lines = 0;
            for (char c : text) lines += c == '\n';
            std::string version, digest;
            if (text.starts_with("# ")) {
                std::string head = text.substr(2, text.find_first_of("\r\n") - 2);
                for (const auto& part : split_on(head, ',')) {
                    if (part.starts_with("version=")) version = part.substr(8);
                    if (part.starts_with("params_digest=")) digest = part.substr(14);
                }
                lines -= 1;
            }
            item["kind"] = "csv";
            item["version"] = version;
            item["params_digest"] = digest;
            item["data_rows"] = lines > 0 ? lines - 1 : 0;
        } else {
            auto j = nlohmann::ordered_json::parse(text, nullptr, false);
            if (j.is_discarded()) throw ConfigError("report: malformed JSON in " + f.string());
            item["kind"] = "json";
            item["version"] = j.value("version", "");
            item["params_digest"] = j.value("params_digest", "");
            if (j.contains("checks")) {
                nlohmann::ordered_json verdicts;
                for (const auto& c : j["checks"]) verdicts[c.value("name", "")] = c.value("verdict", "");
                item["verdicts"] = verdicts;
            }
            if (j.contains("within_bound")) item["within_bound"] = j["within_bound"];
            if (j.contains("solutions")) item["solutions"] = j["solutions"];
        }
        list.push_back(item);
    }
    nlohmann::ordered_json out;
    out["files"] = list;
    out["version"] = std::string(kVersion);
    sink.emit("report.json", out.dump(2) + "\n", true);
    return 0;
}

}  // namespace

std::vector<double> parse_alpha_grid(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("alpha grid: expected log:e0:e1:n, lin:a:b:n or list:a,b,...");
    const std::string head = text.substr(0, colon), body = text.substr(colon + 1);
    if (head == "list") {
        auto v = parse_real_list(body, "alpha-grid");
        if (v.empty()) throw ConfigError("alpha grid: empty list");
        return v;
    }
    auto parts = split_on(body, ':');
    if (parts.size() != 3) throw ConfigError("alpha grid: " + head + " expects three fields");
    const double a = parse_real(parts[0], "alpha-grid"), b = parse_real(parts[1], "alpha-grid");
    const std::size_t n = parse_count(parts[2], "alpha-grid");
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
        double x = a + (b - a) * t;
        if (head == "log") out[i] = std::pow(10.0, x);
        else if (head == "lin") out[i] = x;
        else throw ConfigError("alpha grid: unknown form '" + head + "'");
    }
    return out;
}

std::string with_preamble(const std::string& csv, const std::string& params_digest) {
    return "# version=" + std::string(kVersion) + ",params_digest=" + params_digest + "\r\n" + csv;
}

std::shared_ptr<const PrimeTable> load_prime_table(std::uint64_t limit) {
    static std::mutex mu;
    static std::shared_ptr<const PrimeTable> cached;
    std::lock_guard lock(mu);
    if (cached && cached->limit() >= limit) return cached;

    const char* dir = std::getenv("DIOPH_CACHE_DIR");
    std::filesystem::path file;
    if (dir && *dir) {
        file = std::filesystem::path(dir) / "primes.bin";
        std::error_code ec;
        if (std::filesystem::exists(file, ec)) {
            try {
                auto t = std::make_shared<PrimeTable>(read_prime_cache(file));
                if (t->limit() >= limit) return cached = t;
            } catch (const ConfigError&) {
                // unreadable cache: rebuild below
            }
        }
    }
    auto t = std::make_shared<PrimeTable>(sieve(limit));
    if (!file.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(file.parent_path(), ec);
        write_prime_cache(file, *t);
    }
    return cached = t;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"dioph: numerical lab for |l1 p1 + l2 p2^2 + l3 p3^2 + l4 p4^k - omega| <= eta"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(kVersion));
    Options o;

    auto common = [&](CLI::App* sc) {
        sc->add_option("--config", o.config, "key = value parameter file");
        sc->add_option("--out", o.out, "output directory (default: primary output to stdout)");
        sc->add_option("--threads", o.threads, "worker threads, 0 = auto");
        sc->add_option("--seed", o.seed, "random seed");
        sc->add_option("--lambda", o.lambda, "l1,l2,l3,l4");
        sc->add_option("--omega", o.omega, "target omega");
        sc->add_option("--k", o.k, "exponent of p4");
        sc->add_option("--delta", o.delta, "lower box edge delta X");
        sc->add_option("--epsilon", o.epsilon, "epsilon in the exponents");
        sc->add_option("--eta", o.eta, "eta value, or power:theta[,scale] / power:auto");
        sc->add_option("--ratio", o.ratio, "l1/l2: sqrt2, surd:d,p,q, p/q or decimal");
    };
    auto* solve = app.add_subcommand("solve", "all solutions at one scale X");
    common(solve);
    solve->add_option("--X", o.X, "scale")->required();
    auto* scan = app.add_subcommand("scan", "solution counts along X = q^{7/3} over convergents of l1/l2");
    common(scan);
    scan->add_option("--n-convergents", o.n_convergents, "number of convergents with q >= 2");
    scan->add_option("--max-X", o.max_X, "skip scales above this");
    auto* sums = app.add_subcommand("sums", "exponential sums on an alpha grid");
    common(sums);
    sums->add_option("--X", o.X, "scale")->required();
    sums->add_option("--kind", o.kind, "S, U or T");
    sums->add_option("--alpha-grid", o.alpha_grid, "log:e0:e1:n, lin:a:b:n or list:a,b,...");
    auto* arcs = app.add_subcommand("arcs", "circle-method integral and comparison with the direct sum");
    common(arcs);
    arcs->add_option("--X", o.X, "scale")->required();
    arcs->add_option("--arc", o.arc, "major, minor, trivial or full");
    arcs->add_option("--A", o.truncation, "truncation of the trivial arc (0: default)");
    auto* verify = app.add_subcommand("verify", "bound checks");
    common(verify);
    verify->add_option("--check", o.check, "stability, robert_sargos, j1 or thresholds");
    verify->add_option("--X", o.X, "scale (single-scale checks)");
    verify->add_option("--scales", o.scales, "scales for the stability checks")->delimiter(',');
    verify->add_option("--gamma", o.gamma, "window for robert_sargos");
    verify->add_option("--samples", o.samples, "sample count for thresholds");
    auto* report = app.add_subcommand("report", "summarise earlier outputs in a directory");
    common(report);
    report->add_option("--in", o.input, "directory with earlier outputs");

    std::vector<const char*> argv;
    argv.push_back("dioph");
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return 0;
        }
        err << error_json("config", e.what());
        return 1;
    }

    try {
        Command cmd = Command::solve;
        if (scan->parsed()) cmd = Command::scan;
        else if (sums->parsed()) cmd = Command::sums;
        else if (arcs->parsed()) cmd = Command::arcs;
        else if (verify->parsed()) cmd = Command::verify;
        else if (report->parsed()) cmd = Command::report;
        RunConfig rc = make_config(cmd, o);
        apply_threads(rc.threads);
        Sink sink(rc.output_dir, out);
        switch (cmd) {
            case Command::solve: return cmd_solve(rc, o, sink);
            case Command::scan: return cmd_scan(rc, o, sink);
            case Command::sums: return cmd_sums(rc, o, sink);
            case Command::arcs: return cmd_arcs(rc, o, sink);
            case Command::verify: return cmd_verify(rc, o, sink);
            case Command::report: return cmd_report(rc, o, sink);
        }
    } catch (const ConfigError& e) {
        err << error_json("config", e.what());
        return 1;
    } catch (const ResourceError& e) {
        err << error_json("resource", e.what());
        return 2;
    } catch (const ToleranceError& e) {
        nlohmann::ordered_json j;
        j["error"] = "tolerance";
        j["message"] = e.what();
        j["estimate"] = e.estimate();
        j["achieved_error"] = e.achieved_error();
        err << j.dump() << "\n";
        return 3;
    } catch (const std::bad_alloc&) {
        err << error_json("resource", "out of memory");
        return 2;
    }
    return 0;
}

int run(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run(args, std::cout, std::cerr);
}

}  // namespace dioph
