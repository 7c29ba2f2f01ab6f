#include "safeaci/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <sstream>
#include <thread>
#include <vector>

#include "safeaci/errors.hpp"
#include "safeaci/harness.hpp"
#include "safeaci/kern.hpp"
#include "safeaci/setup.hpp"

namespace safeaci {

namespace fs = std::filesystem;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string fmtg(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.17g", v);
    return b;
}

std::string fmt6(double v) {
    char b[40];
    std::snprintf(b, sizeof b, "%.6g", v);
    return b;
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

std::string iso8601_utc() {
    const std::time_t now = std::time(nullptr);
    std::tm tm{};
    gmtime_r(&now, &tm);
    char b[32];
    std::strftime(b, sizeof b, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return b;
}

void atomic_write(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw Error("cannot open '" + tmp.string() + "' for writing");
        os << content;
        os.flush();
        if (!os) throw Error("write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, path);
}

using Meta = std::vector<std::pair<std::string, std::string>>;

// Config snapshot first (loadable as a config file), run metadata after
// under the reserved manifest. prefix.
void write_manifest(const fs::path& path, const Config& cfg, const Meta& meta) {
    std::ostringstream os;
    for (const auto& [k, v] : cfg.entries()) os << k << " = " << v << "\n";
    // Byte-identical replay holds per kernel backend, so record which one ran.
    os << "manifest.simd_backend = " << kern::active().name << "\n";
    for (const auto& [k, v] : meta) os << "manifest." << k << " = " << v << "\n";
    atomic_write(path, os.str());
}

// Everything the CLI prints about a run, recomputed from the logged rows
// (plus the barrier half-widths for the normalized excursion).
struct RowStats {
    std::size_t rows = 0;
    double t_first = 0.0;
    double t_last = 0.0;
    double max_bf = 0.0;
    double max_u = 0.0;  // max over rows and channels of |u_j|
    double max_ratio = 0.0;
    double final_x_norm = 0.0;
    double final_xtilde = 0.0;
    bool violated = false;
    double first_violation_t = kInf;  // first row flagged unsafe
};

RowStats row_stats(const std::vector<TrajectoryRecord>& recs, const Vec& a) {
    RowStats st;
    st.rows = recs.size();
    if (recs.empty()) return st;
    st.t_first = recs.front().t;
    st.t_last = recs.back().t;
    for (const TrajectoryRecord& r : recs) {
        st.max_bf = std::max(st.max_bf, r.bf);
        for (double uj : r.u) st.max_u = std::max(st.max_u, std::fabs(uj));
        for (std::size_t i = 0; i < r.x.size() && i < a.size(); ++i)
            st.max_ratio = std::max(st.max_ratio, std::fabs(r.x[i]) / a[i]);
        if (!r.safe && !st.violated) {
            st.violated = true;
            st.first_violation_t = r.t;
        }
    }
    st.final_x_norm = norm2(recs.back().x);
    st.final_xtilde = recs.back().xtilde_norm;
    return st;
}

std::string violation_str(const RowStats& st) {
    return st.violated ? "t = " + fmt6(st.first_violation_t) : "none";
}

void append_leg_meta(Meta& meta, const std::string& prefix,
                     const TrajectoryLog& log, const RowStats& st) {
    const bool violated = log.summary.status == EpisodeStatus::violated;
    meta.emplace_back(prefix + "status", violated ? "violated" : "completed");
    meta.emplace_back(prefix + "first_violation_t",
                      fmtg(log.summary.first_violation_t));
    meta.emplace_back(prefix + "steps", std::to_string(log.summary.steps));
    meta.emplace_back(prefix + "rows", std::to_string(st.rows));
    meta.emplace_back(prefix + "max_bf", fmtg(log.summary.max_bf));
    meta.emplace_back(prefix + "max_ratio", fmtg(log.summary.max_ratio));
}

void append_certificate_meta(Meta& meta, const SafetyCertificate& cert,
                             const BarrierBoundReport& mon) {
    meta.emplace_back("certificate.samples", std::to_string(cert.samples));
    meta.emplace_back("certificate.f_bar", fmtg(cert.f_bar));
    meta.emplace_back("certificate.phi_d_bar", fmtg(cert.phi_d_bar));
    meta.emplace_back("certificate.rg_bar", fmtg(cert.rg_bar));
    meta.emplace_back("certificate.rg_min", fmtg(cert.rg_min));
    meta.emplace_back("certificate.b_bar_d", fmtg(cert.b_bar_d));
    meta.emplace_back("certificate.gamma", fmtg(cert.gamma));
    meta.emplace_back("certificate.bf_x0", fmtg(cert.bf_x0));
    meta.emplace_back("certificate.bound", fmtg(cert.bound));
    meta.emplace_back("certificate.observed_max_bf", fmtg(mon.max_bf));
    meta.emplace_back("certificate.bound_respected", mon.holds ? "true" : "false");
}

// The certificate is evaluated with the same basis the episode drew: the
// basis is the first consumer of the episode RNG stream.
SafetyCertificate run_certificate(const Setup& s, double w_bar, long samples) {
    Rng rng(s.episode.seed);
    const std::shared_ptr<const Basis> basis = s.loop.basis_factory(rng);
    return compute_certificate(*s.loop.barrier, s.loop.model, s.loop.cost, *basis,
                               w_bar, s.loop.lambda, samples, s.episode.x0,
                               s.episode.seed);
}

void print_run_summary(std::ostream& os, const std::string& label,
                       const RowStats& st) {
    os << label << ": rows " << st.rows << ", t [" << fmt6(st.t_first) << ", "
       << fmt6(st.t_last) << "]\n";
    os << "  final |x| " << fmt6(st.final_x_norm) << ", final xtilde "
       << fmt6(st.final_xtilde) << "\n";
    os << "  max Bf " << fmt6(st.max_bf) << ", max |u| " << fmt6(st.max_u)
       << ", max boundary ratio " << fmt6(st.max_ratio) << "\n";
    os << "  violation: " << violation_str(st) << "\n";
}

std::string mode_name(ControllerMode m) {
    return m == ControllerMode::safe ? "safe" : "baseline_aci";
}

}  // namespace

Config resolve_config(const CliOptions& opt) {
    Config c = Config::defaults();
    if (!opt.config_path.empty()) c.apply_file(opt.config_path);
    c.apply_env();
    for (const std::string& s : opt.sets) {
        const std::size_t eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError("--set expects key=value, got '" + s + "'");
        c.set(trim(s.substr(0, eq)), trim(s.substr(eq + 1)));
    }
    if (opt.seed) c.set("episode.seed", std::to_string(*opt.seed));
    if (opt.decimate) c.set("episode.decimate", std::to_string(*opt.decimate));
    return c;
}

int cmd_run(const Config& cfg, const std::string& out_dir) {
    const std::string start = iso8601_utc();
    const Setup s = build_setup(cfg);
    const TrajectoryLog log = run_episode(s.episode, s.loop);
    const RowStats st = row_stats(log.records, cfg.get_list("barrier.a"));

    Meta meta;
    meta.emplace_back("command", "run");
    meta.emplace_back("seed", std::to_string(s.episode.seed));
    meta.emplace_back("csv", "trajectory.csv");
    append_leg_meta(meta, "", log, st);
    if (s.episode.mode == ControllerMode::safe && s.loop.lambda > 0) {
        const SafetyCertificate cert =
            run_certificate(s, log.summary.w_bar, cfg.get_int("verify.samples"));
        append_certificate_meta(meta, cert, monitor_barrier_bound(log, cert));
    }
    meta.emplace_back("start", start);
    meta.emplace_back("end", iso8601_utc());

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    {
        std::ostringstream os;
        write_trajectory_csv(log, os);
        atomic_write(dir / "trajectory.csv", os.str());
    }
    write_manifest(dir / "manifest.txt", cfg, meta);

    print_run_summary(std::cout, mode_name(s.episode.mode), st);
    std::cout << "wrote " << (dir / "trajectory.csv").string() << "\n";
    std::cout << "wrote " << (dir / "manifest.txt").string() << "\n";
    return st.violated ? 3 : 0;
}

int cmd_compare(const Config& cfg, const std::string& out_dir) {
    const std::string start = iso8601_utc();
    const Setup s = build_setup(cfg);
    EpisodeConfig safe_cfg = s.episode;
    safe_cfg.mode = ControllerMode::safe;
    EpisodeConfig base_cfg = s.episode;
    base_cfg.mode = ControllerMode::baseline_aci;
    const double baseline_t = cfg.get_double("compare.baseline_T");
    if (baseline_t > 0) base_cfg.horizon = baseline_t;

    const ComparisonReport rep = compare_runs(safe_cfg, base_cfg, s.loop);
    const Vec a = cfg.get_list("barrier.a");
    const RowStats safe_st = row_stats(rep.safe_log.records, a);
    const RowStats base_st = row_stats(rep.baseline_log.records, a);

    Meta meta;
    meta.emplace_back("command", "compare");
    meta.emplace_back("seed", std::to_string(s.episode.seed));
    meta.emplace_back("safe_csv", "safe.csv");
    meta.emplace_back("baseline_csv", "baseline_aci.csv");
    append_leg_meta(meta, "safe.", rep.safe_log, safe_st);
    append_leg_meta(meta, "baseline.", rep.baseline_log, base_st);
    if (s.loop.lambda > 0) {
        const SafetyCertificate cert = run_certificate(
            s, rep.safe_log.summary.w_bar, cfg.get_int("verify.samples"));
        append_certificate_meta(meta, cert,
                                monitor_barrier_bound(rep.safe_log, cert));
    }
    meta.emplace_back("start", start);
    meta.emplace_back("end", iso8601_utc());

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);
    {
        std::ostringstream os;
        write_trajectory_csv(rep.safe_log, os);
        atomic_write(dir / "safe.csv", os.str());
    }
    {
        std::ostringstream os;
        write_trajectory_csv(rep.baseline_log, os);
        atomic_write(dir / "baseline_aci.csv", os.str());
    }
    write_manifest(dir / "manifest.txt", cfg, meta);

    char line[160];
    std::printf("%-14s %8s %14s %12s %12s\n", "run", "rows", "violation_t",
                "max_ratio", "max_Bf");
    std::snprintf(line, sizeof line, "%-14s %8zu %14s %12s %12s\n", "safe",
                  safe_st.rows,
                  safe_st.violated ? fmt6(safe_st.first_violation_t).c_str()
                                   : "none",
                  fmt6(safe_st.max_ratio).c_str(), fmt6(safe_st.max_bf).c_str());
    std::fputs(line, stdout);
    std::snprintf(line, sizeof line, "%-14s %8zu %14s %12s %12s\n",
                  "baseline_aci", base_st.rows,
                  base_st.violated ? fmt6(base_st.first_violation_t).c_str()
                                   : "none",
                  fmt6(base_st.max_ratio).c_str(), fmt6(base_st.max_bf).c_str());
    std::fputs(line, stdout);
    std::cout << "wrote " << (dir / "safe.csv").string() << "\n";
    std::cout << "wrote " << (dir / "baseline_aci.csv").string() << "\n";
    std::cout << "wrote " << (dir / "manifest.txt").string() << "\n";
    return safe_st.violated ? 3 : 0;
}

int cmd_verify(const Config& cfg) {
    const Setup s = build_setup(cfg);
    const long samples = cfg.get_int("verify.samples");
    const ConstructionReport rep =
        verify_construction(*s.loop.barrier, samples, s.episode.seed);
    std::cout << "construction: gamma " << fmt6(s.loop.barrier->gamma())
              << ", worst B/|grad B| " << fmt6(rep.worst_ratio) << " over "
              << rep.samples << " samples -> "
              << (rep.holds ? "holds" : "FAILS") << "\n";

    Rng rng(s.episode.seed);
    const std::shared_ptr<const Basis> basis = s.loop.basis_factory(rng);
    const double w_bar = resolve_actor_radius(s.loop.w_bar, basis->features());
    const SafetyCertificate cert =
        compute_certificate(*s.loop.barrier, s.loop.model, s.loop.cost, *basis,
                            w_bar, s.loop.lambda, samples, s.episode.x0,
                            s.episode.seed);
    std::cout << "certificate (" << cert.samples << " samples):\n";
    std::cout << "  f_bar " << fmt6(cert.f_bar) << ", phi_d_bar "
              << fmt6(cert.phi_d_bar) << ", rg_bar " << fmt6(cert.rg_bar)
              << ", rg_min " << fmt6(cert.rg_min) << "\n";
    std::cout << "  b_bar_d " << fmt6(cert.b_bar_d) << "\n";
    std::cout << "  Bf(x0) " << fmt6(cert.bf_x0) << ", bound "
              << fmt6(cert.bound) << "\n";
    return rep.holds ? 0 : 5;
}

int cmd_sweep(const Config& cfg, const std::string& out_dir, int jobs) {
    if (jobs < 1) throw ConfigError("--jobs: must be at least 1");
    const Setup s = build_setup(cfg);
    const long count = cfg.get_int("sweep.seeds");
    if (count < 1) throw ConfigError("sweep.seeds: need at least 1");
    const std::uint64_t base_seed = s.episode.seed;
    const double baseline_t = cfg.get_double("compare.baseline_T");
    const Vec a = cfg.get_list("barrier.a");
    const long cert_samples = cfg.get_int("verify.samples");

    struct SeedResult {
        RowStats safe_st;
        RowStats base_st;
        int code = 0;  // 0 ok, 2/4 per exit-code table
        std::string error;
    };
    std::vector<SeedResult> results(count);
    std::atomic<long> next{0};

    fs::create_directories(out_dir);
    const fs::path dir(out_dir);

    auto worker = [&]() {
        for (;;) {
            const long k = next.fetch_add(1);
            if (k >= count) return;
            SeedResult& res = results[k];
            try {
                const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
                const std::string start = iso8601_utc();
                EpisodeConfig safe_cfg = s.episode;
                safe_cfg.mode = ControllerMode::safe;
                safe_cfg.seed = seed;
                EpisodeConfig base_cfg = s.episode;
                base_cfg.mode = ControllerMode::baseline_aci;
                base_cfg.seed = seed;
                if (baseline_t > 0) base_cfg.horizon = baseline_t;

                const ComparisonReport rep = compare_runs(safe_cfg, base_cfg, s.loop);
                res.safe_st = row_stats(rep.safe_log.records, a);
                res.base_st = row_stats(rep.baseline_log.records, a);

                const fs::path seed_dir = dir / ("seed_" + std::to_string(seed));
                fs::create_directories(seed_dir);
                {
                    std::ostringstream os;
                    write_trajectory_csv(rep.safe_log, os);
                    atomic_write(seed_dir / "safe.csv", os.str());
                }
                {
                    std::ostringstream os;
                    write_trajectory_csv(rep.baseline_log, os);
                    atomic_write(seed_dir / "baseline_aci.csv", os.str());
                }
                Config per_seed = cfg;
                per_seed.set("episode.seed", std::to_string(seed));
                Meta meta;
                meta.emplace_back("command", "compare");
                meta.emplace_back("seed", std::to_string(seed));
                meta.emplace_back("safe_csv", "safe.csv");
                meta.emplace_back("baseline_csv", "baseline_aci.csv");
                append_leg_meta(meta, "safe.", rep.safe_log, res.safe_st);
                append_leg_meta(meta, "baseline.", rep.baseline_log, res.base_st);
                if (s.loop.lambda > 0) {
                    Setup per = s;
                    per.episode.seed = seed;
                    const SafetyCertificate cert = run_certificate(
                        per, rep.safe_log.summary.w_bar, cert_samples);
                    append_certificate_meta(
                        meta, cert, monitor_barrier_bound(rep.safe_log, cert));
                }
                meta.emplace_back("start", start);
                meta.emplace_back("end", iso8601_utc());
                write_manifest(seed_dir / "manifest.txt", per_seed, meta);
            } catch (const ConfigError& e) {
                res.code = 2;
                res.error = e.what();
            } catch (const NumericError& e) {
                res.code = 4;
                res.error = e.what();
            }
        }
    };

    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        const long nthreads = std::min<long>(jobs, count);
        pool.reserve(nthreads);
        for (long i = 0; i < nthreads; ++i) pool.emplace_back(worker);
        for (std::thread& th : pool) th.join();
    }

    std::printf("%-6s %16s %20s %16s %20s\n", "seed", "safe_violation",
                "baseline_violation", "safe_max_ratio", "baseline_max_ratio");
    std::ostringstream table;
    table << "seed,safe_violation_t,baseline_violation_t,safe_max_ratio,"
             "baseline_max_ratio,safe_rows,baseline_rows\n";
    int exit_code = 0;
    bool any_numeric = false, any_config = false, any_safe_violation = false;
    for (long k = 0; k < count; ++k) {
        const SeedResult& res = results[k];
        const std::uint64_t seed = base_seed + static_cast<std::uint64_t>(k);
        if (res.code != 0) {
            std::printf("%-6llu error: %s\n",
                        static_cast<unsigned long long>(seed), res.error.c_str());
            (res.code == 2 ? any_config : any_numeric) = true;
            continue;
        }
        std::printf("%-6llu %16s %20s %16s %20s\n",
                    static_cast<unsigned long long>(seed),
                    violation_str(res.safe_st).c_str(),
                    violation_str(res.base_st).c_str(),
                    fmt6(res.safe_st.max_ratio).c_str(),
                    fmt6(res.base_st.max_ratio).c_str());
        table << seed << ',' << fmtg(res.safe_st.first_violation_t) << ','
              << fmtg(res.base_st.first_violation_t) << ','
              << fmtg(res.safe_st.max_ratio) << ','
              << fmtg(res.base_st.max_ratio) << ',' << res.safe_st.rows << ','
              << res.base_st.rows << "\n";
        if (res.safe_st.violated) any_safe_violation = true;
    }
    atomic_write(dir / "results.csv", table.str());
    std::cout << "wrote " << (dir / "results.csv").string() << "\n";
    if (any_config)
        exit_code = 2;
    else if (any_numeric)
        exit_code = 4;
    else if (any_safe_violation)
        exit_code = 3;
    return exit_code;
}

int cli_main(const CliOptions& opt) {
    try {
        const Config cfg = resolve_config(opt);
        if (opt.command == "run") return cmd_run(cfg, opt.out_dir);
        if (opt.command == "compare") return cmd_compare(cfg, opt.out_dir);
        if (opt.command == "verify") return cmd_verify(cfg);
        if (opt.command == "sweep") return cmd_sweep(cfg, opt.out_dir, opt.jobs);
        throw ConfigError("unknown command '" + opt.command + "'");
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const NumericError& e) {
        std::cerr << "numeric error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}

}  // namespace safeaci
