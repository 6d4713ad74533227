#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ddm/grid.hpp"
#include "ddm/hyperstrong.hpp"
#include "ddm/io.hpp"
#include "ddm/ionization.hpp"
#include "ddm/landau.hpp"
#include "ddm/meanfield.hpp"
#include "ddm/scf.hpp"

namespace {

using namespace ddm;

const char* kJsonOnly = "json";

void require_positive(double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
        throw std::invalid_argument(std::string(field) + " must be positive and finite");
}

double to_double(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != text.size())
        throw std::invalid_argument("config key '" + key + "': not a number: '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text) {
    std::size_t pos = 0;
    long v = 0;
    try {
        v = std::stol(text, &pos);
    } catch (const std::exception&) {
        pos = std::string::npos;
    }
    if (pos != text.size())
        throw std::invalid_argument("config key '" + key + "': not an integer: '" + text + "'");
    return static_cast<int>(v);
}

// Config-file values fill in whatever the command line left untouched;
// foreign [section] keys are ignored, unknown keys in scope are an error.
struct ConfigMerge {
    std::map<std::string, std::string> cfg;
    std::string cmd;
    std::set<std::string> consumed;

    const std::string* lookup(const std::string& key) {
        const std::string scoped = cmd + "." + key;
        auto it = cfg.find(scoped);
        if (it != cfg.end()) {
            consumed.insert(scoped);
            return &it->second;
        }
        it = cfg.find(key);
        if (it != cfg.end()) {
            consumed.insert(key);
            return &it->second;
        }
        return nullptr;
    }
    bool apply(const CLI::Option* opt, const std::string& key, double& target) {
        if (opt->count() > 0) return true;
        if (const std::string* v = lookup(key)) {
            target = to_double(key, *v);
            return true;
        }
        return false;
    }
    bool apply(const CLI::Option* opt, const std::string& key, int& target) {
        if (opt->count() > 0) return true;
        if (const std::string* v = lookup(key)) {
            target = to_int(key, *v);
            return true;
        }
        return false;
    }
    bool apply(const CLI::Option* opt, const std::string& key, std::string& target) {
        if (opt->count() > 0) return true;
        if (const std::string* v = lookup(key)) {
            target = *v;
            return true;
        }
        return false;
    }
    void finish() const {
        for (const auto& [k, v] : cfg) {
            if (consumed.count(k)) continue;
            const std::size_t dot = k.find('.');
            if (dot != std::string::npos && k.substr(0, dot) != cmd) continue;
            throw std::invalid_argument("unknown config key: " + k);
        }
    }
};

struct Common {
    std::string config_path, out_path, cache_dir;
    std::string format = "json";
    double energy_tol = 1e-9;
    double density_tol = 1e-7;
    int max_iter = 500;
    int eigen_count = 0;
    double grid_l = 0.0;
    int grid_n = 0;
    int threads = 0;
    bool grid_l_set = false, grid_n_set = false;

    CLI::Option *o_config = nullptr, *o_out = nullptr, *o_cache = nullptr, *o_format = nullptr;
    CLI::Option *o_etol = nullptr, *o_dtol = nullptr, *o_iter = nullptr, *o_eig = nullptr;
    CLI::Option *o_gl = nullptr, *o_gn = nullptr, *o_threads = nullptr;

    void attach(CLI::App* sub) {
        o_config = sub->add_option("--config", config_path,
                                   "key = value config file; [command] sections scope keys");
        o_out = sub->add_option("--out", out_path, "output path (default: stdout)");
        o_format = sub->add_option("--format", format, "output format: json or csv");
        o_cache = sub->add_option("--cache-dir", cache_dir, "potential-table cache directory")
                      ->envname("DDM_CACHE_DIR");
        o_etol = sub->add_option("--energy-tol", energy_tol, "SCF relative energy tolerance");
        o_dtol = sub->add_option("--density-tol", density_tol, "SCF density L1 tolerance");
        o_iter = sub->add_option("--max-iter", max_iter, "SCF iteration cap");
        o_eig = sub->add_option("--eigen-count", eigen_count, "eigenpairs per channel (0 = auto)");
        o_gl = sub->add_option("--grid-l", grid_l, "explicit grid half-length");
        o_gn = sub->add_option("--grid-n", grid_n, "explicit grid node count (odd, >= 33)");
        o_threads = sub->add_option("--threads", threads,
                                    "worker threads for sweeps and channel solves (0 = auto)");
    }

    ConfigMerge merge(const std::string& cmd) {
        ConfigMerge m;
        m.cmd = cmd;
        if (o_config->count() > 0) m.cfg = parse_config_file(config_path);
        m.apply(o_out, "out", out_path);
        m.apply(o_format, "format", format);
        m.apply(o_cache, "cache_dir", cache_dir);
        m.apply(o_etol, "energy_tol", energy_tol);
        m.apply(o_dtol, "density_tol", density_tol);
        m.apply(o_iter, "max_iter", max_iter);
        m.apply(o_eig, "eigen_count", eigen_count);
        grid_l_set = m.apply(o_gl, "grid_l", grid_l);
        grid_n_set = m.apply(o_gn, "grid_n", grid_n);
        m.apply(o_threads, "threads", threads);
        return m;
    }

    ScfConfig scf() const {
        if (format != "json" && format != "csv")
            throw std::invalid_argument("format must be json or csv");
        require_positive(energy_tol, "energy-tol");
        require_positive(density_tol, "density-tol");
        if (max_iter < 1) throw std::invalid_argument("max-iter must be at least 1");
        if (eigen_count < 0) throw std::invalid_argument("eigen-count must be nonnegative");
        if (grid_l_set != grid_n_set)
            throw std::invalid_argument("grid-l and grid-n must be given together");
        ScfConfig cfg;
        cfg.energy_tol = energy_tol;
        cfg.density_tol = density_tol;
        cfg.max_iter = max_iter;
        cfg.eigen_count = eigen_count;
        cfg.threads = threads;
        cfg.cache_dir = cache_dir;
        if (grid_l_set) {
            require_positive(grid_l, "grid-l");
            ZGrid probe(grid_l, grid_n);  // validates; throws naming the problem
            cfg.grid.automatic = false;
            cfg.grid.half_length = grid_l;
            cfg.grid.n = grid_n;
        }
        return cfg;
    }

    std::map<std::string, std::string> echo(const std::string& cmd) const {
        std::map<std::string, std::string> e;
        e["command"] = cmd;
        e["format"] = format;
        e["cache_dir"] = cache_dir;
        e["energy_tol"] = format_double(energy_tol);
        e["density_tol"] = format_double(density_tol);
        e["max_iter"] = std::to_string(max_iter);
        e["eigen_count"] = std::to_string(eigen_count);
        if (grid_l_set) {
            e["grid_l"] = format_double(grid_l);
            e["grid_n"] = std::to_string(grid_n);
        }
        return e;
    }

    int resolve_threads(int count) const {
        if (threads > 0) return std::min(threads, count);
        const int hw = static_cast<int>(std::thread::hardware_concurrency());
        return std::max(1, std::min({count, hw > 0 ? hw : 1, 8}));
    }
};

std::string meta_json(double wall_seconds) {
    std::time_t now = std::time(nullptr);
    char buf[32] = "unknown";
    if (std::tm* tm = std::gmtime(&now)) std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", tm);
    return std::string("{\"wall_time_seconds\": ") + format_double(wall_seconds) +
           ", \"timestamp_utc\": \"" + buf + "\"}";
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::invalid_argument("cannot open output path: " + path);
    out << content;
}

std::string num_array(const std::vector<double>& v) {
    std::string s = "[";
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ", ";
        s += format_double(v[i]);
    }
    return s + "]";
}

std::string occupations_summary(const SolveReport& r) {
    std::string s;
    for (std::size_t m = 0; m < r.channels.size(); ++m) {
        if (m) s += ';';
        double f = 0.0;
        for (double fi : r.channels[m].occupations) f += fi;
        s += format_double(f);
    }
    return s;
}

std::string report_json(const SolveReport& r) {
    std::string s = "{\n";
    s += "\"N\": " + format_double(r.N) + ", \"Z\": " + format_double(r.Z) +
         ", \"B\": " + format_double(r.B) + ",\n";
    s += "\"energy\": {\"kinetic\": " + format_double(r.energy.kinetic) +
         ", \"attraction\": " + format_double(r.energy.attraction) +
         ", \"direct\": " + format_double(r.energy.direct) +
         ", \"total\": " + format_double(r.energy.total) + "},\n";
    s += "\"mu\": " + format_double(r.mu) + ",\n";
    s += "\"filled\": " + format_double(r.filled) + ",\n";
    s += "\"iterations\": " + std::to_string(r.iterations) + ",\n";
    s += std::string("\"converged\": ") + (r.converged ? "true" : "false") + ",\n";
    s += "\"energy_residual\": " + format_double(r.energy_residual) + ",\n";
    s += "\"density_residual\": " + format_double(r.density_residual) + ",\n";
    s += "\"grid\": {\"half_length\": " + format_double(r.grid.half_length) +
         ", \"n\": " + std::to_string(r.grid.n) + "},\n";
    s += "\"dEdZ\": " + format_double(r.dEdZ) + ",\n";
    s += "\"kinetic_check\": " + format_double(r.kinetic_check) + ",\n";
    s += "\"richardson\": " + format_double(r.richardson) + ",\n";
    s += "\"occupations\": [";
    for (std::size_t m = 0; m < r.channels.size(); ++m) {
        if (m) s += ", ";
        s += num_array(r.channels[m].occupations);
    }
    s += "],\n\"mu_table\": [";
    for (std::size_t m = 0; m < r.mu_table.size(); ++m) {
        if (m) s += ", ";
        s += num_array(r.mu_table[m]);
    }
    s += "]\n}";
    return s;
}

std::string scan_row_json(const SolveReport& r, const std::string& error) {
    if (!error.empty()) return "{\"error\": \"" + json_escape(error) + "\"}";
    std::string s = "{\"N\": " + format_double(r.N) + ", \"Z\": " + format_double(r.Z) +
                    ", \"B\": " + format_double(r.B);
    s += ", \"kinetic\": " + format_double(r.energy.kinetic);
    s += ", \"attraction\": " + format_double(r.energy.attraction);
    s += ", \"direct\": " + format_double(r.energy.direct);
    s += ", \"total\": " + format_double(r.energy.total);
    s += ", \"mu\": " + format_double(r.mu);
    s += ", \"filled\": " + format_double(r.filled);
    s += ", \"iterations\": " + std::to_string(r.iterations);
    s += std::string(", \"converged\": ") + (r.converged ? "true" : "false");
    s += ", \"occupations\": \"" + occupations_summary(r) + "\"";
    s += ", \"error\": \"\"}";
    return s;
}

std::vector<std::string> scan_row_csv(const SolveReport& r, const std::string& error) {
    if (!error.empty()) return {"", "", "", "", "", "", "", "", "", "", "", "", error};
    return {format_double(r.N),
            format_double(r.Z),
            format_double(r.B),
            format_double(r.energy.kinetic),
            format_double(r.energy.attraction),
            format_double(r.energy.direct),
            format_double(r.energy.total),
            format_double(r.mu),
            format_double(r.filled),
            std::to_string(r.iterations),
            r.converged ? "true" : "false",
            occupations_summary(r),
            error};
}

// ---------------------------------------------------------------- solve ----

int run_solve(Common& c, double N, double Z, double B, const std::string& density_csv,
              const std::string& density3d_csv, int r_points) {
    if (c.format != kJsonOnly) throw std::invalid_argument("format: solve emits json");
    require_positive(N, "n");
    require_positive(Z, "z");
    require_positive(B, "b");
    const ScfConfig cfg = c.scf();

    auto echo = c.echo("solve");
    echo["n"] = format_double(N);
    echo["z"] = format_double(Z);
    echo["b"] = format_double(B);

    const auto t0 = std::chrono::steady_clock::now();
    SolveReport rep = scf_solve(N, Z, B, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const int max_m = std::max(0, static_cast<int>(std::ceil(N)) - 1);
    std::string payload = "{\n";
    payload += "\"version\": \"" + std::string(kArtifactVersion) + "\",\n";
    payload += "\"config\": " + config_echo_json(echo) + ",\n";
    payload += "\"cache_key\": \"" + table_cache_key(max_m, B, rep.grid) + "\",\n";
    payload += "\"report\": " + report_json(rep) + "\n}";
    write_output(c.out_path, run_record(meta_json(wall), payload));

    if (!density_csv.empty()) {
        std::string csv = "m,z,rho\n";
        for (int m = 0; m < rep.density.channels(); ++m)
            for (int j = 0; j < rep.grid.n; ++j)
                csv += csv_row({std::to_string(m), format_double(rep.grid.node(j)),
                                format_double(rep.density.rho[m][j])});
        write_output(density_csv, csv);
    }
    if (!density3d_csv.empty()) {
        const int nr = std::max(2, r_points);
        const double rmax = 4.0 * std::sqrt(2.0 * rep.density.channels() / B);
        const int stride = std::max(1, (rep.grid.n - 1) / 512);
        std::vector<std::pair<double, double>> pts;
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < rep.grid.n; j += stride)
                pts.emplace_back(rmax * i / (nr - 1), rep.grid.node(j));
        const std::vector<double> vals = density3d(rep.density, B, rep.grid, pts);
        std::string csv = "r,z,rho3d\n";
        for (std::size_t i = 0; i < pts.size(); ++i)
            csv += csv_row({format_double(pts[i].first), format_double(pts[i].second),
                            format_double(vals[i])});
        write_output(density3d_csv, csv);
    }
    if (!rep.converged) {
        std::cerr << "scf did not converge within " << cfg.max_iter
                  << " iterations (energy residual " << rep.energy_residual << ", density residual "
                  << rep.density_residual << ")\n";
        return 2;
    }
    return 0;
}

// ----------------------------------------------------------------- scan ----

int run_scan(Common& c, double N, double Z, double B, const std::string& n_values,
             const std::string& z_values, const std::string& b_values) {
    const int given = (!n_values.empty()) + (!z_values.empty()) + (!b_values.empty());
    if (given != 1)
        throw std::invalid_argument(
            "scan needs exactly one of --n-values, --z-values, --b-values");
    const ScfConfig cfg = c.scf();

    std::string axis = !n_values.empty() ? "n" : (!z_values.empty() ? "z" : "b");
    std::vector<double> values =
        parse_double_list(!n_values.empty() ? n_values : (!z_values.empty() ? z_values : b_values));
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!(values[i] > 0.0))
            throw std::invalid_argument(axis + "-values must be positive");
        if (i > 0 && !(values[i] > values[i - 1]))
            throw std::invalid_argument(axis + "-values must be strictly increasing");
    }
    if (axis != "n") require_positive(N, "n");
    if (axis != "z") require_positive(Z, "z");
    if (axis != "b") require_positive(B, "b");

    auto echo = c.echo("scan");
    if (axis != "n") echo["n"] = format_double(N);
    if (axis != "z") echo["z"] = format_double(Z);
    if (axis != "b") echo["b"] = format_double(B);
    echo[axis + "_values"] = [&] {
        std::string s;
        for (std::size_t i = 0; i < values.size(); ++i)
            s += (i ? "," : "") + format_double(values[i]);
        return s;
    }();
    echo["threads"] = std::to_string(c.threads);

    const int count = static_cast<int>(values.size());
    std::vector<SolveReport> reports(count);
    std::vector<std::string> errors(count);

    const auto t0 = std::chrono::steady_clock::now();
    if (axis == "n") {
        // shared grid + warm starts exploit monotone filling along the scan
        try {
            std::vector<SolveReport> curve = energy_curve(Z, B, values, cfg);
            for (int i = 0; i < count; ++i) reports[i] = std::move(curve[i]);
        } catch (const std::exception&) {
            for (int i = 0; i < count; ++i) {
                try {
                    reports[i] = scf_solve(values[i], Z, B, cfg);
                } catch (const std::exception& e) {
                    errors[i] = e.what();
                }
            }
        }
    } else {
        parallel_for_ordered(count, c.resolve_threads(count), [&](int i) {
            try {
                reports[i] = (axis == "z") ? scf_solve(N, values[i], B, cfg)
                                           : scf_solve(N, Z, values[i], cfg);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        });
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (c.format == "csv") {
        std::string csv = "n,z,b,kinetic,attraction,direct,total,mu,filled,iterations,converged,occupations,error\n";
        for (int i = 0; i < count; ++i) csv += csv_row(scan_row_csv(reports[i], errors[i]));
        write_output(c.out_path, csv);
    } else {
        std::string payload = "{\n\"version\": \"" + std::string(kArtifactVersion) + "\",\n";
        payload += "\"config\": " + config_echo_json(echo) + ",\n\"rows\": [\n";
        for (int i = 0; i < count; ++i) {
            payload += scan_row_json(reports[i], errors[i]);
            payload += (i + 1 < count) ? ",\n" : "\n";
        }
        payload += "]\n}";
        write_output(c.out_path, run_record(meta_json(wall), payload));
    }
    return 0;
}

// ------------------------------------------------------------- hs-limit ----

int run_hs_limit(Common& c, double lambda, double Z, const std::string& etas) {
    require_positive(lambda, "lambda");
    require_positive(Z, "z");
    const ScfConfig cfg = c.scf();
    std::vector<double> ev = parse_double_list(etas);

    auto echo = c.echo("hs-limit");
    echo["lambda"] = format_double(lambda);
    echo["z"] = format_double(Z);
    echo["etas"] = [&] {
        std::string s;
        for (std::size_t i = 0; i < ev.size(); ++i) s += (i ? "," : "") + format_double(ev[i]);
        return s;
    }();
    echo["threads"] = std::to_string(c.threads);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<HsStudyRow> rows =
        hs_convergence_study(lambda, Z, ev, cfg, c.resolve_threads(static_cast<int>(ev.size())));
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (c.format == "csv") {
        std::string csv = "eta,energy,r,gap,converged\n";
        for (const HsStudyRow& row : rows)
            csv += csv_row({format_double(row.eta), format_double(row.energy),
                            format_double(row.r), format_double(row.gap),
                            row.converged ? "true" : "false"});
        write_output(c.out_path, csv);
    } else {
        std::string payload = "{\n\"version\": \"" + std::string(kArtifactVersion) + "\",\n";
        payload += "\"config\": " + config_echo_json(echo) + ",\n";
        payload += "\"e_hs\": " + format_double(hs_energy(lambda)) + ",\n\"rows\": [\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            payload += "{\"eta\": " + format_double(rows[i].eta) +
                       ", \"energy\": " + format_double(rows[i].energy) +
                       ", \"r\": " + format_double(rows[i].r) +
                       ", \"gap\": " + format_double(rows[i].gap) + ", \"converged\": " +
                       (rows[i].converged ? "true" : "false") + "}";
            payload += (i + 1 < rows.size()) ? ",\n" : "\n";
        }
        payload += "]\n}";
        write_output(c.out_path, run_record(meta_json(wall), payload));
    }
    return 0;
}

// ---------------------------------------------------------------- ncrit ----

int run_ncrit(Common& c, double Z, double B, double tol_n) {
    require_positive(Z, "z");
    require_positive(B, "b");
    const ScfConfig cfg = c.scf();
    if (tol_n == 0.0) tol_n = 1e-3 * Z;
    require_positive(tol_n, "tol-n");

    auto echo = c.echo("ncrit");
    echo["z"] = format_double(Z);
    echo["b"] = format_double(B);
    echo["tol_n"] = format_double(tol_n);

    const auto t0 = std::chrono::steady_clock::now();
    NcritReport rep = find_ncrit(Z, B, tol_n, cfg);
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (c.format == "csv") {
        std::string csv = "n,mu\n";
        for (const auto& [n, mu] : rep.mu_trace)
            csv += csv_row({format_double(n), format_double(mu)});
        write_output(c.out_path, csv);
    } else {
        const int max_m = std::max(0, static_cast<int>(std::ceil(rep.n_critical)) - 1);
        std::string payload = "{\n\"version\": \"" + std::string(kArtifactVersion) + "\",\n";
        payload += "\"config\": " + config_echo_json(echo) + ",\n";
        payload += "\"cache_key\": \"" + table_cache_key(max_m, B, rep.at_ncrit.grid) + "\",\n";
        payload += "\"n_critical\": " + format_double(rep.n_critical) + ",\n";
        payload += "\"lower_bound\": " + format_double(rep.lower_bound) + ",\n";
        payload += "\"upper_bound\": " + format_double(rep.upper_bound) + ",\n";
        payload += std::string("\"rank_flag\": ") + (rep.rank_flag ? "true" : "false") + ",\n";
        payload += "\"energy_at_ncrit\": " + format_double(rep.at_ncrit.energy.total) + ",\n";
        payload += "\"mu_at_ncrit\": " + format_double(rep.at_ncrit.mu) + ",\n";
        payload += "\"dEdZ\": " + format_double(rep.at_ncrit.dEdZ) + ",\n";
        payload += "\"mu_trace\": [";
        for (std::size_t i = 0; i < rep.mu_trace.size(); ++i) {
            if (i) payload += ", ";
            payload += "[" + format_double(rep.mu_trace[i].first) + ", " +
                       format_double(rep.mu_trace[i].second) + "]";
        }
        payload += "]\n}";
        write_output(c.out_path, run_record(meta_json(wall), payload));
    }
    return 0;
}

// ------------------------------------------------------------- vm-table ----

int run_vm_table(Common& c, double B, int max_m, double zmax, int points) {
    require_positive(B, "b");
    require_positive(zmax, "zmax");
    if (max_m < 0) throw std::invalid_argument("max-m must be nonnegative");
    if (points < 2) throw std::invalid_argument("points must be at least 2");

    auto echo = c.echo("vm-table");
    echo["b"] = format_double(B);
    echo["max_m"] = std::to_string(max_m);
    echo["zmax"] = format_double(zmax);
    echo["points"] = std::to_string(points);

    const auto t0 = std::chrono::steady_clock::now();
    std::vector<std::vector<double>> rows(points);
    for (int i = 0; i < points; ++i) {
        const double z = zmax * i / (points - 1);
        rows[i].push_back(z);
        for (int m = 0; m <= max_m; ++m) rows[i].push_back(eval_vm(m, B, z));
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::vector<std::string> header{"z"};
    for (int m = 0; m <= max_m; ++m) header.push_back("v" + std::to_string(m));

    if (c.format == "csv") {
        std::string csv = csv_row(header);
        for (const auto& row : rows) {
            std::vector<std::string> cells;
            for (double v : row) cells.push_back(format_double(v));
            csv += csv_row(cells);
        }
        write_output(c.out_path, csv);
    } else {
        std::string payload = "{\n\"version\": \"" + std::string(kArtifactVersion) + "\",\n";
        payload += "\"config\": " + config_echo_json(echo) + ",\n\"columns\": [";
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (i) payload += ", ";
            payload += "\"" + header[i] + "\"";
        }
        payload += "],\n\"rows\": [\n";
        for (std::size_t i = 0; i < rows.size(); ++i) {
            payload += num_array(rows[i]);
            payload += (i + 1 < rows.size()) ? ",\n" : "\n";
        }
        payload += "]\n}";
        write_output(c.out_path, run_record(meta_json(wall), payload));
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Discrete density matrix (DDM) solver for atoms in strong magnetic fields"};
    app.require_subcommand(1);

    Common c_solve, c_scan, c_hs, c_ncrit, c_vm;

    double s_n = 0, s_z = 0, s_b = 0;
    std::string s_density_csv, s_density3d_csv;
    int s_rpoints = 65;
    CLI::App* solve = app.add_subcommand("solve", "solve one (N, Z, B) problem");
    solve->add_option("--n", s_n, "particle number N");
    solve->add_option("--z", s_z, "nuclear charge Z");
    solve->add_option("--b", s_b, "magnetic field strength B");
    solve->add_option("--density-csv", s_density_csv, "write channel densities (m, z, rho)");
    solve->add_option("--density3d-csv", s_density3d_csv, "write 3D density raster (r, z, rho3d)");
    solve->add_option("--r-points", s_rpoints, "radial raster size for --density3d-csv");
    c_solve.attach(solve);

    double sc_n = 0, sc_z = 0, sc_b = 0;
    std::string sc_nv, sc_zv, sc_bv;
    CLI::App* scan = app.add_subcommand("scan", "sweep one parameter axis");
    scan->add_option("--n", sc_n, "fixed N (for z/b sweeps)");
    scan->add_option("--z", sc_z, "fixed Z (for n/b sweeps)");
    scan->add_option("--b", sc_b, "fixed B (for n/z sweeps)");
    scan->add_option("--n-values", sc_nv, "comma-separated increasing N values");
    scan->add_option("--z-values", sc_zv, "comma-separated increasing Z values");
    scan->add_option("--b-values", sc_bv, "comma-separated increasing B values");
    c_scan.attach(scan);

    double h_lambda = 0, h_z = 0;
    std::string h_etas;
    CLI::App* hs = app.add_subcommand("hs-limit", "hyper-strong convergence study");
    hs->add_option("--lambda", h_lambda, "lambda = N/Z");
    hs->add_option("--z", h_z, "nuclear charge Z");
    hs->add_option("--etas", h_etas, "comma-separated increasing eta = B/Z^3 values");
    c_hs.attach(hs);

    double n_z = 0, n_b = 0, n_tol = 0;
    CLI::App* ncrit = app.add_subcommand("ncrit", "critical particle number");
    ncrit->add_option("--z", n_z, "nuclear charge Z");
    ncrit->add_option("--b", n_b, "magnetic field strength B");
    ncrit->add_option("--tol-n", n_tol, "bisection width (default 1e-3 Z)");
    c_ncrit.attach(ncrit);

    double v_b = 0, v_zmax = 0;
    int v_maxm = 0, v_points = 0;
    CLI::App* vm = app.add_subcommand("vm-table", "tabulate the effective potentials V_m");
    vm->add_option("--b", v_b, "magnetic field strength B");
    vm->add_option("--max-m", v_maxm, "largest channel index");
    vm->add_option("--zmax", v_zmax, "table endpoint (z from 0 to zmax)");
    vm->add_option("--points", v_points, "number of rows");
    c_vm.attach(vm);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (app.got_subcommand(solve)) {
            ConfigMerge m = c_solve.merge("solve");
            m.apply(solve->get_option("--n"), "n", s_n);
            m.apply(solve->get_option("--z"), "z", s_z);
            m.apply(solve->get_option("--b"), "b", s_b);
            m.apply(solve->get_option("--density-csv"), "density_csv", s_density_csv);
            m.apply(solve->get_option("--density3d-csv"), "density3d_csv", s_density3d_csv);
            m.apply(solve->get_option("--r-points"), "r_points", s_rpoints);
            m.finish();
            return run_solve(c_solve, s_n, s_z, s_b, s_density_csv, s_density3d_csv, s_rpoints);
        }
        if (app.got_subcommand(scan)) {
            ConfigMerge m = c_scan.merge("scan");
            m.apply(scan->get_option("--n"), "n", sc_n);
            m.apply(scan->get_option("--z"), "z", sc_z);
            m.apply(scan->get_option("--b"), "b", sc_b);
            m.apply(scan->get_option("--n-values"), "n_values", sc_nv);
            m.apply(scan->get_option("--z-values"), "z_values", sc_zv);
            m.apply(scan->get_option("--b-values"), "b_values", sc_bv);
            m.finish();
            return run_scan(c_scan, sc_n, sc_z, sc_b, sc_nv, sc_zv, sc_bv);
        }
        if (app.got_subcommand(hs)) {
            ConfigMerge m = c_hs.merge("hs-limit");
            m.apply(hs->get_option("--lambda"), "lambda", h_lambda);
            m.apply(hs->get_option("--z"), "z", h_z);
            m.apply(hs->get_option("--etas"), "etas", h_etas);
            m.finish();
            return run_hs_limit(c_hs, h_lambda, h_z, h_etas);
        }
        if (app.got_subcommand(ncrit)) {
            ConfigMerge m = c_ncrit.merge("ncrit");
            m.apply(ncrit->get_option("--z"), "z", n_z);
            m.apply(ncrit->get_option("--b"), "b", n_b);
            m.apply(ncrit->get_option("--tol-n"), "tol_n", n_tol);
            m.finish();
            return run_ncrit(c_ncrit, n_z, n_b, n_tol);
        }
        ConfigMerge m = c_vm.merge("vm-table");
        m.apply(vm->get_option("--b"), "b", v_b);
        m.apply(vm->get_option("--max-m"), "max_m", v_maxm);
        m.apply(vm->get_option("--zmax"), "zmax", v_zmax);
        m.apply(vm->get_option("--points"), "points", v_points);
        m.finish();
        return run_vm_table(c_vm, v_b, v_maxm, v_zmax, v_points);
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::length_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}
