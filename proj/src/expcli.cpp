#include "flowlab/expcli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <functional>
#include <set>

#include "flowlab/cocycle.hpp"
#include "flowlab/errors.hpp"
#include "flowlab/rng.hpp"
#include "flowlab/spectral.hpp"
#include "flowlab/twisted.hpp"

namespace flowlab {

std::vector<double> default_grid(double lo, double hi, int points) {
    std::vector<double> g(points);
    for (int i = 0; i < points; ++i)
        g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
    return g;
}

namespace {

constexpr const char* kArtifactVersion = "flowlab 1.0.0";

json grid_to_json(const std::vector<double>& g) { return json(g); }

std::vector<double> grid_from_json(const json& j, const char* name) {
    std::vector<double> out;
    if (j.is_array()) {
        out = j.get<std::vector<double>>();
    } else if (j.is_object()) {
        double lo = j.at("min").get<double>(), hi = j.at("max").get<double>();
        int n = j.at("points").get<int>();
        std::string scale = j.value("scale", "log");
        if (n < 1 || !(lo > 0 && hi > lo) || (scale != "log" && scale != "linear"))
            throw ConfigInvalid(std::string("bad grid spec: ") + name);
        for (int i = 0; i < n; ++i) {
            double f = n == 1 ? 0.0 : static_cast<double>(i) / (n - 1);
            out.push_back(scale == "log" ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f);
        }
    } else {
        throw ConfigInvalid(std::string("grid must be an array or a range object: ") + name);
    }
    return out;
}

const std::set<std::string> kKinds = {"stratum-info", "twisted-sweep", "kz-exponents",
                                      "gap-sweep",    "spectral",      "weakmix"};

std::uint64_t task_seed(std::uint64_t seed, std::uint64_t task) {
    Rng r(seed, 0xeeee);
    return r.split(task).next_u64();
}

}  // namespace

json ExperimentConfig::to_json() const {
    return json{{"version", version},
                {"kind", kind},
                {"stratum", stratum},
                {"permutation_top", permutation_top},
                {"permutation_bottom", permutation_bottom},
                {"seed", seed},
                {"surfaces", surfaces},
                {"observable", observable},
                {"lambda_grid", grid_to_json(lambda_grid)},
                {"T_grid", grid_to_json(T_grid)},
                {"r_grid", grid_to_json(r_grid)},
                {"samples", samples},
                {"time_samples", time_samples},
                {"zorich_steps", zorich_steps},
                {"paths", paths},
                {"exponents", exponents},
                {"out_dir", out_dir},
                {"threads", threads},
                {"format", format}};
}

ExperimentConfig ExperimentConfig::from_json(const json& j) {
    if (!j.is_object()) throw ConfigInvalid("config must be a JSON object");
    if (j.value("version", 0) != 1) throw ConfigInvalid("unsupported config version");
    if (!j.contains("seed")) throw ConfigInvalid("seed is mandatory");
    if (!j.contains("kind")) throw ConfigInvalid("kind is mandatory");
    static const std::set<std::string> known = {
        "version",     "kind",         "stratum",      "permutation_top",
        "permutation_bottom",          "seed",         "surfaces",
        "observable",  "lambda_grid",  "T_grid",       "r_grid",
        "samples",     "time_samples", "zorich_steps", "paths",
        "exponents",   "out_dir",      "threads",      "format"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.count(it.key())) throw ConfigInvalid("unknown config key: " + it.key());

    ExperimentConfig c;
    c.version = 1;
    c.kind = j.at("kind").get<std::string>();
    if (!kKinds.count(c.kind)) throw ConfigInvalid("unknown experiment kind: " + c.kind);
    c.stratum = j.value("stratum", c.stratum);
    c.permutation_top = j.value("permutation_top", std::string());
    c.permutation_bottom = j.value("permutation_bottom", std::string());
    c.seed = j.at("seed").get<std::uint64_t>();
    c.surfaces = j.value("surfaces", c.surfaces);
    c.observable = j.value("observable", c.observable);
    if (j.contains("lambda_grid")) c.lambda_grid = grid_from_json(j.at("lambda_grid"), "lambda_grid");
    if (j.contains("T_grid")) c.T_grid = grid_from_json(j.at("T_grid"), "T_grid");
    if (j.contains("r_grid")) c.r_grid = grid_from_json(j.at("r_grid"), "r_grid");
    c.samples = j.value("samples", c.samples);
    c.time_samples = j.value("time_samples", c.time_samples);
    c.zorich_steps = j.value("zorich_steps", c.zorich_steps);
    c.paths = j.value("paths", c.paths);
    c.exponents = j.value("exponents", c.exponents);
    c.out_dir = j.value("out_dir", c.out_dir);
    c.threads = j.value("threads", c.threads);
    c.format = j.value("format", c.format);
    if (c.format != "csv" && c.format != "json") throw ConfigInvalid("format must be csv|json");
    if (c.surfaces < 1 || c.samples < 1 || c.zorich_steps < 1 || c.paths < 1 || c.exponents < 1)
        throw ConfigInvalid("counts must be positive");
    return c;
}

Permutation config_permutation(const ExperimentConfig& c) {
    if (!c.permutation_top.empty() || !c.permutation_bottom.empty()) {
        if (c.permutation_top.empty() || c.permutation_bottom.empty())
            throw ConfigInvalid("both permutation rows are required");
        return Permutation::parse(c.permutation_top, c.permutation_bottom);
    }
    if (c.stratum == "H(2)") return Permutation::symmetric(4);
    if (c.stratum == "H(1,1)") return Permutation::symmetric(5);
    if (c.stratum == "torus") return Permutation::symmetric(2);
    throw ConfigInvalid("unknown stratum (use H(2), H(1,1), torus, or explicit rows): " +
                        c.stratum);
}

json RunManifest::to_json() const {
    json tj = json::array(), fj = json::array();
    for (const auto& t : tasks)
        tj.push_back(json{{"id", t.id}, {"name", t.name}, {"status", t.status}});
    for (const auto& f : files) fj.push_back(json{{"path", f.path}, {"digest", f.digest}});
    return json{{"config_hash", config_hash},
                {"artifact_version", artifact_version},
                {"wall_seconds", wall_seconds},
                {"tasks", tj},
                {"files", fj},
                {"all_ok", all_ok}};
}

namespace {

struct Emitter {
    const ExperimentConfig& cfg;
    RunManifest& manifest;

    void emit(const std::string& name, const std::string& bytes) {
        namespace fs = std::filesystem;
        fs::create_directories(cfg.out_dir);
        std::string path = (fs::path(cfg.out_dir) / name).string();
        write_file(path, bytes);
        manifest.files.push_back(FileEntry{name, digest_hex(bytes)});
    }
};

std::string csv_row(const std::vector<double>& vals) {
    std::string row;
    for (size_t i = 0; i < vals.size(); ++i) {
        if (i) row += ",";
        row += fmt17(vals[i]);
    }
    row += "\n";
    return row;
}

/// CSV or a JSON array of row objects, per the configured format.
std::string render_table(const ExperimentConfig& cfg, const std::vector<std::string>& columns,
                         const std::vector<std::vector<double>>& rows) {
    if (cfg.format == "csv") {
        std::string out;
        for (size_t i = 0; i < columns.size(); ++i) {
            if (i) out += ",";
            out += columns[i];
        }
        out += "\n";
        for (const auto& r : rows) out += csv_row(r);
        return out;
    }
    json arr = json::array();
    for (const auto& r : rows) {
        json obj;
        for (size_t i = 0; i < columns.size(); ++i) obj[columns[i]] = r[i];
        arr.push_back(obj);
    }
    return emit_json(arr);
}

std::string data_ext(const ExperimentConfig& cfg) { return cfg.format == "csv" ? "csv" : "json"; }

std::string plot_script(const std::string& kind, const std::string& datafile) {
    std::string s = "# gnuplot script generated by flowlab\n";
    s += "set datafile separator ','\n";
    s += "set logscale xy\n";
    if (kind == "twisted-sweep")
        s += "plot '" + datafile + "' every ::1 using 1:5 with lines title '|I(T)|'\n";
    else if (kind == "gap-sweep")
        s += "unset logscale y\nplot '" + datafile +
             "' every ::1 using 1:2 with linespoints title 'alpha_hat'\n";
    else if (kind == "spectral")
        s += "plot '" + datafile + "' every ::1 using 2:3 with linespoints title 'mass upper'\n";
    else if (kind == "weakmix")
        s += "plot '" + datafile + "' every ::1 using 1:2 with linespoints title 'decay'\n";
    else if (kind == "kz-exponents")
        s += "unset logscale\nplot '" + datafile +
             "' every ::1 using 1:2:3 with yerrorbars title 'exponent'\n";
    else
        s += "# nothing to plot for kind " + kind + "\n";
    return s;
}

using Rows = std::vector<std::vector<double>>;

struct TaskResult {
    Rows rows;
    json sidecar;
    std::string error;
};

void run_tasks(const ExperimentConfig& cfg, RunManifest& manifest, long n_tasks,
               const std::function<std::string(long)>& name,
               const std::function<TaskResult(long)>& work, Rows& all_rows, json& sidecars) {
    std::vector<TaskResult> results(n_tasks);
    par_for(Exec::openmp, cfg.threads, n_tasks, [&](std::ptrdiff_t i) {
        try {
            results[i] = work(i);
        } catch (const std::exception& e) {
            results[i].error = e.what();
        }
    });
    for (long i = 0; i < n_tasks; ++i) {
        TaskStatus st{static_cast<int>(i), name(i),
                      results[i].error.empty() ? "ok" : results[i].error};
        if (!results[i].error.empty()) manifest.all_ok = false;
        manifest.tasks.push_back(st);
        for (auto& r : results[i].rows) all_rows.push_back(std::move(r));
        if (!results[i].sidecar.is_null()) sidecars.push_back(results[i].sidecar);
    }
}

CellwiseObservable config_observable(const ExperimentConfig& cfg, const ZipperedRectangles& s,
                                     std::uint64_t sub) {
    if (cfg.observable == "zero-mean-cells")
        return CellwiseObservable::random_zero_mean_cells(s, task_seed(cfg.seed, 0xf00d + sub));
    if (cfg.observable == "harmonics")
        return CellwiseObservable::random_zero_mean_harmonics(
            s, task_seed(cfg.seed, 0xf00d + sub), 2, 2);
    throw ConfigInvalid("unknown observable kind: " + cfg.observable);
}

SurfacePoint config_start_point(const ZipperedRectangles& s, std::uint64_t seed) {
    Rng rng(seed, 0x57a7);
    for (int attempt = 0; attempt < 64; ++attempt) {
        SurfacePoint pt = s.base_point(rng.uniform() * s.iet().total_length());
        pt.y = rng.uniform() * s.heights()[pt.rectangle];
        double tol = 1e-9 * s.iet().total_length();
        if (pt.x > tol && pt.x < s.lengths()[pt.rectangle] - tol) return pt;
    }
    throw SingularityHit(0.0);
}

}  // namespace

RunManifest run_experiment(const ExperimentConfig& cfg) {
    auto t0 = std::chrono::steady_clock::now();
    RunManifest manifest;
    manifest.config_hash = cfg.hash();
    manifest.artifact_version = kArtifactVersion;
    Emitter out{cfg, manifest};

    const Permutation p = config_permutation(cfg);
    json sidecars = json::array();
    Rows rows;
    std::vector<std::string> columns;
    const std::string datafile = "data." + data_ext(cfg);

    if (cfg.kind == "stratum-info") {
        StratumInfo info = genus_and_stratum(p);
        json ij{{"d", p.size()},
                {"genus", info.genus},
                {"kappa", info.kappa},
                {"marked_points", info.marked_points},
                {"singularities", info.singularities},
                {"omega_rank", p.omega_rank()}};
        out.emit("stratum.json", emit_json(ij));
        manifest.tasks.push_back(TaskStatus{0, "stratum-info", "ok"});
    } else if (cfg.kind == "twisted-sweep") {
        if (cfg.lambda_grid.empty() || cfg.T_grid.size() < 8)
            throw ConfigInvalid("twisted-sweep needs lambda_grid and a T_grid with >= 8 points");
        columns = {"T", "lambda", "re", "im", "abs"};
        const long n_tasks = static_cast<long>(cfg.surfaces) * cfg.lambda_grid.size();
        run_tasks(
            cfg, manifest, n_tasks,
            [&](long i) {
                return "twisted-sweep s" + std::to_string(i / cfg.lambda_grid.size()) + " l" +
                       std::to_string(i % cfg.lambda_grid.size());
            },
            [&](long i) {
                long is = i / cfg.lambda_grid.size(), il = i % cfg.lambda_grid.size();
                double lambda = cfg.lambda_grid[il];
                ZipperedRectangles s = random_surface(p, task_seed(cfg.seed, is));
                CellwiseObservable f = config_observable(cfg, s, is);
                SurfacePoint x0 = config_start_point(s, task_seed(cfg.seed, 0xa0 + is));
                auto traces = sweep_trace(s, f, lambda, x0, cfg.T_grid);
                TaskResult res;
                for (const auto& tr : traces)
                    res.rows.push_back({tr.T, lambda, tr.value.real(), tr.value.imag(),
                                        std::abs(tr.value)});
                std::vector<double> mags;
                for (const auto& tr : traces) mags.push_back(std::abs(tr.value));
                ExponentFit fit = fit_exponent(cfg.T_grid, mags, true);
                res.sidecar = json{{"surface", is},
                                   {"lambda", lambda},
                                   {"surface_hash", digest_hex(emit_json(surface_to_json(s)))},
                                   {"observable_hash",
                                    digest_hex(emit_json(observable_to_json(f)))},
                                   {"exponent", fit.exponent},
                                   {"intercept", fit.intercept},
                                   {"r_squared", fit.r_squared}};
                return res;
            },
            rows, sidecars);
    } else if (cfg.kind == "kz-exponents") {
        columns = {"index", "exponent", "stderr", "n_paths", "n_zorich"};
        auto est = kz_exponents(p, cfg.paths, cfg.zorich_steps, cfg.exponents, cfg.seed,
                                Exec::openmp, cfg.threads);
        for (size_t j = 0; j < est.size(); ++j)
            rows.push_back({static_cast<double>(j + 1), est[j].value, est[j].stderr_,
                            static_cast<double>(cfg.paths), static_cast<double>(cfg.zorich_steps)});
        manifest.tasks.push_back(TaskStatus{0, "kz-exponents", "ok"});
    } else if (cfg.kind == "gap-sweep") {
        if (cfg.lambda_grid.empty()) throw ConfigInvalid("gap-sweep needs lambda_grid");
        columns = {"lambda", "alpha_hat", "stderr", "n_steps"};
        ZipperedRectangles s = random_surface(p, task_seed(cfg.seed, 0));
        auto est = gap_sweep(p, s.lengths(), cfg.lambda_grid, cfg.zorich_steps, s.heights(),
                             Exec::openmp, cfg.threads);
        for (const auto& e : est)
            rows.push_back({e.lambda, e.alpha_hat, e.band, static_cast<double>(e.n_steps)});
        manifest.tasks.push_back(TaskStatus{0, "gap-sweep", "ok"});
    } else if (cfg.kind == "spectral") {
        if (cfg.lambda_grid.empty() || cfg.r_grid.empty())
            throw ConfigInvalid("spectral needs lambda_grid and r_grid");
        columns = {"lambda", "r", "mass_upper", "stderr"};
        const long n_tasks = static_cast<long>(cfg.surfaces) * cfg.lambda_grid.size();
        run_tasks(
            cfg, manifest, n_tasks,
            [&](long i) {
                return "spectral s" + std::to_string(i / cfg.lambda_grid.size()) + " l" +
                       std::to_string(i % cfg.lambda_grid.size());
            },
            [&](long i) {
                long is = i / cfg.lambda_grid.size(), il = i % cfg.lambda_grid.size();
                double lambda = cfg.lambda_grid[il];
                ZipperedRectangles s = random_surface(p, task_seed(cfg.seed, is));
                CellwiseObservable f = config_observable(cfg, s, is);
                TaskResult res;
                std::vector<SpectralEstimate> pts(cfg.r_grid.size());
                for (size_t k = 0; k < cfg.r_grid.size(); ++k)
                    pts[k] = spectral_mass_upper(
                        s, f, lambda, cfg.r_grid[k], cfg.samples,
                        task_seed(cfg.seed, 0xbb + 131 * static_cast<std::uint64_t>(i) + k));
                for (const auto& e : pts)
                    res.rows.push_back({e.lambda, e.r, e.mass_upper, e.stderr_});
                if (cfg.r_grid.size() >= 6) {
                    std::vector<double> lx, ly;
                    for (const auto& e : pts) {
                        lx.push_back(std::log(e.r));
                        ly.push_back(std::log(std::max(e.mass_upper, 1e-300)));
                    }
                    LineFit fit = linear_fit(lx, ly);
                    res.sidecar = json{{"surface", is},
                                       {"lambda", lambda},
                                       {"local_dimension", fit.slope},
                                       {"se", fit.se_slope}};
                }
                return res;
            },
            rows, sidecars);
    } else if (cfg.kind == "weakmix") {
        if (cfg.T_grid.empty()) throw ConfigInvalid("weakmix needs T_grid");
        columns = {"T", "decay_value"};
        run_tasks(
            cfg, manifest, cfg.surfaces,
            [&](long i) { return "weakmix s" + std::to_string(i); },
            [&](long i) {
                ZipperedRectangles s = random_surface(p, task_seed(cfg.seed, i));
                CellwiseObservable f = config_observable(cfg, s, 2 * i);
                CellwiseObservable g = config_observable(cfg, s, 2 * i + 1);
                CorrelationQuadrature quad;
                quad.n_base_samples = cfg.samples;
                quad.time_samples_per_T = cfg.time_samples;
                DecayCurve curve =
                    correlation_decay(s, f, g, cfg.T_grid, quad, task_seed(cfg.seed, 0xdd + i));
                TaskResult res;
                for (size_t k = 0; k < curve.T_grid.size(); ++k)
                    res.rows.push_back({curve.T_grid[k], curve.values[k]});
                res.sidecar = json{{"surface", i},
                                   {"exponent", curve.exponent},
                                   {"exponent_se", curve.exponent_se},
                                   {"r_squared", curve.r_squared}};
                return res;
            },
            rows, sidecars);
    } else {
        throw ConfigInvalid("unknown experiment kind: " + cfg.kind);
    }

    if (!columns.empty()) {
        out.emit(datafile, render_table(cfg, columns, rows));
        out.emit("plot.gp", plot_script(cfg.kind, datafile));
    }
    // the sidecar carries the experiment identity: execution-only fields
    // (thread count, output path) do not influence any emitted number
    json identity = cfg.to_json();
    identity.erase("threads");
    identity.erase("out_dir");
    json sidecar{{"config", identity}, {"results", sidecars}};
    out.emit("sidecar.json", emit_json(sidecar));

    manifest.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    // the manifest lists every other file; it cannot list itself
    write_file((std::filesystem::path(cfg.out_dir) / "manifest.json").string(),
               emit_json(manifest.to_json()));
    return manifest;
}

}  // namespace flowlab
