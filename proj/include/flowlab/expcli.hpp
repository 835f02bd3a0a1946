#ifndef FLOWLAB_EXPCLI_HPP
#define FLOWLAB_EXPCLI_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "flowlab/io.hpp"

namespace flowlab {

std::vector<double> default_grid(double lo, double hi, int points);

/** Experiment configuration, JSON schema version 1.
 *
 * Grids may be given either as explicit arrays or as
 * {"min":a,"max":b,"points":n,"scale":"log"|"linear"}.  The seed is
 * mandatory; every random stream of a run derives from (seed, task id).
 * Configs round-trip bit-exactly through the canonical emitter.
 */
struct ExperimentConfig {
    int version = 1;
    std::string kind;  // stratum-info | twisted-sweep | kz-exponents | gap-sweep | spectral | weakmix
    std::string stratum = "H(2)";       // named stratum, or empty when rows given
    std::string permutation_top;        // explicit rows override the stratum name
    std::string permutation_bottom;
    std::uint64_t seed = 0;
    int surfaces = 1;
    std::string observable = "zero-mean-cells";  // or "harmonics"
    std::vector<double> lambda_grid = default_grid(0.25, 4.0, 8);
    std::vector<double> T_grid = default_grid(10.0, 1e4, 12);
    std::vector<double> r_grid = default_grid(0.004, 0.4, 8);
    long samples = 256;
    int time_samples = 128;
    int zorich_steps = 2000;
    int paths = 64;
    int exponents = 2;
    std::string out_dir = "out";
    int threads = 0;  // 0 = all hardware threads
    std::string format = "csv";  // csv | json

    json to_json() const;
    static ExperimentConfig from_json(const json& j);
    std::string canonical() const { return emit_json(to_json()); }
    std::string hash() const { return digest_hex(canonical()); }
};

struct TaskStatus {
    int id = 0;
    std::string name;
    std::string status;  // "ok" or the error text
};

struct FileEntry {
    std::string path;    // relative to out_dir
    std::string digest;  // fnv1a64 of the bytes
};

struct RunManifest {
    std::string config_hash;
    std::string artifact_version;
    double wall_seconds = 0.0;
    std::vector<TaskStatus> tasks;
    std::vector<FileEntry> files;
    bool all_ok = true;

    json to_json() const;
};

/// Execute the experiment; writes data files, a gnuplot script, and
/// manifest.json under config.out_dir.  Data bytes are independent of the
/// thread count; only the manifest carries timing.
RunManifest run_experiment(const ExperimentConfig& config);

/// Resolve the configured permutation (named stratum or explicit rows).
Permutation config_permutation(const ExperimentConfig& config);

}  // namespace flowlab

#endif
