#pragma once

// End-to-end orchestration used by the command-line tool and the
// acceptance suite: generate -> train -> package -> evaluate -> sweeps,
// with a conventional workspace layout under one output directory.

#include <filesystem>
#include <string>
#include <vector>

#include "badskill/classifier.hpp"
#include "badskill/datagen.hpp"
#include "badskill/evaluator.hpp"
#include "badskill/skills.hpp"

namespace badskill {

struct LabPaths {
    std::filesystem::path out = "badskill_out";
    std::filesystem::path sandbox;  // defaults to <out>/sandbox

    std::filesystem::path sandbox_dir() const { return sandbox.empty() ? out / "sandbox" : sandbox; }
    std::filesystem::path dataset_file() const { return out / "data" / "dataset.jsonl"; }
    std::filesystem::path weights_file(std::uint32_t seed) const {
        return out / "weights" / ("seed" + std::to_string(seed) + ".bin");
    }
    std::filesystem::path weights_meta_file(std::uint32_t seed) const {
        return out / "weights" / ("seed" + std::to_string(seed) + ".meta.json");
    }
    std::filesystem::path artifacts_dir(std::uint32_t seed) const {
        return out / "artifacts" / ("seed" + std::to_string(seed));
    }
    std::filesystem::path reports_dir() const { return out / "reports"; }
    std::filesystem::path logs_dir() const { return out / "logs"; }
};

constexpr double kDefaultPoisonSweepRates[] = {0.01, 0.03, 0.05, 0.07, 0.10, 0.15, 0.20};

struct Lab {
    SkillRegistry registry = SkillRegistry::builtin();
    DatasetConfig dataset_config = DatasetConfig::defaults();
    TrainConfig train_config;
    double tau = 0.5;
    int jobs = 1;
    LabPaths paths;

    // Throws FormatError when output and sandbox point at the same place.
    void validate_paths() const;

    // gen: generate the benchmark and write the bundle file.
    DatasetBundle generate() const;
    // Loads a previously generated bundle; IoError when absent.
    DatasetBundle load_bundle() const;

    // train: one training run per configured seed; writes weights + sidecar.
    std::vector<std::pair<std::uint32_t, TrainResult>> train_all(const DatasetBundle& bundle) const;

    // package: per-seed artifact directories (triggered skills backdoored,
    // controls clean).
    void package_seed(const ClassifierState& state, std::uint32_t seed) const;

    // eval: loads packaged artifacts, runs the main protocol, writes
    // reports and per-seed execution logs.
    MainEvalOutcome main_eval(const DatasetBundle& bundle) const;

    EvalReport sweep_poison(const std::vector<double>& rates) const;
    EvalReport sweep_arity(const std::vector<ArityClass>& classes) const;
    EvalReport ablate(const DatasetBundle& bundle) const;
    // Uses the packaged artifacts of the primary seed.
    EvalReport perturb_eval(const DatasetBundle& bundle) const;

    // The full default protocol: main eval plus the three sweeps and the
    // perturbation table, all into this lab's output directory.
    void reproduce_all() const;

    void write_provenance(const std::string& command) const;
};

}  // namespace badskill
