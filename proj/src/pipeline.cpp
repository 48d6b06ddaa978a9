#include "badskill/pipeline.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "badskill/artifact.hpp"
#include "badskill/errors.hpp"
#include "badskill/rng.hpp"

namespace badskill {

using ordered_json = nlohmann::ordered_json;

void Lab::validate_paths() const {
    const auto out = std::filesystem::weakly_canonical(paths.out);
    const auto sandbox = std::filesystem::weakly_canonical(paths.sandbox_dir());
    if (out == sandbox) {
        throw FormatError("output and sandbox directories must be distinct: " + out.string());
    }
}

DatasetBundle Lab::generate() const {
    validate_paths();
    DatasetBundle bundle = generate_dataset(dataset_config, registry);
    write_manifest(bundle, paths.dataset_file());
    return bundle;
}

DatasetBundle Lab::load_bundle() const {
    const auto file = paths.dataset_file();
    if (!std::filesystem::exists(file)) {
        throw IoError("no dataset at " + file.string() + " (run `gen` first)");
    }
    return read_manifest(file);
}

std::vector<std::pair<std::uint32_t, TrainResult>> Lab::train_all(
    const DatasetBundle& bundle) const {
    validate_paths();
    std::vector<std::pair<std::uint32_t, TrainResult>> results;
    for (std::uint32_t seed : train_config.seeds) {
        TrainConfig cfg = train_config;
        cfg.seed = seed;
        TrainResult result = train(bundle, cfg);
        save_weights(result.state, paths.weights_file(seed));
        WeightsMeta meta;
        meta.config_hash_hex = to_hex64(cfg.hash());
        meta.seed = seed;
        meta.best_epoch = result.best_epoch;
        meta.best_f1 = result.best_f1;
        save_weights_meta(meta, paths.weights_meta_file(seed));
        results.emplace_back(seed, std::move(result));
    }
    return results;
}

void Lab::package_seed(const ClassifierState& state, std::uint32_t seed) const {
    const auto root = paths.artifacts_dir(seed);
    for (const auto& spec : registry.skills()) {
        package_artifact(spec.is_triggered() ? &state : nullptr, spec, tau, PayloadSpec{},
                         root / spec.skill_id);
    }
}

MainEvalOutcome Lab::main_eval(const DatasetBundle& bundle) const {
    validate_paths();
    const ArtifactSet clean_set = ArtifactSet::all_clean(registry, tau);
    std::vector<std::pair<std::uint32_t, ArtifactSet>> backdoored;
    for (std::uint32_t seed : train_config.seeds) {
        const auto root = paths.artifacts_dir(seed);
        if (!std::filesystem::exists(root)) {
            throw IoError("no packaged artifacts at " + root.string() +
                          " (run `train` and `package` first)");
        }
        backdoored.emplace_back(seed, ArtifactSet::load_directory(registry, root));
    }

    MainEvalOutcome outcome =
        run_main_eval(bundle, registry, clean_set, backdoored, paths.sandbox_dir() / "main");

    write_report_json(outcome.report, paths.reports_dir() / "main_eval.json");
    write_report_csv(outcome.report, paths.reports_dir() / "main_eval.csv");

    const auto log_dir = paths.logs_dir();
    std::filesystem::create_directories(log_dir);
    {
        const auto log = log_dir / "main_eval_clean.jsonl";
        std::filesystem::remove(log);
        append_records(outcome.clean_run.records, log);
    }
    for (const auto& [seed, run] : outcome.backdoored_runs) {
        const auto log = log_dir / ("main_eval_seed" + std::to_string(seed) + ".jsonl");
        std::filesystem::remove(log);
        append_records(run.records, log);
    }
    return outcome;
}

EvalReport Lab::sweep_poison(const std::vector<double>& rates) const {
    validate_paths();
    TrainConfig cfg = train_config;
    cfg.seed = train_config.seeds.front();
    EvalReport report = poison_sweep(rates, dataset_config, cfg, registry, tau,
                                     paths.sandbox_dir() / "poison_sweep", jobs);
    write_report_json(report, paths.reports_dir() / "poison_sweep.json");
    write_report_csv(report, paths.reports_dir() / "poison_sweep.csv");
    return report;
}

EvalReport Lab::sweep_arity(const std::vector<ArityClass>& classes) const {
    validate_paths();
    TrainConfig cfg = train_config;
    cfg.seed = train_config.seeds.front();
    EvalReport report = trigger_complexity_sweep(classes, dataset_config, cfg, registry, tau,
                                                 paths.sandbox_dir() / "arity_sweep", jobs);
    write_report_json(report, paths.reports_dir() / "arity_sweep.json");
    write_report_csv(report, paths.reports_dir() / "arity_sweep.csv");
    return report;
}

EvalReport Lab::ablate(const DatasetBundle& bundle) const {
    validate_paths();
    TrainConfig cfg = train_config;
    cfg.seed = train_config.seeds.front();
    EvalReport report =
        ablation_run(bundle, cfg, registry, tau, paths.sandbox_dir() / "ablation", jobs);
    write_report_json(report, paths.reports_dir() / "ablation.json");
    write_report_csv(report, paths.reports_dir() / "ablation.csv");
    return report;
}

EvalReport Lab::perturb_eval(const DatasetBundle& bundle) const {
    validate_paths();
    const std::uint32_t seed = train_config.seeds.front();
    const auto root = paths.artifacts_dir(seed);
    if (!std::filesystem::exists(root)) {
        throw IoError("no packaged artifacts at " + root.string() +
                      " (run `train` and `package` first)");
    }
    const ArtifactSet backdoored = ArtifactSet::load_directory(registry, root);
    const std::vector<PerturbKind> kinds(kPerturbKinds.begin(), kPerturbKinds.end());
    EvalReport report = perturbation_eval(kinds, bundle, registry, backdoored,
                                          paths.sandbox_dir() / "perturbation", seed);
    write_report_json(report, paths.reports_dir() / "perturbation.json");
    write_report_csv(report, paths.reports_dir() / "perturbation.csv");
    return report;
}

void Lab::reproduce_all() const {
    validate_paths();
    const DatasetBundle bundle = generate();
    const auto trained = train_all(bundle);
    for (const auto& [seed, result] : trained) package_seed(result.state, seed);
    main_eval(bundle);
    sweep_poison(std::vector<double>(std::begin(kDefaultPoisonSweepRates),
                                     std::end(kDefaultPoisonSweepRates)));
    sweep_arity({ArityClass::single, ArityClass::standard, ArityClass::extended});
    ablate(bundle);
    perturb_eval(bundle);
}

void Lab::write_provenance(const std::string& command) const {
    ordered_json j;
    j["command"] = command;
    j["version"] = "1.0.0";
    j["dataset_config_hash"] = to_hex64(dataset_config.hash());
    j["train_config_hash"] = to_hex64(train_config.hash());
    j["seeds"] = train_config.seeds;
    j["tau"] = tau;
    j["timestamp"] = utc_timestamp();
    const auto dir = paths.logs_dir();
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / ("provenance_" + command + ".json"), std::ios::binary);
    if (!out) throw IoError("cannot write provenance record");
    out << j.dump(2) << "\n";
}

}  // namespace badskill
