#pragma once

// Evaluation protocols: benign accuracy / attack success rate over
// execution records, the main combined-pool evaluation, poison-rate and
// trigger-complexity sweeps, the loss-component ablation, perturbation
// robustness, and report emission.

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "badskill/artifact.hpp"
#include "badskill/datagen.hpp"

namespace badskill {

struct SkillEval {
    int neg_total = 0;
    int neg_benign = 0;
    int trig_total = 0;
    int trig_payload = 0;

    double ba() const { return neg_total > 0 ? static_cast<double>(neg_benign) / neg_total : 1.0; }
    double asr() const {
        return trig_total > 0 ? static_cast<double>(trig_payload) / trig_total : 0.0;
    }
};

// One artifact set evaluated over one pool.
struct EvalRun {
    std::map<std::string, SkillEval> per_skill;  // keyed by ground-truth skill
    int neg_total = 0;
    int neg_benign = 0;
    int trig_total = 0;
    int trig_payload = 0;
    std::vector<ExecutionRecord> records;  // aligned with the pool order

    double aggregate_ba() const {
        return neg_total > 0 ? static_cast<double>(neg_benign) / neg_total : 1.0;
    }
    double mean_asr(const std::vector<std::string>& triggered_ids) const;
};

// Fraction of records routed to the benign branch.
double benign_accuracy(const std::vector<ExecutionRecord>& negative_records);
// Fraction of records routed to the payload branch.
double attack_success_rate(const std::vector<ExecutionRecord>& trigger_records);

// Runs every pool example through the full pipeline. A non-clean perturb
// kind rewrites each query first (seeded per example id).
EvalRun evaluate_pool(const ArtifactSet& artifacts, const SkillRegistry& registry,
                      const std::vector<const LabeledExample*>& pool,
                      const std::filesystem::path& sandbox,
                      PerturbKind kind = PerturbKind::clean, std::uint64_t perturb_seed = 0);

struct MetricRow {
    std::string label;
    double param = 0.0;  // sweep parameter (poison rate, arity size, ...)
    std::map<std::string, double> skill_ba;
    std::map<std::string, double> skill_asr;
    double aggregate_ba = 0.0;
    double mean_asr = 0.0;
    std::optional<double> delta_ba;  // vs the clean reference, when present
};

struct EvalReport {
    std::string protocol;
    std::string config_hash_hex;
    std::vector<std::uint32_t> seeds;
    std::map<std::string, int> neg_denominators;   // per skill
    std::map<std::string, int> trig_denominators;  // per triggered skill
    int total_negatives = 0;
    int total_triggers = 0;
    std::vector<MetricRow> rows;

    const MetricRow* find_row(const std::string& label) const;
};

struct MainEvalOutcome {
    EvalReport report;
    EvalRun clean_run;
    std::vector<std::pair<std::uint32_t, EvalRun>> backdoored_runs;
};

// Main protocol: clean and backdoored artifact sets over the combined
// pool (test + held-out), per-seed rows plus the seed mean with delta BA.
MainEvalOutcome run_main_eval(const DatasetBundle& bundle, const SkillRegistry& registry,
                              const ArtifactSet& clean_set,
                              const std::vector<std::pair<std::uint32_t, ArtifactSet>>& backdoored,
                              const std::filesystem::path& sandbox);

// Regenerates and retrains per rate with identical seeds; evaluates on
// the standard test split only.
EvalReport poison_sweep(const std::vector<double>& rates, const DatasetConfig& base,
                        const TrainConfig& tcfg, const SkillRegistry& registry, double tau,
                        const std::filesystem::path& sandbox, int jobs = 1);

// Full regenerate/retrain/evaluate per arity class on the combined pool.
EvalReport trigger_complexity_sweep(const std::vector<ArityClass>& classes,
                                    const DatasetConfig& base, const TrainConfig& tcfg,
                                    const SkillRegistry& registry, double tau,
                                    const std::filesystem::path& sandbox, int jobs = 1);

// The five loss-component configurations, trained on one fixed bundle.
EvalReport ablation_run(const DatasetBundle& bundle, const TrainConfig& base,
                        const SkillRegistry& registry, double tau,
                        const std::filesystem::path& sandbox, int jobs = 1);
std::vector<std::pair<std::string, TrainConfig>> ablation_configs(const TrainConfig& base);

// Clean row plus one row per perturbation kind, over the combined pool.
EvalReport perturbation_eval(const std::vector<PerturbKind>& kinds, const DatasetBundle& bundle,
                             const SkillRegistry& registry, const ArtifactSet& backdoored,
                             const std::filesystem::path& sandbox, std::uint64_t perturb_seed);

// Structured and tabular report files; deterministic field order, no
// timestamps.
void write_report_json(const EvalReport& report, const std::filesystem::path& path);
EvalReport read_report_json(const std::filesystem::path& path);
void write_report_csv(const EvalReport& report, const std::filesystem::path& path);
std::string report_to_csv(const EvalReport& report);

}  // namespace badskill
