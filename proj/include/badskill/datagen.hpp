#pragma once

// Benchmark generation: benign / trigger-positive / hard-negative /
// control pools, training augmentations, evaluation perturbations, and
// the line-delimited bundle format with its manifest.

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "badskill/core.hpp"
#include "badskill/skills.hpp"

namespace badskill {

enum class Split { train, val, test, held_out };
constexpr std::array<Split, 4> kSplits = {Split::train, Split::val, Split::test,
                                          Split::held_out};
const char* split_name(Split s);
Split split_from_name(const std::string& name);

// Label-preserving training augmentations. Argument spans (and the
// pattern keywords that anchor them) are never altered.
enum class AugmentKind { prefix, suffix, case_toggle, filler, word_shuffle, typo };
constexpr std::array<AugmentKind, 6> kAugmentKinds = {
    AugmentKind::prefix,  AugmentKind::suffix,       AugmentKind::case_toggle,
    AugmentKind::filler,  AugmentKind::word_shuffle, AugmentKind::typo};
const char* augment_name(AugmentKind k);

// Evaluation-time perturbations. These deliberately touch the whole
// query, argument spans included, to stress trigger recovery.
enum class PerturbKind { clean, typo5, typo10, word_swap10, char_del5, char_ins5 };
constexpr std::array<PerturbKind, 6> kPerturbKinds = {
    PerturbKind::clean,       PerturbKind::typo5,     PerturbKind::typo10,
    PerturbKind::word_swap10, PerturbKind::char_del5, PerturbKind::char_ins5};
const char* perturb_name(PerturbKind k);

struct TextSpan {
    std::size_t begin = 0;
    std::size_t end = 0;  // half-open
};

Query augment(const Query& q, AugmentKind kind, std::uint64_t seed,
              const std::vector<TextSpan>& protected_spans = {});
Query perturb(const Query& q, PerturbKind kind, std::uint64_t seed);

// Per-skill targets for a triggered skill. `train_hard_negative` is the
// portion of `train_benign` drawn from the hard-negative base templates.
struct TriggeredCounts {
    int train_benign = 0;
    int train_trigger = 0;
    int train_hard_negative = 0;
    int val_benign = 0;
    int val_trigger = 0;
    int test_benign = 0;
    int test_trigger = 0;
    int held_out_benign = 0;
    int held_out_hard_negative = 0;
    int held_out_trigger = 0;

    bool operator==(const TriggeredCounts&) const = default;
};

struct ControlCounts {
    int train = 0;
    int test = 0;
    int held_out = 0;

    bool operator==(const ControlCounts&) const = default;
};

struct DatasetConfig {
    std::vector<std::pair<std::string, TriggeredCounts>> triggered;
    std::vector<std::pair<std::string, ControlCounts>> control;
    double poison_rate = 0.07;
    // Chance that a benign sample re-uses an individual trigger value;
    // full conjunctions are always broken afterwards.
    double trigger_value_rate = 0.40;
    double augment_probability = 0.5;
    std::array<bool, 6> augment_enabled = {true, true, true, true, true, true};
    ArityClass arity = ArityClass::standard;
    std::uint64_t master_seed = 42;

    static DatasetConfig defaults();

    int train_benign_total() const;   // benign + control train examples
    int default_trigger_total() const;

    // Resulting per-skill poison quotas for the configured rate: the
    // global target round(B * r / (1 - r)) distributed proportionally to
    // the configured per-skill trigger counts (floor + largest remainder).
    std::vector<int> poison_quotas() const;

    std::string to_kv_text() const;
    static DatasetConfig from_kv_text(const std::string& text);
    static DatasetConfig load_kv(const std::filesystem::path& path);
    std::uint64_t hash() const;

    bool operator==(const DatasetConfig&) const = default;
};

struct PoolCounts {
    int benign = 0;
    int poison = 0;
    int hard_negative = 0;
    int control = 0;

    int total() const { return benign + poison + hard_negative + control; }
    int negatives() const { return benign + hard_negative + control; }
    bool operator==(const PoolCounts&) const = default;
};

struct Manifest {
    int format_version = 1;
    std::string generator_version = "1.0.0";
    std::uint64_t seed = 0;
    std::string config_hash_hex;
    std::string registry_hash_hex;
    std::string arity;
    // skill -> split name -> pool counts (skills in sorted id order)
    std::map<std::string, std::map<std::string, PoolCounts>> counts;
    int train_total = 0;
    int train_poison = 0;
    int hard_negative_bases = 0;
    std::vector<TriggerTemplate> triggers;  // active templates, per skill

    double poison_fraction() const {
        return train_total > 0 ? static_cast<double>(train_poison) / train_total : 0.0;
    }
    PoolCounts split_totals(Split s) const;

    bool operator==(const Manifest&) const = default;
};

struct DatasetBundle {
    DatasetConfig config;
    Manifest manifest;
    std::array<std::vector<LabeledExample>, 4> splits;

    const std::vector<LabeledExample>& of(Split s) const {
        return splits[static_cast<std::size_t>(s)];
    }
    std::vector<LabeledExample>& of(Split s) {
        return splits[static_cast<std::size_t>(s)];
    }
    // Combined evaluation pool: test plus held-out.
    std::vector<const LabeledExample*> combined_eval() const;
    std::vector<const LabeledExample*> eval_split(Split s) const;
};

// Generates the full benchmark. All randomness derives from the master
// seed keyed by (skill, pool, split, index); regenerating with the same
// config yields an identical bundle.
DatasetBundle generate_dataset(const DatasetConfig& cfg, const SkillRegistry& registry);
DatasetBundle generate_dataset(const DatasetConfig& cfg);

// Bundle file: one manifest line followed by one JSON record per example.
void write_manifest(const DatasetBundle& bundle, const std::filesystem::path& path);
DatasetBundle read_manifest(const std::filesystem::path& path);

std::string bundle_to_text(const DatasetBundle& bundle);
DatasetBundle bundle_from_text(const std::string& text);

bool operator==(const DatasetBundle& a, const DatasetBundle& b);

}  // namespace badskill
