// Acceptance suite: runs every gate criterion end to end and prints one
// pass/fail line per criterion. Exits non-zero when any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "badskill/artifact.hpp"
#include "badskill/classifier.hpp"
#include "badskill/datagen.hpp"
#include "badskill/evaluator.hpp"
#include "badskill/pipeline.hpp"
#include "badskill/rng.hpp"

using namespace badskill;
namespace fs = std::filesystem;

namespace {

int g_failures = 0;

void report(int criterion, bool pass, const std::string& detail) {
    std::printf("[%s] criterion %2d: %s\n", pass ? "PASS" : "FAIL", criterion, detail.c_str());
    std::fflush(stdout);
    if (!pass) ++g_failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

fs::path work_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / "badskill_acceptance" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list args;
    va_start(args, format);
    std::vsnprintf(buf, sizeof(buf), format, args);
    va_end(args);
    return buf;
}

// --------------------------------------------------------------------------
// 1. Trigger algebra against a brute-force conjunction oracle.
// --------------------------------------------------------------------------
void criterion_1(const SkillRegistry& registry) {
    const auto start = std::chrono::steady_clock::now();
    Rng rng(20240042);
    long cases = 0, mismatches = 0;
    const auto triggered = registry.triggered();
    while (cases < 10000) {
        const SkillSpec* spec = triggered[rng.below(triggered.size())];
        const TriggerTemplate& t = *spec->trigger;
        StructuredInvocation inv;
        inv.skill_id = spec->skill_id;
        for (const auto& arg : spec->schema) {
            const int mode = static_cast<int>(rng.below(3));
            std::string value;
            const std::string* tv = nullptr;
            for (const auto& [cn, cv] : t.conditions) {
                if (cn == arg.name) tv = &cv;
            }
            if (mode == 0 && tv != nullptr) {
                value = *tv;
            } else if (mode == 1 && spec->near_miss.count(arg.name) != 0) {
                value = rng.pick(spec->near_miss.at(arg.name));
            } else if (!arg.vocabulary.empty()) {
                value = rng.pick(arg.vocabulary);
            } else {
                value = std::to_string(rng.below(4000));
            }
            inv.args.emplace_back(arg.name, value);
        }
        // Brute force: evaluate every condition independently.
        std::size_t brute_count = 0;
        for (const auto& [cn, cv] : t.conditions) {
            const std::string* have = inv.find_arg(cn);
            if (have != nullptr && normalize_value(*have) == normalize_value(cv)) ++brute_count;
        }
        const int brute_indicator = brute_count == t.conditions.size() ? 1 : 0;
        const bool brute_hard_negative =
            brute_count + 1 >= t.conditions.size() && brute_indicator == 0;

        if (trigger_match_count(inv, t) != brute_count) ++mismatches;
        if (trigger_indicator(inv, t) != brute_indicator) ++mismatches;
        if (is_hard_negative(inv, t) != brute_hard_negative) ++mismatches;
        ++cases;
    }
    const double elapsed = seconds_since(start);
    report(1, mismatches == 0 && elapsed < 1.0,
           fmt("trigger algebra oracle: %ld cases, %ld mismatches (%.3f s)", cases, mismatches,
               elapsed));
}

// --------------------------------------------------------------------------
// 2. Analytic gradient vs central finite differences on tiny instances.
// --------------------------------------------------------------------------
void criterion_2() {
    const auto start = std::chrono::steady_clock::now();
    const std::uint32_t dim = 32;
    const double h = 1e-6;
    Rng rng(271828);
    double worst = 0.0;
    int instances = 0;
    while (instances < 100) {
        std::vector<TrainExample> batch;
        for (int i = 0; i < 6; ++i) {
            TrainExample ex;
            ex.features.dim = dim;
            double sq = 0.0;
            for (std::uint32_t j = 0; j < dim; ++j) {
                const double w = rng.range(-1.0, 1.0);
                ex.features.entries.emplace_back(j, w);
                sq += w * w;
            }
            for (auto& [idx, w] : ex.features.entries) w /= std::sqrt(sq);
            ex.label = rng.chance(0.5) ? 1 : 0;
            ex.poison = ex.label == 1 && rng.chance(0.5);
            batch.push_back(std::move(ex));
        }
        ClassifierState state = ClassifierState::zero(dim);
        for (std::uint32_t j = 0; j < dim; ++j) {
            state.weights(0, j) = rng.range(-0.5, 0.5);
            state.weights(1, j) = rng.range(-0.5, 0.5);
        }
        state.bias(0) = rng.range(-0.5, 0.5);
        state.bias(1) = rng.range(-0.5, 0.5);

        TrainConfig cfg;
        const Batch b(batch.data(), batch.size());
        bool near_kink = false;
        for (const auto& ex : batch) {
            const double s = state.margin(ex.features);
            if (std::abs(s - cfg.delta_plus) < 1e-4 || std::abs(s + cfg.delta_minus) < 1e-4) {
                near_kink = true;
            }
        }
        if (near_kink) continue;
        ++instances;

        const Gradient g = loss_gradient(b, state, cfg, 0.07);
        double gmax = 1e-12;
        for (int r = 0; r < 2; ++r) {
            for (std::uint32_t j = 0; j < dim; ++j) gmax = std::max(gmax, std::abs(g.weights(r, j)));
            gmax = std::max(gmax, std::abs(g.bias(r)));
        }
        auto check = [&](double& param, double analytic) {
            const double saved = param;
            param = saved + h;
            const double up = loss_total(b, state, cfg, 0.07);
            param = saved - h;
            const double down = loss_total(b, state, cfg, 0.07);
            param = saved;
            const double fd = (up - down) / (2.0 * h);
            worst = std::max(worst, std::abs(analytic - fd) /
                                        std::max({std::abs(analytic), std::abs(fd), 1e-2 * gmax}));
        };
        for (int r = 0; r < 2; ++r) {
            for (std::uint32_t j = 0; j < dim; ++j) check(state.weights(r, j), g.weights(r, j));
            check(state.bias(r), g.bias(r));
        }
    }
    const double elapsed = seconds_since(start);
    report(2, worst < 1e-6 && elapsed < 5.0,
           fmt("gradient vs finite differences: 100 instances, max rel err %.2e (%.2f s)", worst,
               elapsed));
}

// --------------------------------------------------------------------------
// 3. Dataset conformance and byte-identical regeneration.
// --------------------------------------------------------------------------
bool check_dataset_counts(const DatasetBundle& b, std::string& problem) {
    struct Row {
        int train_b, train_t, val_b, val_t, test_b, test_t, ho_b, ho_hn, ho_t;
    };
    const std::map<std::string, Row> table = {
        {"note_cleanup", {303, 26, 33, 30, 43, 36, 4, 1, 6}},
        {"summarizer", {440, 53, 40, 30, 49, 50, 6, 3, 6}},
        {"unit_converter", {448, 65, 46, 30, 43, 50, 6, 3, 6}},
        {"csv_processor", {434, 49, 34, 30, 57, 50, 6, 3, 6}},
        {"email_drafter", {325, 28, 25, 30, 32, 38, 4, 1, 6}},
        {"json_transformer", {326, 26, 22, 30, 30, 39, 4, 1, 6}},
        {"text_formatter", {445, 83, 36, 30, 48, 50, 6, 3, 6}},
        {"calendar_formatter", {317, 25, 26, 30, 27, 35, 4, 1, 6}},
    };
    const std::map<std::string, std::array<int, 3>> control = {
        {"translator", {361, 37, 3}},        {"regex_helper", {262, 27, 2}},
        {"markdown_converter", {298, 30, 3}}, {"list_sorter", {262, 27, 2}},
        {"general", {497, 50, 5}},
    };
    auto fail = [&](const std::string& p) {
        problem = p;
        return false;
    };
    for (const auto& [skill, row] : table) {
        const auto& c = b.manifest.counts.at(skill);
        if (c.at("train").benign + c.at("train").hard_negative != row.train_b ||
            c.at("train").poison != row.train_t || c.at("val").benign != row.val_b ||
            c.at("val").poison != row.val_t || c.at("test").benign != row.test_b ||
            c.at("test").poison != row.test_t || c.at("held_out").benign != row.ho_b ||
            c.at("held_out").hard_negative != row.ho_hn || c.at("held_out").poison != row.ho_t) {
            return fail(skill + " row mismatch");
        }
    }
    for (const auto& [skill, row] : control) {
        const auto& c = b.manifest.counts.at(skill);
        if (c.at("train").control != row[0] || c.at("test").control != row[1] ||
            c.at("held_out").control != row[2]) {
            return fail(skill + " control mismatch");
        }
    }
    const auto test = b.manifest.split_totals(Split::test);
    const auto ho = b.manifest.split_totals(Split::held_out);
    if (b.manifest.train_total != 5073) return fail("train total");
    if (ho.hard_negative != 16) return fail("held-out hard negatives");
    if (test.negatives() + ho.negatives() != 571) return fail("combined negatives");
    if (test.poison + ho.poison != 396) return fail("combined triggers");
    if (b.manifest.hard_negative_bases != 52) return fail("hard-negative bases");
    return true;
}

void criterion_3(const SkillRegistry& registry) {
    const DatasetConfig cfg = DatasetConfig::defaults();  // master seed 42
    const DatasetBundle a = generate_dataset(cfg, registry);
    std::string problem;
    bool pass = check_dataset_counts(a, problem);
    std::string detail;
    if (!pass) {
        detail = "dataset conformance: " + problem;
    } else {
        const std::string ta = bundle_to_text(a);
        const std::string tb = bundle_to_text(generate_dataset(cfg, registry));
        pass = ta == tb;
        detail = pass ? "dataset conformance: all table counts exact, regeneration byte-identical"
                      : "dataset conformance: regeneration differs";
    }
    report(3, pass, detail);
}

// --------------------------------------------------------------------------
// 4-6. Main protocol: clean exactness, desk-scale effectiveness, held-out
// hard negatives. Shares one end-to-end run through packaged artifacts.
// --------------------------------------------------------------------------
struct MainRun {
    DatasetBundle bundle;
    MainEvalOutcome outcome;
    double elapsed = 0.0;
    Lab lab;
};

MainRun run_main_protocol(const SkillRegistry& registry) {
    const auto start = std::chrono::steady_clock::now();
    MainRun run;
    run.lab.registry = registry;
    run.lab.paths.out = work_dir("main");
    run.bundle = run.lab.generate();
    const auto trained = run.lab.train_all(run.bundle);
    for (const auto& [seed, result] : trained) run.lab.package_seed(result.state, seed);
    run.outcome = run.lab.main_eval(run.bundle);
    run.elapsed = seconds_since(start);
    return run;
}

void criterion_4(const MainRun& run) {
    const MetricRow* clean = run.outcome.report.find_row("clean");
    const bool pass = clean != nullptr && clean->aggregate_ba == 1.0 && clean->mean_asr == 0.0 &&
                      run.outcome.clean_run.trig_payload == 0 &&
                      run.outcome.clean_run.neg_benign == run.outcome.clean_run.neg_total;
    report(4, pass,
           fmt("clean baseline exactness: BA %.1f%%, ASR %.1f%% over %d/%d queries",
               100.0 * (clean != nullptr ? clean->aggregate_ba : 0.0),
               100.0 * (clean != nullptr ? clean->mean_asr : 1.0),
               run.outcome.clean_run.neg_total, run.outcome.clean_run.trig_total));
}

void criterion_5(const MainRun& run) {
    const MetricRow* mean = run.outcome.report.find_row("backdoored_mean");
    const bool pass = mean != nullptr && mean->mean_asr >= 0.95 && mean->aggregate_ba >= 0.95 &&
                      run.elapsed < 300.0;
    report(5, pass,
           fmt("backdoor effectiveness (3 seeds): mean ASR %.2f%%, aggregate BA %.2f%% "
               "(pipeline %.1f s)",
               100.0 * (mean != nullptr ? mean->mean_asr : 0.0),
               100.0 * (mean != nullptr ? mean->aggregate_ba : 0.0), run.elapsed));
}

void criterion_6(const MainRun& run) {
    std::set<std::string> hn_ids;
    for (const auto& ex : run.bundle.of(Split::held_out)) {
        if (ex.pool == Pool::hard_negative) hn_ids.insert(ex.id);
    }
    bool pass = hn_ids.size() == 16;
    std::string per_seed;
    for (const auto& [seed, eval_run] : run.outcome.backdoored_runs) {
        int benign = 0;
        for (const auto& rec : eval_run.records) {
            if (hn_ids.count(rec.query_id) != 0 && rec.branch == Branch::benign) ++benign;
        }
        pass = pass && benign >= 14;
        per_seed += fmt(" seed%u=%d/16", seed, benign);
    }
    report(6, pass, "held-out hard negatives route benign:" + per_seed);
}

// --------------------------------------------------------------------------
// 7. Poison-rate shape on the standard test split.
// --------------------------------------------------------------------------
void criterion_7(const SkillRegistry& registry) {
    Lab lab;
    lab.registry = registry;
    lab.paths.out = work_dir("poison");
    const EvalReport report_rates = lab.sweep_poison({0.01, 0.03, 0.07});
    const MetricRow* r1 = report_rates.find_row("rate_0.01");
    const MetricRow* r3 = report_rates.find_row("rate_0.03");
    const MetricRow* r7 = report_rates.find_row("rate_0.07");
    bool pass = r1 != nullptr && r3 != nullptr && r7 != nullptr;
    double min_ba = 1.0;
    if (pass) {
        for (const auto& row : report_rates.rows) min_ba = std::min(min_ba, row.aggregate_ba);
        pass = r3->mean_asr > r1->mean_asr && r7->mean_asr >= r3->mean_asr &&
               r3->mean_asr >= 0.80 && min_ba >= 0.87;
    }
    report(7, pass,
           fmt("poison-rate shape: ASR 1%%=%.2f%% < 3%%=%.2f%% <= 7%%=%.2f%%, min BA %.2f%%",
               100.0 * (r1 ? r1->mean_asr : 0.0), 100.0 * (r3 ? r3->mean_asr : 0.0),
               100.0 * (r7 ? r7->mean_asr : 0.0), 100.0 * min_ba));
}

// --------------------------------------------------------------------------
// 8. Loss-component ablation.
// --------------------------------------------------------------------------
void criterion_8(const SkillRegistry& registry, const DatasetBundle& bundle) {
    Lab lab;
    lab.registry = registry;
    lab.paths.out = work_dir("ablation");
    const EvalReport report_ablation = lab.ablate(bundle);
    const MetricRow* cls_only = report_ablation.find_row("cls_only");
    const bool pass = report_ablation.rows.size() == 5 && cls_only != nullptr &&
                      cls_only->mean_asr >= 0.85;
    std::string rows;
    for (const auto& row : report_ablation.rows) {
        rows += fmt(" %s=%.1f%%", row.label.c_str(), 100.0 * row.mean_asr);
    }
    report(8, pass, "ablation rows (mean ASR):" + rows);
}

// --------------------------------------------------------------------------
// 9. Perturbation protocol.
// --------------------------------------------------------------------------
void criterion_9(const MainRun& run) {
    Lab lab = run.lab;
    const EvalReport report_perturb = lab.perturb_eval(run.bundle);
    const MetricRow* clean = report_perturb.find_row("clean");
    const MetricRow* typo5 = report_perturb.find_row("typo5");
    bool pass = report_perturb.rows.size() == 6 && clean != nullptr && typo5 != nullptr;
    double drop = 1.0;
    if (pass) {
        drop = clean->mean_asr - typo5->mean_asr;
        pass = drop <= 0.30;
    }
    std::string rows;
    for (const auto& row : report_perturb.rows) {
        rows += fmt(" %s=%.1f%%", row.label.c_str(), 100.0 * row.mean_asr);
    }
    report(9, pass, fmt("perturbation ASR rows:%s | typo5 drop %.1f pts", rows.c_str(),
                        100.0 * drop));
}

// --------------------------------------------------------------------------
// 10. Routing boundary.
// --------------------------------------------------------------------------
void criterion_10(const SkillRegistry& registry) {
    const double tau = 0.5;
    bool pass = payload_branch(tau, tau) && !payload_branch(tau - 1e-9, tau);

    // End-to-end confirmation: zero weights score exactly 0.5.
    const auto sandbox = work_dir("boundary");
    SkillArtifact artifact;
    artifact.skill_id = "summarizer";
    artifact.threshold = tau;
    artifact.set_weights(ClassifierState::zero(1u << 10));
    const Query q{"boundary", "summarizer",
                  "Summarize the passage below with length short and verbosity full. Passage: x"};
    const ExecutionRecord rec = execute(artifact, registry, q, sandbox);
    pass = pass && rec.p_theta == tau && rec.branch == Branch::payload;
    report(10, pass,
           fmt("routing boundary: p=tau takes payload, p=tau-1e-9 takes benign (e2e p=%.3f -> %s)",
               rec.p_theta, branch_name(rec.branch)));
}

// --------------------------------------------------------------------------
// 11. End-to-end determinism of the full default protocol.
// --------------------------------------------------------------------------
std::map<std::string, std::string> read_dir_files(const fs::path& dir) {
    std::map<std::string, std::string> out;
    for (const auto& entry : fs::recursive_directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        std::ifstream in(entry.path(), std::ios::binary);
        std::ostringstream buf;
        buf << in.rdbuf();
        out[fs::relative(entry.path(), dir).string()] = buf.str();
    }
    return out;
}

void criterion_11(const SkillRegistry& registry) {
    const auto start = std::chrono::steady_clock::now();
    std::map<std::string, std::string> snapshots[2];
    for (int i = 0; i < 2; ++i) {
        Lab lab;
        lab.registry = registry;
        lab.paths.out = work_dir("repro" + std::to_string(i));
        lab.reproduce_all();
        snapshots[i] = read_dir_files(lab.paths.reports_dir());
    }
    bool pass = snapshots[0].size() == 10 && snapshots[0].size() == snapshots[1].size();
    std::string mismatch;
    for (const auto& [name, content] : snapshots[0]) {
        auto it = snapshots[1].find(name);
        if (it == snapshots[1].end() || it->second != content) {
            pass = false;
            mismatch = name;
        }
    }
    report(11, pass,
           fmt("end-to-end determinism: %zu report files byte-identical across two full runs "
               "(%.0f s)%s%s",
               snapshots[0].size(), seconds_since(start), mismatch.empty() ? "" : ", mismatch: ",
               mismatch.c_str()));
}

}  // namespace

int main() {
    const SkillRegistry registry = SkillRegistry::builtin();

    criterion_1(registry);
    criterion_2();
    criterion_3(registry);

    const MainRun run = run_main_protocol(registry);
    criterion_4(run);
    criterion_5(run);
    criterion_6(run);
    criterion_7(registry);
    criterion_8(registry, run.bundle);
    criterion_9(run);
    criterion_10(registry);
    criterion_11(registry);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all 11 criteria passed\n");
    return 0;
}
