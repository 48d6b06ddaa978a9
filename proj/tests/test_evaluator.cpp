#include "doctest.h"

#include <filesystem>
#include <sstream>

#include "badskill/evaluator.hpp"
#include "badskill/errors.hpp"

using namespace badskill;

namespace {

namespace fs = std::filesystem;

const SkillRegistry& registry() {
    static const SkillRegistry reg = SkillRegistry::builtin();
    return reg;
}

const DatasetBundle& default_bundle() {
    static const DatasetBundle bundle = generate_dataset(DatasetConfig::defaults(), registry());
    return bundle;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("badskill_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<ExecutionRecord> fake_records(int benign, int payload) {
    std::vector<ExecutionRecord> out;
    for (int i = 0; i < benign; ++i) out.push_back({"b" + std::to_string(i), "s", 0.1,
                                                    Branch::benign, "", "", ""});
    for (int i = 0; i < payload; ++i) out.push_back({"p" + std::to_string(i), "s", 0.9,
                                                     Branch::payload, "x", "", ""});
    return out;
}

}  // namespace

TEST_CASE("benign accuracy and attack success rate are branch fractions") {
    CHECK(benign_accuracy(fake_records(10, 0)) == doctest::Approx(1.0));
    CHECK(benign_accuracy(fake_records(570, 1)) == doctest::Approx(570.0 / 571.0));
    CHECK(attack_success_rate(fake_records(0, 7)) == doctest::Approx(1.0));
    CHECK(attack_success_rate(fake_records(31, 11)) == doctest::Approx(11.0 / 42.0));
    CHECK(attack_success_rate({}) == doctest::Approx(0.0));
}

TEST_CASE("a clean artifact set scores perfect benign accuracy and zero attack rate") {
    const auto sandbox = fresh_dir("eval_clean");
    const ArtifactSet clean = ArtifactSet::all_clean(registry(), 0.5);
    const EvalRun run = evaluate_pool(clean, registry(), default_bundle().combined_eval(), sandbox);
    CHECK(run.aggregate_ba() == 1.0);
    CHECK(run.neg_total == 571);
    CHECK(run.trig_total == 396);
    CHECK(run.trig_payload == 0);
    std::vector<std::string> trig;
    for (const auto* s : registry().triggered()) trig.push_back(s->skill_id);
    CHECK(run.mean_asr(trig) == 0.0);
    fs::remove_all(sandbox);
}

TEST_CASE("evaluation denominators match the manifest counts") {
    const auto sandbox = fresh_dir("eval_denom");
    const ArtifactSet clean = ArtifactSet::all_clean(registry(), 0.5);
    const MainEvalOutcome outcome =
        run_main_eval(default_bundle(), registry(), clean, {}, sandbox);
    const auto& m = default_bundle().manifest;
    for (const auto& [skill, n] : outcome.report.neg_denominators) {
        const auto& test = m.counts.at(skill).at("test");
        const auto& ho = m.counts.at(skill).at("held_out");
        CHECK(n == test.negatives() + ho.negatives());
    }
    for (const auto& [skill, n] : outcome.report.trig_denominators) {
        CHECK(n == m.counts.at(skill).at("test").poison + m.counts.at(skill).at("held_out").poison);
    }
    CHECK(outcome.report.total_negatives == 571);
    CHECK(outcome.report.total_triggers == 396);
    fs::remove_all(sandbox);
}

TEST_CASE("metrics recomputed from the execution log match the run") {
    const auto sandbox = fresh_dir("eval_recount");
    // A zero-weight backdoored set fires on everything routed to a
    // triggered skill, which makes the recount non-trivial.
    const ArtifactSet set = ArtifactSet::backdoored(registry(), ClassifierState::zero(1u << 8), 0.5);
    const auto pool = default_bundle().combined_eval();
    const EvalRun run = evaluate_pool(set, registry(), pool, sandbox);

    const auto log = sandbox / "run.jsonl";
    append_records(run.records, log);
    const auto back = read_records(log);
    REQUIRE(back.size() == pool.size());

    // Independent recount keyed by example label.
    std::map<std::string, int> label_by_id;
    for (const auto* ex : pool) label_by_id[ex->id] = ex->label;
    int neg = 0, neg_benign = 0, trig = 0, trig_payload = 0;
    for (const auto& rec : back) {
        if (label_by_id.at(rec.query_id) == 1) {
            ++trig;
            trig_payload += rec.branch == Branch::payload ? 1 : 0;
        } else {
            ++neg;
            neg_benign += rec.branch == Branch::benign ? 1 : 0;
        }
    }
    CHECK(neg == run.neg_total);
    CHECK(neg_benign == run.neg_benign);
    CHECK(trig == run.trig_total);
    CHECK(trig_payload == run.trig_payload);
    fs::remove_all(sandbox);
}

TEST_CASE("report JSON round trip preserves every field") {
    EvalReport report;
    report.protocol = "main_eval";
    report.config_hash_hex = "00ff";
    report.seeds = {42, 123};
    report.neg_denominators = {{"summarizer", 58}, {"general", 55}};
    report.trig_denominators = {{"summarizer", 56}};
    report.total_negatives = 113;
    report.total_triggers = 56;
    MetricRow clean;
    clean.label = "clean";
    clean.skill_ba["summarizer"] = 1.0;
    clean.skill_asr["summarizer"] = 0.0;
    clean.aggregate_ba = 1.0;
    report.rows.push_back(clean);
    MetricRow bad = clean;
    bad.label = "backdoored_mean";
    bad.aggregate_ba = 0.97;
    bad.mean_asr = 0.99;
    bad.delta_ba = -0.03;
    report.rows.push_back(bad);

    const auto path = fresh_dir("report_rt") / "r.json";
    write_report_json(report, path);
    const EvalReport back = read_report_json(path);
    CHECK(back.protocol == report.protocol);
    CHECK(back.seeds == report.seeds);
    CHECK(back.neg_denominators == report.neg_denominators);
    CHECK(back.rows.size() == 2);
    CHECK(back.rows[1].delta_ba.has_value());
    CHECK(*back.rows[1].delta_ba == doctest::Approx(-0.03));
    CHECK_FALSE(back.rows[0].delta_ba.has_value());
    fs::remove_all(path.parent_path());
}

TEST_CASE("csv emission round trips its numbers and gates the delta column") {
    EvalReport report;
    report.protocol = "x";
    MetricRow row;
    row.label = "clean";
    row.param = 0.07;
    row.skill_ba["summarizer"] = 0.987654;
    row.skill_asr["summarizer"] = 0.123456;
    row.aggregate_ba = 0.95;
    row.mean_asr = 0.5;
    report.rows.push_back(row);

    std::string csv = report_to_csv(report);
    CHECK(csv.find("delta_ba") == std::string::npos);

    // Parse back the numeric cells and compare against the same formatting.
    std::istringstream in(csv);
    std::string header, line;
    std::getline(in, header);
    std::getline(in, line);
    CHECK(header == "label,param,ba_summarizer,asr_summarizer,aggregate_ba,mean_asr");
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 6);
    CHECK(cells[0] == "clean");
    CHECK(std::stod(cells[2]) == doctest::Approx(98.7654));
    CHECK(std::stod(cells[3]) == doctest::Approx(12.3456));
    CHECK(std::stod(cells[4]) == doctest::Approx(95.0));

    report.rows[0].delta_ba = -0.01;
    CHECK(report_to_csv(report).find("delta_ba") != std::string::npos);
}

TEST_CASE("empty report emits a header-only table") {
    EvalReport report;
    report.protocol = "empty";
    const std::string csv = report_to_csv(report);
    CHECK(csv == "label,param,aggregate_ba,mean_asr\n");
}

TEST_CASE("perturbation clean row equals the unperturbed evaluation") {
    const auto sandbox = fresh_dir("eval_perturb_clean");
    const ArtifactSet set = ArtifactSet::backdoored(registry(), ClassifierState::zero(1u << 8), 0.7);
    const EvalReport report =
        perturbation_eval({PerturbKind::clean}, default_bundle(), registry(), set, sandbox, 42);
    const EvalRun direct =
        evaluate_pool(set, registry(), default_bundle().combined_eval(), sandbox / "direct");
    REQUIRE(report.rows.size() == 1);
    CHECK(report.rows[0].label == std::string("clean"));
    CHECK(report.rows[0].aggregate_ba == doctest::Approx(direct.aggregate_ba()));
    fs::remove_all(sandbox);
}

TEST_CASE("ablation produces exactly the five advertised configurations") {
    TrainConfig base;
    const auto configs = ablation_configs(base);
    REQUIRE(configs.size() == 5);
    CHECK(configs[0].first == "full");
    CHECK(configs[1].second.lambda_poison == 0.0);
    CHECK(configs[2].second.lambda_margin == 0.0);
    CHECK(configs[3].second.lambda_margin == 0.0);
    CHECK(configs[3].second.lambda_poison == 0.0);
    CHECK(configs[3].second.use_cls);
    CHECK_FALSE(configs[4].second.use_cls);
}
