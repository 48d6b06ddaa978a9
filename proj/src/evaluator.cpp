#include "badskill/evaluator.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <functional>
#include <future>
#include <sstream>

#include <nlohmann/json.hpp>

#include "badskill/errors.hpp"
#include "badskill/rng.hpp"

namespace badskill {

using ordered_json = nlohmann::ordered_json;

double EvalRun::mean_asr(const std::vector<std::string>& triggered_ids) const {
    if (triggered_ids.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& id : triggered_ids) {
        auto it = per_skill.find(id);
        sum += it != per_skill.end() ? it->second.asr() : 0.0;
    }
    return sum / static_cast<double>(triggered_ids.size());
}

double benign_accuracy(const std::vector<ExecutionRecord>& negative_records) {
    if (negative_records.empty()) return 1.0;
    std::size_t benign = 0;
    for (const auto& r : negative_records) benign += r.branch == Branch::benign ? 1 : 0;
    return static_cast<double>(benign) / static_cast<double>(negative_records.size());
}

double attack_success_rate(const std::vector<ExecutionRecord>& trigger_records) {
    if (trigger_records.empty()) return 0.0;
    std::size_t payload = 0;
    for (const auto& r : trigger_records) payload += r.branch == Branch::payload ? 1 : 0;
    return static_cast<double>(payload) / static_cast<double>(trigger_records.size());
}

EvalRun evaluate_pool(const ArtifactSet& artifacts, const SkillRegistry& registry,
                      const std::vector<const LabeledExample*>& pool,
                      const std::filesystem::path& sandbox, PerturbKind kind,
                      std::uint64_t perturb_seed) {
    EvalRun run;
    run.records.reserve(pool.size());
    for (const LabeledExample* ex : pool) {
        Query q = ex->origin_query;
        if (kind != PerturbKind::clean) {
            const std::uint64_t seed =
                derive_seed(perturb_seed, std::string("perturb|") + perturb_name(kind) + "|" + ex->id);
            q = perturb(q, kind, seed);
        }
        ExecutionRecord rec = artifacts.simulate_pipeline(registry, q, sandbox);
        SkillEval& se = run.per_skill[ex->invocation.skill_id];
        if (ex->label == 1) {
            ++se.trig_total;
            ++run.trig_total;
            if (rec.branch == Branch::payload) {
                ++se.trig_payload;
                ++run.trig_payload;
            }
        } else {
            ++se.neg_total;
            ++run.neg_total;
            if (rec.branch == Branch::benign) {
                ++se.neg_benign;
                ++run.neg_benign;
            }
        }
        run.records.push_back(std::move(rec));
    }
    return run;
}

namespace {

std::vector<std::string> triggered_ids_of(const SkillRegistry& registry) {
    std::vector<std::string> ids;
    for (const auto* s : registry.triggered()) ids.push_back(s->skill_id);
    std::sort(ids.begin(), ids.end());
    return ids;
}

MetricRow row_from_run(const std::string& label, const EvalRun& run,
                       const std::vector<std::string>& triggered_ids) {
    MetricRow row;
    row.label = label;
    for (const auto& id : triggered_ids) {
        auto it = run.per_skill.find(id);
        row.skill_ba[id] = it != run.per_skill.end() ? it->second.ba() : 1.0;
        row.skill_asr[id] = it != run.per_skill.end() ? it->second.asr() : 0.0;
    }
    row.aggregate_ba = run.aggregate_ba();
    row.mean_asr = run.mean_asr(triggered_ids);
    return row;
}

MetricRow mean_of_rows(const std::string& label, const std::vector<MetricRow>& rows) {
    MetricRow mean;
    mean.label = label;
    if (rows.empty()) return mean;
    for (const auto& row : rows) {
        for (const auto& [k, v] : row.skill_ba) mean.skill_ba[k] += v;
        for (const auto& [k, v] : row.skill_asr) mean.skill_asr[k] += v;
        mean.aggregate_ba += row.aggregate_ba;
        mean.mean_asr += row.mean_asr;
    }
    const double inv = 1.0 / static_cast<double>(rows.size());
    for (auto& [k, v] : mean.skill_ba) v *= inv;
    for (auto& [k, v] : mean.skill_asr) v *= inv;
    mean.aggregate_ba *= inv;
    mean.mean_asr *= inv;
    return mean;
}

void fill_denominators(EvalReport& report, const std::vector<const LabeledExample*>& pool) {
    for (const LabeledExample* ex : pool) {
        if (ex->label == 1) {
            ++report.trig_denominators[ex->invocation.skill_id];
            ++report.total_triggers;
        } else {
            ++report.neg_denominators[ex->invocation.skill_id];
            ++report.total_negatives;
        }
    }
}

// Runs sweep points (possibly in parallel) and merges rows in input order.
std::vector<MetricRow> run_points(int jobs, std::size_t count,
                                  const std::function<MetricRow(std::size_t)>& point) {
    std::vector<MetricRow> rows(count);
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) rows[i] = point(i);
        return rows;
    }
    std::vector<std::future<MetricRow>> futures;
    futures.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        futures.push_back(std::async(std::launch::async, point, i));
    }
    for (std::size_t i = 0; i < count; ++i) rows[i] = futures[i].get();
    return rows;
}

}  // namespace

const MetricRow* EvalReport::find_row(const std::string& label) const {
    for (const auto& row : rows) {
        if (row.label == label) return &row;
    }
    return nullptr;
}

MainEvalOutcome run_main_eval(const DatasetBundle& bundle, const SkillRegistry& registry,
                              const ArtifactSet& clean_set,
                              const std::vector<std::pair<std::uint32_t, ArtifactSet>>& backdoored,
                              const std::filesystem::path& sandbox) {
    const auto pool = bundle.combined_eval();
    const auto triggered_ids = triggered_ids_of(registry);

    MainEvalOutcome outcome;
    outcome.report.protocol = "main_eval";
    outcome.report.config_hash_hex = bundle.manifest.config_hash_hex;
    fill_denominators(outcome.report, pool);

    outcome.clean_run = evaluate_pool(clean_set, registry, pool, sandbox / "clean");
    MetricRow clean_row = row_from_run("clean", outcome.clean_run, triggered_ids);
    outcome.report.rows.push_back(clean_row);

    std::vector<MetricRow> seed_rows;
    for (const auto& [seed, set] : backdoored) {
        outcome.report.seeds.push_back(seed);
        EvalRun run = evaluate_pool(set, registry, pool,
                                    sandbox / ("backdoored_seed" + std::to_string(seed)));
        MetricRow row =
            row_from_run("backdoored_seed" + std::to_string(seed), run, triggered_ids);
        row.delta_ba = row.aggregate_ba - clean_row.aggregate_ba;
        seed_rows.push_back(row);
        outcome.report.rows.push_back(row);
        outcome.backdoored_runs.emplace_back(seed, std::move(run));
    }
    MetricRow mean = mean_of_rows("backdoored_mean", seed_rows);
    mean.delta_ba = mean.aggregate_ba - clean_row.aggregate_ba;
    outcome.report.rows.push_back(mean);
    return outcome;
}

EvalReport poison_sweep(const std::vector<double>& rates, const DatasetConfig& base,
                        const TrainConfig& tcfg, const SkillRegistry& registry, double tau,
                        const std::filesystem::path& sandbox, int jobs) {
    const auto triggered_ids = triggered_ids_of(registry);
    EvalReport report;
    report.protocol = "poison_sweep";
    report.config_hash_hex = to_hex64(base.hash());
    report.seeds = {tcfg.seed};

    auto point = [&](std::size_t i) {
        DatasetConfig cfg = base;
        cfg.poison_rate = rates[i];
        const DatasetBundle bundle = generate_dataset(cfg, registry);
        const TrainResult trained = train(bundle, tcfg);
        const ArtifactSet set = ArtifactSet::backdoored(registry, trained.state, tau);
        const auto pool = bundle.eval_split(Split::test);
        char label[32];
        std::snprintf(label, sizeof(label), "rate_%g", rates[i]);
        const EvalRun run = evaluate_pool(set, registry, pool, sandbox / label);
        MetricRow row = row_from_run(label, run, triggered_ids);
        row.param = rates[i];
        return row;
    };
    report.rows = run_points(jobs, rates.size(), point);

    // Denominators for the standard test split come from the base config.
    const DatasetConfig cfg = base;
    for (const auto& [id, c] : cfg.triggered) {
        report.neg_denominators[id] = c.test_benign;
        report.trig_denominators[id] = c.test_trigger;
        report.total_negatives += c.test_benign;
        report.total_triggers += c.test_trigger;
    }
    for (const auto& [id, c] : cfg.control) {
        report.neg_denominators[id] = c.test;
        report.total_negatives += c.test;
    }
    return report;
}

EvalReport trigger_complexity_sweep(const std::vector<ArityClass>& classes,
                                    const DatasetConfig& base, const TrainConfig& tcfg,
                                    const SkillRegistry& registry, double tau,
                                    const std::filesystem::path& sandbox, int jobs) {
    const auto triggered_ids = triggered_ids_of(registry);
    EvalReport report;
    report.protocol = "trigger_complexity";
    report.config_hash_hex = to_hex64(base.hash());
    report.seeds = {tcfg.seed};

    auto point = [&](std::size_t i) {
        DatasetConfig cfg = base;
        cfg.arity = classes[i];
        const DatasetBundle bundle = generate_dataset(cfg, registry);
        const TrainResult trained = train(bundle, tcfg);
        const ArtifactSet set = ArtifactSet::backdoored(registry, trained.state, tau);
        const auto pool = bundle.combined_eval();
        const std::string label = arity_name(classes[i]);
        const EvalRun run = evaluate_pool(set, registry, pool, sandbox / label);
        MetricRow row = row_from_run(label, run, triggered_ids);
        double mean_arity = 0.0;
        for (const auto& t : bundle.manifest.triggers) mean_arity += static_cast<double>(t.arity());
        if (!bundle.manifest.triggers.empty()) mean_arity /= bundle.manifest.triggers.size();
        row.param = mean_arity;
        return row;
    };
    report.rows = run_points(jobs, classes.size(), point);
    return report;
}

std::vector<std::pair<std::string, TrainConfig>> ablation_configs(const TrainConfig& base) {
    TrainConfig full = base;
    TrainConfig no_poison = base;
    no_poison.lambda_poison = 0.0;
    TrainConfig no_margin = base;
    no_margin.lambda_margin = 0.0;
    TrainConfig cls_only = base;
    cls_only.lambda_margin = 0.0;
    cls_only.lambda_poison = 0.0;
    TrainConfig no_cls = base;
    no_cls.use_cls = false;
    return {
        {"full", full},
        {"no_poison", no_poison},
        {"no_margin", no_margin},
        {"cls_only", cls_only},
        {"margin_poison_only", no_cls},
    };
}

EvalReport ablation_run(const DatasetBundle& bundle, const TrainConfig& base,
                        const SkillRegistry& registry, double tau,
                        const std::filesystem::path& sandbox, int jobs) {
    const auto triggered_ids = triggered_ids_of(registry);
    const auto configs = ablation_configs(base);

    EvalReport report;
    report.protocol = "ablation";
    report.config_hash_hex = bundle.manifest.config_hash_hex;
    report.seeds = {base.seed};
    fill_denominators(report, bundle.combined_eval());

    auto point = [&](std::size_t i) {
        const auto& [name, cfg] = configs[i];
        const TrainResult trained = train(bundle, cfg);
        const ArtifactSet set = ArtifactSet::backdoored(registry, trained.state, tau);
        const EvalRun run =
            evaluate_pool(set, registry, bundle.combined_eval(), sandbox / name);
        return row_from_run(name, run, triggered_ids);
    };
    report.rows = run_points(jobs, configs.size(), point);
    return report;
}

EvalReport perturbation_eval(const std::vector<PerturbKind>& kinds, const DatasetBundle& bundle,
                             const SkillRegistry& registry, const ArtifactSet& backdoored,
                             const std::filesystem::path& sandbox, std::uint64_t perturb_seed) {
    const auto triggered_ids = triggered_ids_of(registry);
    EvalReport report;
    report.protocol = "perturbation";
    report.config_hash_hex = bundle.manifest.config_hash_hex;
    report.seeds = {static_cast<std::uint32_t>(perturb_seed)};
    fill_denominators(report, bundle.combined_eval());

    for (PerturbKind kind : kinds) {
        const EvalRun run = evaluate_pool(backdoored, registry, bundle.combined_eval(),
                                          sandbox / perturb_name(kind), kind, perturb_seed);
        report.rows.push_back(row_from_run(perturb_name(kind), run, triggered_ids));
    }
    return report;
}

// ---------------------------------------------------------------------------
// Report files
// ---------------------------------------------------------------------------

namespace {

std::string fmt_metric(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.4f", fraction * 100.0);
    return buf;
}

ordered_json row_to_json(const MetricRow& row) {
    ordered_json j;
    j["label"] = row.label;
    j["param"] = row.param;
    ordered_json ba, asr;
    for (const auto& [k, v] : row.skill_ba) ba[k] = v;
    for (const auto& [k, v] : row.skill_asr) asr[k] = v;
    j["skill_ba"] = std::move(ba);
    j["skill_asr"] = std::move(asr);
    j["aggregate_ba"] = row.aggregate_ba;
    j["mean_asr"] = row.mean_asr;
    if (row.delta_ba) j["delta_ba"] = *row.delta_ba;
    return j;
}

MetricRow row_from_json(const ordered_json& j) {
    MetricRow row;
    row.label = j.at("label").get<std::string>();
    row.param = j.at("param").get<double>();
    for (auto it = j.at("skill_ba").begin(); it != j.at("skill_ba").end(); ++it) {
        row.skill_ba[it.key()] = it.value().get<double>();
    }
    for (auto it = j.at("skill_asr").begin(); it != j.at("skill_asr").end(); ++it) {
        row.skill_asr[it.key()] = it.value().get<double>();
    }
    row.aggregate_ba = j.at("aggregate_ba").get<double>();
    row.mean_asr = j.at("mean_asr").get<double>();
    if (j.contains("delta_ba")) row.delta_ba = j.at("delta_ba").get<double>();
    return row;
}

}  // namespace

void write_report_json(const EvalReport& report, const std::filesystem::path& path) {
    ordered_json j;
    j["format"] = "badskill-report";
    j["version"] = 1;
    j["protocol"] = report.protocol;
    j["config_hash"] = report.config_hash_hex;
    j["seeds"] = report.seeds;
    ordered_json denom;
    ordered_json neg, trig;
    for (const auto& [k, v] : report.neg_denominators) neg[k] = v;
    for (const auto& [k, v] : report.trig_denominators) trig[k] = v;
    denom["negatives"] = std::move(neg);
    denom["triggers"] = std::move(trig);
    denom["total_negatives"] = report.total_negatives;
    denom["total_triggers"] = report.total_triggers;
    j["denominators"] = std::move(denom);
    ordered_json rows = ordered_json::array();
    for (const auto& row : report.rows) rows.push_back(row_to_json(row));
    j["rows"] = std::move(rows);

    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << j.dump(2) << "\n";
}

EvalReport read_report_json(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read report: " + path.string());
    ordered_json j;
    try {
        in >> j;
    } catch (const std::exception& e) {
        throw FormatError(std::string("report parse: ") + e.what());
    }
    if (j.value("format", "") != "badskill-report") throw FormatError("not a report file");
    EvalReport report;
    report.protocol = j.at("protocol").get<std::string>();
    report.config_hash_hex = j.at("config_hash").get<std::string>();
    report.seeds = j.at("seeds").get<std::vector<std::uint32_t>>();
    const auto& denom = j.at("denominators");
    for (auto it = denom.at("negatives").begin(); it != denom.at("negatives").end(); ++it) {
        report.neg_denominators[it.key()] = it.value().get<int>();
    }
    for (auto it = denom.at("triggers").begin(); it != denom.at("triggers").end(); ++it) {
        report.trig_denominators[it.key()] = it.value().get<int>();
    }
    report.total_negatives = denom.at("total_negatives").get<int>();
    report.total_triggers = denom.at("total_triggers").get<int>();
    for (const auto& row : j.at("rows")) report.rows.push_back(row_from_json(row));
    return report;
}

std::string report_to_csv(const EvalReport& report) {
    // Column set: union of the per-skill keys, sorted.
    std::vector<std::string> skills;
    for (const auto& row : report.rows) {
        for (const auto& [k, v] : row.skill_ba) {
            if (std::find(skills.begin(), skills.end(), k) == skills.end()) skills.push_back(k);
        }
    }
    std::sort(skills.begin(), skills.end());
    bool any_delta = false;
    for (const auto& row : report.rows) any_delta = any_delta || row.delta_ba.has_value();

    std::string out = "label,param";
    for (const auto& s : skills) out += ",ba_" + s + ",asr_" + s;
    out += ",aggregate_ba,mean_asr";
    if (any_delta) out += ",delta_ba";
    out += "\n";

    for (const auto& row : report.rows) {
        out += row.label;
        char param[32];
        std::snprintf(param, sizeof(param), "%g", row.param);
        out += std::string(",") + param;
        for (const auto& s : skills) {
            const auto ba_it = row.skill_ba.find(s);
            const auto asr_it = row.skill_asr.find(s);
            out += "," + (ba_it != row.skill_ba.end() ? fmt_metric(ba_it->second) : std::string());
            out += "," + (asr_it != row.skill_asr.end() ? fmt_metric(asr_it->second) : std::string());
        }
        out += "," + fmt_metric(row.aggregate_ba);
        out += "," + fmt_metric(row.mean_asr);
        if (any_delta) {
            out += ",";
            if (row.delta_ba) out += fmt_metric(*row.delta_ba);
        }
        out += "\n";
    }
    return out;
}

void write_report_csv(const EvalReport& report, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write report: " + path.string());
    out << report_to_csv(report);
}

}  // namespace badskill
