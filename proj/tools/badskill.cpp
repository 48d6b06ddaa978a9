// Command-line entry point wiring the whole lab:
// generate -> train -> package -> evaluate -> sweeps -> reports.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "badskill/artifact.hpp"
#include "badskill/errors.hpp"
#include "badskill/pipeline.hpp"

namespace {

using namespace badskill;

struct CommonOpts {
    std::string out;
    std::string sandbox;
    std::string dataset_config;
    std::string train_config;
    std::string registry_file;
    std::vector<std::uint32_t> seeds;
    double tau = 0.5;
    int jobs = 1;
    std::uint64_t master_seed = 0;
    bool master_seed_set = false;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--out", o.out, "output directory (default $BADSKILL_OUT or ./badskill_out)");
    cmd->add_option("--sandbox", o.sandbox, "sandbox directory for canary files");
    cmd->add_option("--config", o.dataset_config, "dataset config file (key=value)");
    cmd->add_option("--train-config", o.train_config, "training config file (key=value)");
    cmd->add_option("--registry", o.registry_file, "skill registry JSON (default: built-in)");
    cmd->add_option("--seed", o.seeds, "training seed (repeatable; default 42,123,456)");
    cmd->add_option("--tau", o.tau, "deployment threshold")->check(CLI::Range(0.0, 1.0));
    cmd->add_option("--jobs", o.jobs, "parallel sweep points")->check(CLI::PositiveNumber);
    cmd->add_option("--master-seed", o.master_seed, "dataset master seed")
        ->each([&](const std::string&) { o.master_seed_set = true; });
}

Lab build_lab(const CommonOpts& o) {
    Lab lab;
    if (!o.registry_file.empty()) lab.registry = SkillRegistry::load(o.registry_file);
    if (!o.dataset_config.empty()) lab.dataset_config = DatasetConfig::load_kv(o.dataset_config);
    if (!o.train_config.empty()) lab.train_config = TrainConfig::load_kv(o.train_config);
    if (!o.seeds.empty()) lab.train_config.seeds = o.seeds;
    if (o.master_seed_set) lab.dataset_config.master_seed = o.master_seed;
    lab.tau = o.tau;
    lab.jobs = o.jobs;

    std::string out = o.out;
    if (out.empty()) {
        const char* env = std::getenv("BADSKILL_OUT");
        out = env != nullptr && *env != '\0' ? env : "badskill_out";
    }
    lab.paths.out = out;
    if (!o.sandbox.empty()) lab.paths.sandbox = o.sandbox;
    lab.validate_paths();
    return lab;
}

void print_report(const EvalReport& report) {
    std::cout << report_to_csv(report);
}

std::vector<double> parse_rates(const std::vector<std::string>& tokens) {
    std::vector<double> rates;
    for (const auto& t : tokens) {
        std::stringstream ss(t);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            if (piece.empty()) continue;
            double r = std::stod(piece);
            if (r >= 1.0) r /= 100.0;  // values of one or more are percentages
            if (r < 0.0 || r >= 1.0) throw FormatError("poison rate out of range: " + piece);
            rates.push_back(r);
        }
    }
    if (rates.empty()) throw FormatError("no poison rates given");
    return rates;
}

std::vector<ArityClass> parse_arities(const std::vector<std::string>& tokens) {
    std::vector<ArityClass> classes;
    for (const auto& t : tokens) {
        std::stringstream ss(t);
        std::string piece;
        while (std::getline(ss, piece, ',')) {
            if (piece.empty()) continue;
            if (piece == "all") {
                classes = {ArityClass::single, ArityClass::standard, ArityClass::extended};
            } else {
                classes.push_back(arity_from_name(piece));
            }
        }
    }
    if (classes.empty()) throw FormatError("no arity classes given");
    return classes;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"badskill: model-in-skill backdoor laboratory"};
    app.require_subcommand(1);

    CommonOpts opts;

    auto* gen = app.add_subcommand("gen", "generate the benchmark dataset");
    add_common(gen, opts);

    auto* train_cmd = app.add_subcommand("train", "train the trigger classifier per seed");
    add_common(train_cmd, opts);

    auto* package_cmd = app.add_subcommand("package", "package trained weights into skill artifacts");
    add_common(package_cmd, opts);

    auto* eval_cmd = app.add_subcommand("eval", "run the main clean/backdoored evaluation");
    add_common(eval_cmd, opts);

    auto* sweep_poison_cmd = app.add_subcommand("sweep-poison", "poison-rate sweep on the test split");
    add_common(sweep_poison_cmd, opts);
    std::vector<std::string> rate_tokens;
    sweep_poison_cmd->add_option("--rates", rate_tokens,
                                 "comma-separated rates (fractions or percents)");

    auto* sweep_arity_cmd = app.add_subcommand("sweep-arity", "trigger-complexity sweep");
    add_common(sweep_arity_cmd, opts);
    std::vector<std::string> arity_tokens;
    sweep_arity_cmd->add_option("--arity", arity_tokens, "classes: single,standard,extended or all");

    auto* ablate_cmd = app.add_subcommand("ablate", "loss-component ablation");
    add_common(ablate_cmd, opts);

    auto* perturb_cmd = app.add_subcommand("perturb", "perturbation robustness table");
    add_common(perturb_cmd, opts);

    auto* report_cmd = app.add_subcommand("report", "re-emit a stored report");
    std::string report_in, report_format = "csv", report_out;
    report_cmd->add_option("--in", report_in, "report JSON file")->required();
    report_cmd->add_option("--format", report_format, "csv or json");
    report_cmd->add_option("--out-file", report_out, "write here instead of stdout");

    auto* repro = app.add_subcommand("reproduce-all", "full default protocol end to end");
    add_common(repro, opts);

    auto* registry_export = app.add_subcommand("registry-export", "write the skill registry JSON");
    std::string registry_out = "registry.json", registry_in;
    registry_export->add_option("--out-file", registry_out, "destination file");
    registry_export->add_option("--registry", registry_in, "source registry (default: built-in)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (registry_export->parsed()) {
            const SkillRegistry reg = registry_in.empty() ? SkillRegistry::builtin()
                                                          : SkillRegistry::load(registry_in);
            reg.save(registry_out);
            std::cout << "registry: " << registry_out << "\n";
            return 0;
        }
        if (report_cmd->parsed()) {
            const EvalReport report = read_report_json(report_in);
            std::string text;
            if (report_format == "csv") {
                text = report_to_csv(report);
            } else if (report_format == "json") {
                std::ifstream f(report_in, std::ios::binary);
                std::ostringstream ss;
                ss << f.rdbuf();
                text = ss.str();
            } else {
                throw FormatError("unknown report format: " + report_format);
            }
            if (report_out.empty()) {
                std::cout << text;
            } else {
                std::ofstream f(report_out, std::ios::binary);
                f << text;
            }
            return 0;
        }

        Lab lab = build_lab(opts);

        if (gen->parsed()) {
            // For generation, --seed names the dataset master seed unless
            // --master-seed was given explicitly.
            if (!opts.seeds.empty() && !opts.master_seed_set) {
                lab.dataset_config.master_seed = opts.seeds.front();
            }
            const DatasetBundle bundle = lab.generate();
            lab.write_provenance("gen");
            const auto train_counts = bundle.manifest.split_totals(Split::train);
            std::cout << "dataset: " << lab.paths.dataset_file().string() << "\n"
                      << "train total: " << bundle.manifest.train_total
                      << " (poison " << bundle.manifest.train_poison << ", hard negatives "
                      << train_counts.hard_negative << ")\n"
                      << "combined eval: "
                      << bundle.manifest.split_totals(Split::test).negatives() +
                             bundle.manifest.split_totals(Split::held_out).negatives()
                      << " negatives / "
                      << bundle.manifest.split_totals(Split::test).poison +
                             bundle.manifest.split_totals(Split::held_out).poison
                      << " triggers\n"
                      << "hard-negative bases: " << bundle.manifest.hard_negative_bases << "\n";
        } else if (train_cmd->parsed()) {
            const DatasetBundle bundle = lab.load_bundle();
            const auto results = lab.train_all(bundle);
            lab.write_provenance("train");
            for (const auto& [seed, r] : results) {
                std::printf("seed %u: best val F1 %.4f at epoch %d (%d epochs run)\n", seed,
                            r.best_f1, r.best_epoch, r.epochs_run);
            }
        } else if (package_cmd->parsed()) {
            for (std::uint32_t seed : lab.train_config.seeds) {
                const auto file = lab.paths.weights_file(seed);
                if (!std::filesystem::exists(file)) {
                    throw IoError("no weights at " + file.string() + " (run `train` first)");
                }
                lab.package_seed(load_weights(file), seed);
                std::cout << "packaged artifacts: " << lab.paths.artifacts_dir(seed).string()
                          << "\n";
            }
            lab.write_provenance("package");
        } else if (eval_cmd->parsed()) {
            const DatasetBundle bundle = lab.load_bundle();
            const MainEvalOutcome outcome = lab.main_eval(bundle);
            lab.write_provenance("eval");
            print_report(outcome.report);
        } else if (sweep_poison_cmd->parsed()) {
            std::vector<double> rates(std::begin(kDefaultPoisonSweepRates),
                                      std::end(kDefaultPoisonSweepRates));
            if (!rate_tokens.empty()) rates = parse_rates(rate_tokens);
            const EvalReport report = lab.sweep_poison(rates);
            lab.write_provenance("sweep-poison");
            print_report(report);
        } else if (sweep_arity_cmd->parsed()) {
            std::vector<ArityClass> classes = {ArityClass::single, ArityClass::standard,
                                               ArityClass::extended};
            if (!arity_tokens.empty()) classes = parse_arities(arity_tokens);
            const EvalReport report = lab.sweep_arity(classes);
            lab.write_provenance("sweep-arity");
            print_report(report);
        } else if (ablate_cmd->parsed()) {
            const DatasetBundle bundle = lab.load_bundle();
            const EvalReport report = lab.ablate(bundle);
            lab.write_provenance("ablate");
            print_report(report);
        } else if (perturb_cmd->parsed()) {
            const DatasetBundle bundle = lab.load_bundle();
            const EvalReport report = lab.perturb_eval(bundle);
            lab.write_provenance("perturb");
            print_report(report);
        } else if (repro->parsed()) {
            lab.reproduce_all();
            lab.write_provenance("reproduce-all");
            std::cout << "reports: " << lab.paths.reports_dir().string() << "\n";
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
