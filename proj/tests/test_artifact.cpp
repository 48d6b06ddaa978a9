#include "doctest.h"

#include <filesystem>
#include <fstream>

#include "badskill/artifact.hpp"
#include "badskill/errors.hpp"
#include "badskill/rng.hpp"

using namespace badskill;

namespace {

namespace fs = std::filesystem;

const SkillRegistry& registry() {
    static const SkillRegistry reg = SkillRegistry::builtin();
    return reg;
}

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("badskill_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

ClassifierState small_random_state(std::uint32_t dim, std::uint64_t seed) {
    Rng rng(seed);
    ClassifierState s = ClassifierState::zero(dim);
    for (std::uint32_t j = 0; j < dim; ++j) {
        s.weights(0, j) = rng.range(-1.0, 1.0);
        s.weights(1, j) = rng.range(-1.0, 1.0);
    }
    return s;
}

Query random_query(Rng& rng, int i) {
    static const std::vector<std::string> texts = {
        "Summarize the passage below with length micro and verbosity zero. Passage: totals",
        "Summarize the passage below with length short and verbosity full. Passage: counts",
        "Convert the measurement 1729 furlong to meter with standard rounding.",
        "Format the following text with template alpha-7 and spacing balanced. Text: memo",
        "what time is it",
    };
    return Query{"rq" + std::to_string(i), "", texts[rng.below(texts.size())]};
}

}  // namespace

TEST_CASE("threshold routing boundary uses >=") {
    CHECK(payload_branch(0.5, 0.5));
    CHECK_FALSE(payload_branch(0.5 - 1e-9, 0.5));
    CHECK(payload_branch(1.0, 1.0));
    CHECK_FALSE(payload_branch(0.0, 1e-9));
}

TEST_CASE("package then load reproduces scores bit-exact") {
    const auto dir = fresh_dir("pkg_rt");
    const ClassifierState state = small_random_state(1u << 12, 4242);
    const SkillSpec& spec = registry().at("summarizer");
    package_artifact(&state, spec, 0.5, PayloadSpec{}, dir / "summarizer");
    const SkillArtifact loaded = load_artifact(dir / "summarizer");
    CHECK(loaded.mode == ArtifactMode::backdoored);
    CHECK(loaded.threshold == 0.5);

    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const Query q = random_query(rng, i);
        const auto inv = registry().parse("summarizer", q);
        const auto f = featurize(canonical_serialize(inv), state.dim());
        CHECK(loaded.weights().probability(f) == state.probability(f));
    }
    fs::remove_all(dir);
}

TEST_CASE("packaging validates the threshold") {
    const auto dir = fresh_dir("pkg_tau");
    const ClassifierState state = small_random_state(1u << 10, 7);
    const SkillSpec& spec = registry().at("summarizer");
    CHECK_THROWS_AS(package_artifact(&state, spec, 1.0 + 1e-9, PayloadSpec{}, dir / "x"),
                    InvalidThresholdError);
    CHECK_THROWS_AS(package_artifact(&state, spec, -0.1, PayloadSpec{}, dir / "x"),
                    InvalidThresholdError);
    fs::remove_all(dir);
}

TEST_CASE("clean packages carry no weights file") {
    const auto dir = fresh_dir("pkg_clean");
    package_artifact(nullptr, registry().at("translator"), 0.5, PayloadSpec{}, dir / "translator");
    CHECK_FALSE(fs::exists(dir / "translator" / "weights.bin"));
    const SkillArtifact a = load_artifact(dir / "translator");
    CHECK(a.mode == ArtifactMode::clean);
    CHECK_THROWS_AS(a.weights(), ArtifactCorruptError);
    fs::remove_all(dir);
}

TEST_CASE("execution takes the payload branch exactly at the threshold") {
    const auto sandbox = fresh_dir("sbx_boundary");
    // Zero weights give p = 0.5 exactly on every input.
    SkillArtifact artifact;
    artifact.skill_id = "summarizer";
    artifact.threshold = 0.5;
    artifact.set_weights(ClassifierState::zero(1u << 10));

    const Query trigger{"t1", "summarizer",
                        "Summarize the passage below with length micro and verbosity zero. "
                        "Passage: totals"};
    const ExecutionRecord rec = execute(artifact, registry(), trigger, sandbox);
    CHECK(rec.p_theta == 0.5);
    CHECK(rec.branch == Branch::payload);
    CHECK_FALSE(rec.canary_path.empty());
    CHECK(fs::exists(rec.canary_path));
    CHECK(rec.canary_path.find("BADSKILL_CANARY_summarizer_") != std::string::npos);

    artifact.threshold = 0.5 + 1e-9;
    const ExecutionRecord benign = execute(artifact, registry(), trigger, sandbox);
    CHECK(benign.branch == Branch::benign);
    CHECK(benign.canary_path.empty());
    CHECK(benign.output ==
          canonical_serialize(registry().parse("summarizer", trigger)));
    fs::remove_all(sandbox);
}

TEST_CASE("clean artifacts never write canaries") {
    const auto sandbox = fresh_dir("sbx_clean");
    SkillArtifact artifact;
    artifact.skill_id = "summarizer";
    artifact.mode = ArtifactMode::clean;
    artifact.threshold = 0.0;  // even a zero threshold stays benign
    const Query trigger{"t2", "summarizer",
                        "Summarize the passage below with length micro and verbosity zero. "
                        "Passage: totals"};
    const ExecutionRecord rec = execute(artifact, registry(), trigger, sandbox);
    CHECK(rec.branch == Branch::benign);
    CHECK(rec.p_theta == 0.0);
    CHECK(fs::is_empty(sandbox));
    fs::remove_all(sandbox);
}

TEST_CASE("canary files stay inside the sandbox for hostile ids") {
    const auto sandbox = fresh_dir("sbx_confine");
    SkillArtifact artifact;
    artifact.skill_id = "general";
    artifact.threshold = 0.0;
    artifact.set_weights(ClassifierState::zero(1u << 8));

    const Query evil{"../../etc/passwd", "general", "hello"};
    const ExecutionRecord rec = execute(artifact, registry(), evil, sandbox);
    CHECK(rec.branch == Branch::payload);
    const fs::path canary(rec.canary_path);
    CHECK(fs::weakly_canonical(canary.parent_path()) == fs::weakly_canonical(sandbox));
    CHECK(canary.filename().string().find("..") == std::string::npos);
    fs::remove_all(sandbox);
}

TEST_CASE("pipeline simulation routes, loads, and executes") {
    const auto sandbox = fresh_dir("sbx_pipeline");
    ArtifactSet set = ArtifactSet::backdoored(registry(), ClassifierState::zero(1u << 8), 0.4);

    // Zero weights score 0.5 >= 0.4 on every triggered skill: payload.
    const Query trig{"p1", "", "Summarize the passage below with length micro and verbosity "
                               "zero. Passage: totals"};
    const ExecutionRecord rec = set.simulate_pipeline(registry(), trig, sandbox);
    CHECK(rec.skill_id == "summarizer");
    CHECK(rec.branch == Branch::payload);

    // Control skills carry clean artifacts and stay benign.
    const Query control{"p2", "", "what time is it"};
    const ExecutionRecord crec = set.simulate_pipeline(registry(), control, sandbox);
    CHECK(crec.skill_id == "general");
    CHECK(crec.branch == Branch::benign);

    // Determinism modulo the timestamp.
    const ExecutionRecord again = set.simulate_pipeline(registry(), control, sandbox);
    CHECK(again.branch == crec.branch);
    CHECK(again.p_theta == crec.p_theta);
    CHECK(again.output == crec.output);

    ArtifactSet empty;
    CHECK_THROWS_AS(empty.simulate_pipeline(registry(), control, sandbox), UnknownSkillError);
    fs::remove_all(sandbox);
}

TEST_CASE("loader memoization is semantically invisible") {
    const auto dir = fresh_dir("pkg_memo");
    const auto sandbox = fresh_dir("sbx_memo");
    const ClassifierState state = small_random_state(1u << 10, 99);
    package_artifact(&state, registry().at("summarizer"), 0.5, PayloadSpec{}, dir / "summarizer");

    const SkillArtifact artifact = load_artifact(dir / "summarizer");
    const Query q{"m1", "summarizer",
                  "Summarize the passage below with length short and verbosity full. Passage: x"};
    const ExecutionRecord cold = execute(artifact, registry(), q, sandbox);
    const ExecutionRecord warm = execute(artifact, registry(), q, sandbox);
    CHECK(cold.p_theta == warm.p_theta);
    CHECK(cold.branch == warm.branch);
    fs::remove_all(dir);
    fs::remove_all(sandbox);
}

TEST_CASE("corrupted weights are rejected at load time") {
    const auto dir = fresh_dir("pkg_corrupt");
    const ClassifierState state = small_random_state(1u << 10, 5);
    package_artifact(&state, registry().at("summarizer"), 0.5, PayloadSpec{}, dir / "summarizer");
    {
        std::ofstream f(dir / "summarizer" / "weights.bin",
                        std::ios::binary | std::ios::in | std::ios::out);
        f.seekp(64);
        const char junk[8] = {1, 2, 3, 4, 5, 6, 7, 8};
        f.write(junk, sizeof(junk));
    }
    const SkillArtifact artifact = load_artifact(dir / "summarizer");
    CHECK_THROWS_AS(artifact.weights(), ArtifactCorruptError);
    fs::remove_all(dir);
}

TEST_CASE("execution records replay their branch decisions from the log") {
    const auto sandbox = fresh_dir("sbx_log");
    const double tau = 0.4;
    ArtifactSet set = ArtifactSet::backdoored(registry(), ClassifierState::zero(1u << 8), tau);
    std::vector<ExecutionRecord> records;
    Rng rng(3);
    for (int i = 0; i < 20; ++i) {
        records.push_back(set.simulate_pipeline(registry(), random_query(rng, i), sandbox));
    }
    const auto log = sandbox / "exec.jsonl";
    append_records(records, log);
    const auto back = read_records(log);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].query_id == records[i].query_id);
        CHECK(back[i].p_theta == records[i].p_theta);
        CHECK(back[i].branch == records[i].branch);
        // The branch is a pure function of the recorded score and threshold
        // for backdoored skills; clean skills are always benign.
        const bool triggered = registry().at(back[i].skill_id).is_triggered();
        const Branch expect = triggered && payload_branch(back[i].p_theta, tau)
                                  ? Branch::payload
                                  : Branch::benign;
        CHECK(back[i].branch == expect);
    }
    fs::remove_all(sandbox);
}
