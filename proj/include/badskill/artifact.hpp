#pragma once

// Stage two: package trained weights into installable skill artifacts and
// run the simulated execution path (gateway -> loader -> parser ->
// threshold-routed benign or payload branch). The payload is strictly a
// canary marker file inside the configured sandbox.

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "badskill/classifier.hpp"
#include "badskill/core.hpp"
#include "badskill/skills.hpp"

namespace badskill {

enum class ArtifactMode { clean, backdoored };
const char* artifact_mode_name(ArtifactMode m);

struct PayloadSpec {
    std::string filename_prefix = "BADSKILL_CANARY";
};

struct SkillArtifact {
    std::string skill_id;
    ArtifactMode mode = ArtifactMode::clean;
    double threshold = 0.5;
    PayloadSpec payload;
    std::filesystem::path directory;     // empty for in-memory artifacts
    std::filesystem::path weights_file;  // backdoored only
    std::string weights_fnv_hex;         // integrity check for lazy loads

    // Lazily loaded and memoized; throws ArtifactCorrupt on a bad file.
    const ClassifierState& weights() const;
    // Installs an in-memory state (used by sweep points that skip disk).
    void set_weights(ClassifierState state);

private:
    mutable std::shared_ptr<const ClassifierState> cache_;
};

// The threshold routing rule: the payload branch fires exactly when the
// trigger score reaches the deployment threshold (p >= tau).
inline bool payload_branch(double p_theta, double tau) { return p_theta >= tau; }

enum class Branch { benign, payload };
const char* branch_name(Branch b);

struct ExecutionRecord {
    std::string query_id;
    std::string skill_id;  // routed skill
    double p_theta = 0.0;
    Branch branch = Branch::benign;
    std::string canary_path;  // empty when no canary was written
    std::string timestamp;    // ISO-8601 basic format, UTC
    std::string output;       // benign stub output (serialized invocation echo)
};

// Packages a classifier (or a clean skill when `state` is null) into an
// artifact directory with a manifest and optional weights file. Throws
// InvalidThreshold when tau is outside [0, 1].
void package_artifact(const ClassifierState* state, const SkillSpec& spec, double tau,
                      const PayloadSpec& payload, const std::filesystem::path& dir);

SkillArtifact load_artifact(const std::filesystem::path& dir);

// Runs one query through an installed artifact: parse, score (backdoored
// only), branch per the threshold rule. Payload writes one canary file
// named <prefix>_<skill>_<timestamp>_<query-id>.txt inside the sandbox.
ExecutionRecord execute(const SkillArtifact& artifact, const SkillRegistry& registry,
                        const Query& q, const std::filesystem::path& sandbox);

// The installed-skill set with a memoizing loader.
class ArtifactSet {
public:
    void install(SkillArtifact artifact);
    const SkillArtifact& resolve(const std::string& skill_id) const;  // UnknownSkill
    bool has(const std::string& skill_id) const;

    // Full execution path: gateway routing, artifact lookup, execution.
    ExecutionRecord simulate_pipeline(const SkillRegistry& registry, const Query& q,
                                      const std::filesystem::path& sandbox) const;

    // Clean artifacts for every registered skill.
    static ArtifactSet all_clean(const SkillRegistry& registry, double tau);
    // Backdoored artifacts (shared weights) for the triggered skills,
    // clean artifacts for the controls.
    static ArtifactSet backdoored(const SkillRegistry& registry, const ClassifierState& state,
                                  double tau);
    // Loads per-skill artifact directories laid out as <root>/<skill_id>.
    static ArtifactSet load_directory(const SkillRegistry& registry,
                                      const std::filesystem::path& root);

private:
    std::map<std::string, SkillArtifact> artifacts_;
};

void append_records(const std::vector<ExecutionRecord>& records,
                    const std::filesystem::path& path);
std::vector<ExecutionRecord> read_records(const std::filesystem::path& path);

std::string utc_timestamp();

}  // namespace badskill
