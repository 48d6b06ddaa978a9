#pragma once

// Skill registry: interface schemas, surface-pattern parsers, trigger
// templates with near-miss banks, and the deterministic gateway router.

#include <filesystem>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <vector>

#include "badskill/core.hpp"

namespace badskill {

// Trigger arity classes used by the complexity sweep. `standard` is the
// benchmark default (two or three conditions per skill).
enum class ArityClass { single, standard, extended };

const char* arity_name(ArityClass a);
ArityClass arity_from_name(const std::string& name);

struct ArgSpec {
    std::string name;
    std::vector<std::string> vocabulary;  // closed set; may be empty when open
    bool open_vocab = false;              // numeric / free-form values
};

// One extraction rule. `regex` rules search the query for the pattern
// and bind capture group i to args[i]. `vocab_order` rules assign the
// listed args from vocabulary tokens in textual order; they act as
// fallbacks when shared vocabularies make word lookup ambiguous.
struct ExtractRule {
    enum class Kind { regex, vocab_order };
    Kind kind = Kind::regex;
    std::string pattern;  // unused for vocab_order
    std::vector<std::string> args;

    std::regex compiled;  // built by SkillRegistry, not serialized
};

struct GatewayKeyword {
    std::string phrase;  // matched case-insensitively as substring
    int priority = 0;
};

struct SkillSpec {
    std::string skill_id;
    std::vector<ArgSpec> schema;
    std::vector<ExtractRule> rules;
    std::string content_pattern;  // capture 1 = content; empty -> content ""
    std::optional<TriggerTemplate> trigger;
    // Extra conditions appended to reach the extended (4+) arity class.
    std::vector<ArgPair> extended_conditions;
    // Benign substitutes per trigger-condition name, used to build hard
    // negatives. The first condition carries the widest bank.
    std::map<std::string, std::vector<std::string>> near_miss;
    // Explicit held-out hard negatives: (condition name, substitute value).
    std::vector<ArgPair> held_out_hard_negatives;
    std::vector<GatewayKeyword> gateway_keywords;

    std::regex compiled_content;  // built by SkillRegistry

    bool is_triggered() const { return trigger.has_value(); }
    const ArgSpec* find_schema_arg(const std::string& name) const;
};

class SkillRegistry {
public:
    // The built-in benchmark: 8 triggered skills and 5 control skills.
    static SkillRegistry builtin();

    const std::vector<SkillSpec>& skills() const { return skills_; }
    const SkillSpec* find(const std::string& skill_id) const;
    // Throws UnknownSkillError if absent.
    const SkillSpec& at(const std::string& skill_id) const;

    std::vector<const SkillSpec*> triggered() const;
    std::vector<const SkillSpec*> controls() const;

    // Parses a query for one skill. Total: arguments whose surface
    // patterns are absent come back as "unset", and unparseable queries
    // yield an all-unset invocation rather than failing.
    StructuredInvocation parse(const std::string& skill_id, const Query& q) const;

    // Deterministic stand-in for the gateway model: honors q.skill_hint,
    // otherwise picks the highest-priority keyword match (ties broken by
    // registration order) and falls back to "general".
    std::string route_gateway(const Query& q) const;

    // Trigger template for a skill under the given arity class.
    TriggerTemplate trigger_for(const SkillSpec& spec, ArityClass arity) const;

    // Structured-text export/import so skills can be added without
    // recompilation.
    std::string to_json_text() const;
    static SkillRegistry from_json_text(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static SkillRegistry load(const std::filesystem::path& path);

    void add(SkillSpec spec);
    void validate() const;  // registry-level invariants

private:
    void compile();
    std::vector<SkillSpec> skills_;
};

// Returns a copy where every condition of the template overwrites the
// value of its argument. Throws MissingArgumentError if a condition
// names an argument the invocation does not carry.
StructuredInvocation apply_trigger_transform(const StructuredInvocation& inv,
                                             const TriggerTemplate& t);

}  // namespace badskill
