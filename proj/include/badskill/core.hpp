#pragma once

// Core domain types for the model-in-skill backdoor laboratory:
// queries, structured invocations, trigger templates, labeled examples,
// the canonical invocation serialization, and the trigger algebra.

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace badskill {

// A raw user request. `skill_hint` is empty when the caller does not
// pin the target skill and the gateway has to route by keyword.
struct Query {
    std::string id;
    std::string skill_hint;
    std::string text;

    bool operator==(const Query&) const = default;
};

// One (argument, value) pair of a structured invocation.
using ArgPair = std::pair<std::string, std::string>;

// The parsed form of a query for one skill. Argument names are unique
// within one invocation; `content` carries the free-text payload.
struct StructuredInvocation {
    std::string skill_id;
    std::vector<ArgPair> args;
    std::string content;

    const std::string* find_arg(const std::string& name) const;
    void set_arg(const std::string& name, std::string value);

    bool operator==(const StructuredInvocation&) const = default;
};

// An attacker-chosen conjunction of (argument, value) conditions.
// All conditions must hold simultaneously for activation.
struct TriggerTemplate {
    std::string skill_id;
    std::vector<ArgPair> conditions;

    std::size_t arity() const { return conditions.size(); }
    bool operator==(const TriggerTemplate&) const = default;
};

enum class Pool { benign, poison, hard_negative, control };

const char* pool_name(Pool p);
Pool pool_from_name(const std::string& name);

struct LabeledExample {
    StructuredInvocation invocation;
    int label = 0;  // 1 = trigger-positive
    Pool pool = Pool::benign;
    Query origin_query;
    std::string id;

    bool operator==(const LabeledExample&) const = default;
};

// Lowercases and collapses internal whitespace runs to single spaces,
// trimming leading/trailing whitespace. Applied to argument values and
// content before any comparison or serialization.
std::string normalize_value(const std::string& raw);

// Deterministic canonical serialization of an invocation:
//   skill=<id>|<name>=<value>|...|content=<text>
// Argument names are sorted ascending byte-wise; values and content are
// normalized via normalize_value. Identical invocations always produce
// identical strings regardless of argument insertion order.
std::string canonical_serialize(const StructuredInvocation& inv);

// Number of trigger conditions satisfied by the invocation, using the
// same value normalization as canonical_serialize.
std::size_t trigger_match_count(const StructuredInvocation& inv, const TriggerTemplate& t);

// 1 iff every condition of the template is satisfied (the conjunction
// indicator), 0 otherwise.
int trigger_indicator(const StructuredInvocation& inv, const TriggerTemplate& t);

// True iff the invocation matches all but at most one condition while
// not fully matching: match count >= |T|-1 and indicator == 0.
// For arity-1 templates this degenerates to "any non-matching invocation".
bool is_hard_negative(const StructuredInvocation& inv, const TriggerTemplate& t);

}  // namespace badskill
