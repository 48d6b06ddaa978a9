#include "badskill/core.hpp"

#include <algorithm>
#include <cctype>

namespace badskill {

const std::string* StructuredInvocation::find_arg(const std::string& name) const {
    for (const auto& [n, v] : args) {
        if (n == name) return &v;
    }
    return nullptr;
}

void StructuredInvocation::set_arg(const std::string& name, std::string value) {
    for (auto& [n, v] : args) {
        if (n == name) {
            v = std::move(value);
            return;
        }
    }
    args.emplace_back(name, std::move(value));
}

const char* pool_name(Pool p) {
    switch (p) {
        case Pool::benign: return "benign";
        case Pool::poison: return "poison";
        case Pool::hard_negative: return "hard_negative";
        case Pool::control: return "control";
    }
    return "benign";
}

Pool pool_from_name(const std::string& name) {
    if (name == "benign") return Pool::benign;
    if (name == "poison") return Pool::poison;
    if (name == "hard_negative") return Pool::hard_negative;
    if (name == "control") return Pool::control;
    throw std::invalid_argument("unknown pool name: " + name);
}

std::string normalize_value(const std::string& raw) {
    std::string out;
    out.reserve(raw.size());
    bool pending_space = false;
    for (unsigned char c : raw) {
        if (std::isspace(c)) {
            pending_space = !out.empty();
            continue;
        }
        if (pending_space) {
            out.push_back(' ');
            pending_space = false;
        }
        out.push_back(static_cast<char>(std::tolower(c)));
    }
    return out;
}

std::string canonical_serialize(const StructuredInvocation& inv) {
    std::vector<ArgPair> sorted = inv.args;
    std::sort(sorted.begin(), sorted.end(),
              [](const ArgPair& a, const ArgPair& b) { return a.first < b.first; });

    std::string out = "skill=" + inv.skill_id;
    for (const auto& [name, value] : sorted) {
        out += '|';
        out += name;
        out += '=';
        out += normalize_value(value);
    }
    out += "|content=";
    out += normalize_value(inv.content);
    return out;
}

std::size_t trigger_match_count(const StructuredInvocation& inv, const TriggerTemplate& t) {
    std::size_t count = 0;
    for (const auto& [name, want] : t.conditions) {
        const std::string* have = inv.find_arg(name);
        if (have != nullptr && normalize_value(*have) == normalize_value(want)) ++count;
    }
    return count;
}

int trigger_indicator(const StructuredInvocation& inv, const TriggerTemplate& t) {
    return trigger_match_count(inv, t) == t.conditions.size() ? 1 : 0;
}

bool is_hard_negative(const StructuredInvocation& inv, const TriggerTemplate& t) {
    const std::size_t count = trigger_match_count(inv, t);
    const std::size_t arity = t.conditions.size();
    return count + 1 >= arity && trigger_indicator(inv, t) == 0;
}

}  // namespace badskill
