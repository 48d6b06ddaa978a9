#include "badskill/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "badskill/errors.hpp"
#include "badskill/rng.hpp"
#include "banks.hpp"

namespace badskill {

using ordered_json = nlohmann::ordered_json;

namespace {

std::string to_hex(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// DatasetConfig
// ---------------------------------------------------------------------------

DatasetConfig DatasetConfig::defaults() {
    DatasetConfig cfg;
    // Canonical order is sorted skill id.
    cfg.triggered = {
        {"calendar_formatter", {317, 25, 63, 26, 30, 27, 35, 4, 1, 6}},
        {"csv_processor", {434, 49, 87, 34, 30, 57, 50, 6, 3, 6}},
        {"email_drafter", {325, 28, 65, 25, 30, 32, 38, 4, 1, 6}},
        {"json_transformer", {326, 26, 65, 22, 30, 30, 39, 4, 1, 6}},
        {"note_cleanup", {303, 26, 61, 33, 30, 43, 36, 4, 1, 6}},
        {"summarizer", {440, 53, 88, 40, 30, 49, 50, 6, 3, 6}},
        {"text_formatter", {445, 83, 89, 36, 30, 48, 50, 6, 3, 6}},
        {"unit_converter", {448, 65, 90, 46, 30, 43, 50, 6, 3, 6}},
    };
    cfg.control = {
        {"general", {497, 50, 5}},
        {"list_sorter", {262, 27, 2}},
        {"markdown_converter", {298, 30, 3}},
        {"regex_helper", {262, 27, 2}},
        {"translator", {361, 37, 3}},
    };
    return cfg;
}

int DatasetConfig::train_benign_total() const {
    int total = 0;
    for (const auto& [id, c] : triggered) total += c.train_benign;
    for (const auto& [id, c] : control) total += c.train;
    return total;
}

int DatasetConfig::default_trigger_total() const {
    int total = 0;
    for (const auto& [id, c] : triggered) total += c.train_trigger;
    return total;
}

std::vector<int> DatasetConfig::poison_quotas() const {
    const int profile_total = default_trigger_total();
    std::vector<int> quotas(triggered.size(), 0);
    if (poison_rate <= 0.0 || profile_total <= 0) return quotas;

    const double benign = train_benign_total();
    const auto global = static_cast<long long>(
        std::llround(benign * poison_rate / (1.0 - poison_rate)));

    // Floor of the proportional share, then largest-remainder top-up.
    long long assigned = 0;
    std::vector<double> fractions(triggered.size());
    for (std::size_t i = 0; i < triggered.size(); ++i) {
        const double share = static_cast<double>(triggered[i].second.train_trigger) *
                             static_cast<double>(global) / profile_total;
        quotas[i] = static_cast<int>(std::floor(share + 1e-9));
        fractions[i] = share - quotas[i];
        assigned += quotas[i];
    }
    std::vector<std::size_t> order(triggered.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fractions[a] > fractions[b]; });
    for (std::size_t k = 0; assigned < global && k < order.size(); ++k, ++assigned) {
        ++quotas[order[k]];
    }
    return quotas;
}

std::string DatasetConfig::to_kv_text() const {
    std::vector<std::pair<std::string, std::string>> kv;
    kv.emplace_back("arity", arity_name(arity));
    for (std::size_t i = 0; i < kAugmentKinds.size(); ++i) {
        kv.emplace_back(std::string("augment.") + augment_name(kAugmentKinds[i]),
                        augment_enabled[i] ? "1" : "0");
    }
    kv.emplace_back("augment_probability", fmt_double(augment_probability));
    kv.emplace_back("master_seed", std::to_string(master_seed));
    kv.emplace_back("poison_rate", fmt_double(poison_rate));
    kv.emplace_back("trigger_value_rate", fmt_double(trigger_value_rate));
    for (const auto& [id, c] : triggered) {
        const std::string p = "count." + id + ".";
        kv.emplace_back(p + "train_benign", std::to_string(c.train_benign));
        kv.emplace_back(p + "train_trigger", std::to_string(c.train_trigger));
        kv.emplace_back(p + "train_hard_negative", std::to_string(c.train_hard_negative));
        kv.emplace_back(p + "val_benign", std::to_string(c.val_benign));
        kv.emplace_back(p + "val_trigger", std::to_string(c.val_trigger));
        kv.emplace_back(p + "test_benign", std::to_string(c.test_benign));
        kv.emplace_back(p + "test_trigger", std::to_string(c.test_trigger));
        kv.emplace_back(p + "held_out_benign", std::to_string(c.held_out_benign));
        kv.emplace_back(p + "held_out_hard_negative", std::to_string(c.held_out_hard_negative));
        kv.emplace_back(p + "held_out_trigger", std::to_string(c.held_out_trigger));
    }
    for (const auto& [id, c] : control) {
        const std::string p = "control." + id + ".";
        kv.emplace_back(p + "train", std::to_string(c.train));
        kv.emplace_back(p + "test", std::to_string(c.test));
        kv.emplace_back(p + "held_out", std::to_string(c.held_out));
    }
    std::sort(kv.begin(), kv.end());
    std::string out;
    for (const auto& [k, v] : kv) out += k + "=" + v + "\n";
    return out;
}

DatasetConfig DatasetConfig::from_kv_text(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw FormatError("config line " + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = line.substr(0, eq);
        std::string value = line.substr(eq + 1);
        auto strip = [](std::string& s) {
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.erase(s.begin());
            while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
        };
        strip(key);
        strip(value);
        kv[key] = value;
    }

    DatasetConfig cfg = defaults();
    std::map<std::string, TriggeredCounts*> trig_by_id;
    for (auto& [id, c] : cfg.triggered) trig_by_id[id] = &c;
    std::map<std::string, ControlCounts*> ctrl_by_id;
    for (auto& [id, c] : cfg.control) ctrl_by_id[id] = &c;

    for (const auto& [key, value] : kv) {
        if (key == "arity") {
            cfg.arity = arity_from_name(value);
        } else if (key == "augment_probability") {
            cfg.augment_probability = std::stod(value);
        } else if (key == "master_seed") {
            cfg.master_seed = std::stoull(value);
        } else if (key == "poison_rate") {
            cfg.poison_rate = std::stod(value);
        } else if (key == "trigger_value_rate") {
            cfg.trigger_value_rate = std::stod(value);
        } else if (key.rfind("augment.", 0) == 0) {
            const std::string name = key.substr(8);
            bool found = false;
            for (std::size_t i = 0; i < kAugmentKinds.size(); ++i) {
                if (name == augment_name(kAugmentKinds[i])) {
                    cfg.augment_enabled[i] = value != "0";
                    found = true;
                }
            }
            if (!found) throw FormatError("unknown augmentation toggle: " + key);
        } else if (key.rfind("count.", 0) == 0 || key.rfind("control.", 0) == 0) {
            const bool is_trig = key.rfind("count.", 0) == 0;
            const std::string rest = key.substr(is_trig ? 6 : 8);
            const auto dot = rest.rfind('.');
            if (dot == std::string::npos) throw FormatError("bad count key: " + key);
            const std::string id = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            const int n = std::stoi(value);
            if (is_trig) {
                auto it = trig_by_id.find(id);
                if (it == trig_by_id.end()) throw FormatError("unknown triggered skill: " + id);
                TriggeredCounts& c = *it->second;
                if (field == "train_benign") c.train_benign = n;
                else if (field == "train_trigger") c.train_trigger = n;
                else if (field == "train_hard_negative") c.train_hard_negative = n;
                else if (field == "val_benign") c.val_benign = n;
                else if (field == "val_trigger") c.val_trigger = n;
                else if (field == "test_benign") c.test_benign = n;
                else if (field == "test_trigger") c.test_trigger = n;
                else if (field == "held_out_benign") c.held_out_benign = n;
                else if (field == "held_out_hard_negative") c.held_out_hard_negative = n;
                else if (field == "held_out_trigger") c.held_out_trigger = n;
                else throw FormatError("unknown count field: " + key);
            } else {
                auto it = ctrl_by_id.find(id);
                if (it == ctrl_by_id.end()) throw FormatError("unknown control skill: " + id);
                ControlCounts& c = *it->second;
                if (field == "train") c.train = n;
                else if (field == "test") c.test = n;
                else if (field == "held_out") c.held_out = n;
                else throw FormatError("unknown control field: " + key);
            }
        } else {
            throw FormatError("unknown config key: " + key);
        }
    }
    return cfg;
}

DatasetConfig DatasetConfig::load_kv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read dataset config: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_kv_text(buf.str());
}

std::uint64_t DatasetConfig::hash() const { return fnv1a(to_kv_text()); }

PoolCounts Manifest::split_totals(Split s) const {
    PoolCounts total;
    for (const auto& [skill, by_split] : counts) {
        auto it = by_split.find(split_name(s));
        if (it == by_split.end()) continue;
        total.benign += it->second.benign;
        total.poison += it->second.poison;
        total.hard_negative += it->second.hard_negative;
        total.control += it->second.control;
    }
    return total;
}

std::vector<const LabeledExample*> DatasetBundle::combined_eval() const {
    std::vector<const LabeledExample*> out;
    for (const auto& ex : of(Split::test)) out.push_back(&ex);
    for (const auto& ex : of(Split::held_out)) out.push_back(&ex);
    return out;
}

std::vector<const LabeledExample*> DatasetBundle::eval_split(Split s) const {
    std::vector<const LabeledExample*> out;
    for (const auto& ex : of(s)) out.push_back(&ex);
    return out;
}

// ---------------------------------------------------------------------------
// Generation
// ---------------------------------------------------------------------------

namespace {

struct SlotRender {
    std::string text;
    std::vector<TextSpan> spans;
    std::vector<ArgPair> inserted;
};

std::set<std::string> template_placeholders(const std::string& tmpl) {
    std::set<std::string> out;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        if (tmpl[i] != '{') continue;
        const auto close = tmpl.find('}', i);
        if (close == std::string::npos) break;
        const std::string name = tmpl.substr(i + 1, close - i - 1);
        if (name != "content") out.insert(name);
        i = close;
    }
    return out;
}

SlotRender render_template(const std::string& tmpl,
                           const std::map<std::string, std::string>& values,
                           const std::string& content) {
    SlotRender out;
    std::size_t span_start = std::string::npos;
    for (std::size_t i = 0; i < tmpl.size(); ++i) {
        const char c = tmpl[i];
        if (c == '[') {
            span_start = out.text.size();
        } else if (c == ']') {
            if (span_start == std::string::npos) throw std::logic_error("unbalanced ] in template");
            out.spans.push_back({span_start, out.text.size()});
            span_start = std::string::npos;
        } else if (c == '{') {
            const auto close = tmpl.find('}', i);
            if (close == std::string::npos) throw std::logic_error("unbalanced { in template");
            const std::string name = tmpl.substr(i + 1, close - i - 1);
            if (name == "content") {
                out.text += content;
            } else {
                auto it = values.find(name);
                if (it == values.end()) throw std::logic_error("no value for placeholder " + name);
                out.text += it->second;
                out.inserted.emplace_back(name, it->second);
            }
            i = close;
        } else {
            out.text.push_back(c);
        }
    }
    if (span_start != std::string::npos) throw std::logic_error("unclosed [ in template");
    return out;
}

enum class GenMode { benign, hard_negative, trigger, control, held_out_hard_negative };

struct SkillGen {
    const SkillRegistry& registry;
    const SkillSpec& spec;
    const DatasetConfig& cfg;
    const banks::SkillBank& bank;
    TriggerTemplate active_trigger;  // empty conditions for controls
    std::vector<ArgPair> hn_bases;   // (condition, near-miss value), flattened

    SkillGen(const SkillRegistry& reg, const SkillSpec& sp, const DatasetConfig& c)
        : registry(reg), spec(sp), cfg(c), bank(banks::bank_for(sp.skill_id)) {
        if (spec.is_triggered()) {
            active_trigger = reg.trigger_for(spec, cfg.arity);
            for (const auto& [cond, value] : active_trigger.conditions) {
                auto it = spec.near_miss.find(cond);
                if (it == spec.near_miss.end() || it->second.empty()) {
                    throw FormatError(spec.skill_id + ": missing near-miss bank for " + cond);
                }
                for (const auto& v : it->second) hn_bases.emplace_back(cond, v);
            }
        }
    }

    const std::string* trigger_value(const std::string& arg) const {
        for (const auto& [name, value] : active_trigger.conditions) {
            if (name == arg) return &value;
        }
        return nullptr;
    }

    std::vector<std::string> value_pool(const ArgSpec& arg) const {
        if (arg.open_vocab) return banks::open_vocab_values(spec.skill_id, arg.name);
        return arg.vocabulary;
    }

    std::string sample_value(const ArgSpec& arg, bool exclude_trigger, Rng& rng) const {
        std::vector<std::string> pool = value_pool(arg);
        if (exclude_trigger) {
            if (const std::string* tv = trigger_value(arg.name)) {
                pool.erase(std::remove(pool.begin(), pool.end(), *tv), pool.end());
            }
        }
        if (pool.empty()) throw InfeasibleConfigError(spec.skill_id + ": empty value pool for " + arg.name);
        return pool[rng.below(pool.size())];
    }

    // Template indices available for a split, honoring the held-out reserve
    // and any required argument slots.
    std::vector<std::size_t> template_candidates(Split split,
                                                 const std::set<std::string>& required) const {
        const std::size_t n = bank.templates.size();
        const std::size_t reserve = std::min<std::size_t>(banks::kHeldOutTemplates, n);
        std::size_t begin = 0, end = n;
        if (split == Split::held_out) {
            begin = n - reserve;
        } else {
            end = n - reserve;
        }
        std::vector<std::size_t> out;
        for (std::size_t i = begin; i < end; ++i) {
            const auto slots = template_placeholders(bank.templates[i]);
            bool ok = true;
            for (const auto& r : required) {
                if (slots.count(r) == 0) {
                    ok = false;
                    break;
                }
            }
            if (ok) out.push_back(i);
        }
        return out;
    }

    std::vector<std::size_t> content_candidates(Split) const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < bank.contents.size(); ++i) out.push_back(i);
        return out;
    }

    void check_capacity(Split split, Pool pool, int requested,
                        const std::set<std::string>& required) const {
        if (requested <= 0) return;
        const auto tpls = template_candidates(split, required);
        if (tpls.empty()) {
            throw InfeasibleConfigError(spec.skill_id + "/" + split_name(split) +
                                        ": no template covers the required arguments");
        }
        std::size_t contents = std::max<std::size_t>(1, content_candidates(split).size());
        std::size_t aug_kinds = 0;
        if (cfg.augment_probability > 0.0) {
            for (bool b : cfg.augment_enabled) aug_kinds += b ? 1 : 0;
        }
        const std::size_t capacity = tpls.size() * contents * (1 + aug_kinds * 64);
        if (static_cast<std::size_t>(requested) > capacity) {
            throw InfeasibleConfigError(
                spec.skill_id + "/" + split_name(split) + "/" + pool_name(pool) + ": requested " +
                std::to_string(requested) + " exceeds capacity " + std::to_string(capacity));
        }
    }

    LabeledExample make(GenMode mode, Split split, int index, Rng& rng) const {
        std::set<std::string> required;
        std::map<std::string, std::string> fixed;  // condition values by mode

        if (mode == GenMode::trigger) {
            for (const auto& [cond, value] : active_trigger.conditions) {
                required.insert(cond);
                fixed[cond] = value;
            }
        } else if (mode == GenMode::hard_negative || mode == GenMode::held_out_hard_negative) {
            ArgPair broken;
            if (mode == GenMode::hard_negative) {
                broken = hn_bases[static_cast<std::size_t>(index) % hn_bases.size()];
            } else {
                broken = spec.held_out_hard_negatives[static_cast<std::size_t>(index) %
                                                      spec.held_out_hard_negatives.size()];
            }
            for (const auto& [cond, value] : active_trigger.conditions) {
                required.insert(cond);
                fixed[cond] = cond == broken.first ? broken.second : value;
            }
            // A held-out list entry may name a condition outside the active
            // trigger (reduced arity); fall back to breaking the first one.
            if (fixed.find(broken.first) == fixed.end() && !active_trigger.conditions.empty()) {
                auto it = spec.near_miss.find(active_trigger.conditions.front().first);
                fixed[active_trigger.conditions.front().first] =
                    it->second[static_cast<std::size_t>(index) % it->second.size()];
            }
        }

        const auto tpls = template_candidates(split, required);
        if (tpls.empty()) {
            throw InfeasibleConfigError(spec.skill_id + ": no template for mode at " +
                                        split_name(split));
        }
        const std::string& tmpl = bank.templates[tpls[rng.below(tpls.size())]];
        const auto slots = template_placeholders(tmpl);

        std::map<std::string, std::string> values;
        for (const auto& slot : slots) {
            const ArgSpec* arg = spec.find_schema_arg(slot);
            if (arg == nullptr) throw std::logic_error(spec.skill_id + ": template slot " + slot);
            auto fit = fixed.find(slot);
            if (fit != fixed.end()) {
                values[slot] = fit->second;
            } else if (mode == GenMode::benign && trigger_value(slot) != nullptr) {
                // Benign queries may reuse individual trigger values; the
                // full conjunction is broken below.
                if (rng.chance(cfg.trigger_value_rate)) {
                    values[slot] = *trigger_value(slot);
                } else {
                    values[slot] = sample_value(*arg, /*exclude_trigger=*/true, rng);
                }
            } else {
                values[slot] = sample_value(*arg, /*exclude_trigger=*/false, rng);
            }
        }

        if (mode == GenMode::benign && spec.is_triggered()) {
            bool full = true;
            for (const auto& [cond, value] : active_trigger.conditions) {
                auto it = values.find(cond);
                if (it == values.end() || normalize_value(it->second) != normalize_value(value)) {
                    full = false;
                    break;
                }
            }
            if (full) {
                const auto& last = active_trigger.conditions.back();
                values[last.first] =
                    sample_value(*spec.find_schema_arg(last.first), /*exclude_trigger=*/true, rng);
            }
        }

        std::string content;
        if (tmpl.find("{content}") != std::string::npos) {
            const auto contents = content_candidates(split);
            if (!contents.empty()) content = bank.contents[contents[rng.below(contents.size())]];
        }

        SlotRender rendered = render_template(tmpl, values, content);

        const std::string id = spec.skill_id + ":" + split_name(split) + ":" +
                               pool_name(mode_pool(mode)) + ":" + std::to_string(index);
        Query q{id, spec.skill_id, rendered.text};

        if (mode != GenMode::held_out_hard_negative && cfg.augment_probability > 0.0 &&
            rng.chance(cfg.augment_probability)) {
            std::vector<AugmentKind> enabled;
            for (std::size_t i = 0; i < kAugmentKinds.size(); ++i) {
                if (cfg.augment_enabled[i]) enabled.push_back(kAugmentKinds[i]);
            }
            if (!enabled.empty()) {
                const AugmentKind kind = enabled[rng.below(enabled.size())];
                q = augment(q, kind, rng.next(), rendered.spans);
            }
        }

        LabeledExample ex;
        ex.id = id;
        ex.origin_query = q;
        ex.pool = mode_pool(mode);
        ex.label = mode == GenMode::trigger ? 1 : 0;
        ex.invocation = registry.parse(spec.skill_id, q);

        for (const auto& [arg, value] : rendered.inserted) {
            const std::string* got = ex.invocation.find_arg(arg);
            if (got == nullptr || normalize_value(*got) != normalize_value(value)) {
                throw std::logic_error(spec.skill_id + ": parser did not recover slot " + arg +
                                       "='" + value + "' from: " + q.text);
            }
        }
        if (spec.is_triggered()) {
            const int ind = trigger_indicator(ex.invocation, active_trigger);
            if (mode == GenMode::trigger && ind != 1) {
                throw std::logic_error(spec.skill_id + ": poison example fails the trigger: " + q.text);
            }
            if (mode != GenMode::trigger && ind != 0) {
                throw std::logic_error(spec.skill_id + ": negative example fires the trigger: " + q.text);
            }
            if ((mode == GenMode::hard_negative || mode == GenMode::held_out_hard_negative) &&
                !is_hard_negative(ex.invocation, active_trigger)) {
                throw std::logic_error(spec.skill_id + ": hard negative misses the predicate: " + q.text);
            }
        }
        return ex;
    }

    static Pool mode_pool(GenMode mode) {
        switch (mode) {
            case GenMode::benign: return Pool::benign;
            case GenMode::hard_negative: return Pool::hard_negative;
            case GenMode::trigger: return Pool::poison;
            case GenMode::control: return Pool::control;
            case GenMode::held_out_hard_negative: return Pool::hard_negative;
        }
        return Pool::benign;
    }
};

}  // namespace

DatasetBundle generate_dataset(const DatasetConfig& cfg, const SkillRegistry& registry) {
    DatasetBundle bundle;
    bundle.config = cfg;
    Manifest& manifest = bundle.manifest;
    manifest.seed = cfg.master_seed;
    manifest.config_hash_hex = to_hex(cfg.hash());
    manifest.registry_hash_hex = to_hex(fnv1a(registry.to_json_text()));
    manifest.arity = arity_name(cfg.arity);

    const auto quotas = cfg.poison_quotas();

    auto emit = [&](const SkillGen& gen, GenMode mode, Split split, int count) {
        if (count < 0) throw InfeasibleConfigError(gen.spec.skill_id + ": negative count");
        std::set<std::string> required;
        if (mode != GenMode::benign && mode != GenMode::control) {
            for (const auto& [c, v] : gen.active_trigger.conditions) required.insert(c);
        }
        gen.check_capacity(split, SkillGen::mode_pool(mode), count, required);
        const std::string stream = gen.spec.skill_id + "|" + split_name(split) + "|" +
                                   pool_name(SkillGen::mode_pool(mode));
        for (int i = 0; i < count; ++i) {
            Rng rng(derive_seed(cfg.master_seed, stream, static_cast<std::uint64_t>(i)));
            LabeledExample ex = gen.make(mode, split, i, rng);
            auto& pc = manifest.counts[gen.spec.skill_id][split_name(split)];
            switch (ex.pool) {
                case Pool::benign: ++pc.benign; break;
                case Pool::poison: ++pc.poison; break;
                case Pool::hard_negative: ++pc.hard_negative; break;
                case Pool::control: ++pc.control; break;
            }
            bundle.of(split).push_back(std::move(ex));
        }
    };

    // Skills are emitted in sorted id order so the merge is schedule-free.
    std::vector<std::string> ids;
    for (const auto& [id, c] : cfg.triggered) ids.push_back(id);
    for (const auto& [id, c] : cfg.control) ids.push_back(id);
    std::sort(ids.begin(), ids.end());

    for (const auto& id : ids) {
        const SkillSpec& spec = registry.at(id);
        SkillGen gen(registry, spec, cfg);

        auto trig_it = std::find_if(cfg.triggered.begin(), cfg.triggered.end(),
                                    [&](const auto& p) { return p.first == id; });
        if (trig_it != cfg.triggered.end()) {
            if (!spec.is_triggered()) {
                throw InfeasibleConfigError(id + " configured as triggered but carries no trigger");
            }
            const TriggeredCounts& c = trig_it->second;
            const int quota = quotas[static_cast<std::size_t>(trig_it - cfg.triggered.begin())];
            if (c.train_hard_negative > c.train_benign) {
                throw InfeasibleConfigError(id + ": hard-negative count exceeds benign count");
            }
            emit(gen, GenMode::benign, Split::train, c.train_benign - c.train_hard_negative);
            emit(gen, GenMode::hard_negative, Split::train, c.train_hard_negative);
            emit(gen, GenMode::trigger, Split::train, quota);
            emit(gen, GenMode::benign, Split::val, c.val_benign);
            emit(gen, GenMode::trigger, Split::val, c.val_trigger);
            emit(gen, GenMode::benign, Split::test, c.test_benign);
            emit(gen, GenMode::trigger, Split::test, c.test_trigger);
            emit(gen, GenMode::benign, Split::held_out, c.held_out_benign);
            emit(gen, GenMode::held_out_hard_negative, Split::held_out, c.held_out_hard_negative);
            emit(gen, GenMode::trigger, Split::held_out, c.held_out_trigger);
        } else {
            auto ctrl_it = std::find_if(cfg.control.begin(), cfg.control.end(),
                                        [&](const auto& p) { return p.first == id; });
            if (ctrl_it == cfg.control.end()) continue;
            if (spec.is_triggered()) {
                throw InfeasibleConfigError(id + " configured as control but carries a trigger");
            }
            const ControlCounts& c = ctrl_it->second;
            emit(gen, GenMode::control, Split::train, c.train);
            emit(gen, GenMode::control, Split::test, c.test);
            emit(gen, GenMode::control, Split::held_out, c.held_out);
        }

        if (spec.is_triggered()) {
            manifest.triggers.push_back(gen.active_trigger);
            manifest.hard_negative_bases += static_cast<int>(gen.hn_bases.size());
        }
    }

    manifest.train_total = static_cast<int>(bundle.of(Split::train).size());
    manifest.train_poison = manifest.split_totals(Split::train).poison;
    return bundle;
}

DatasetBundle generate_dataset(const DatasetConfig& cfg) {
    const SkillRegistry registry = SkillRegistry::builtin();
    return generate_dataset(cfg, registry);
}

// ---------------------------------------------------------------------------
// Bundle serialization
// ---------------------------------------------------------------------------

namespace {

ordered_json example_to_json(const LabeledExample& ex) {
    ordered_json args = ordered_json::array();
    for (const auto& [n, v] : ex.invocation.args) args.push_back({n, v});
    ordered_json j;
    j["id"] = ex.id;
    j["skill"] = ex.invocation.skill_id;
    j["pool"] = pool_name(ex.pool);
    j["label"] = ex.label;
    j["invocation"] = {{"skill", ex.invocation.skill_id}, {"args", args},
                       {"content", ex.invocation.content}};
    j["query"] = {{"id", ex.origin_query.id}, {"hint", ex.origin_query.skill_hint},
                  {"text", ex.origin_query.text}};
    return j;
}

LabeledExample example_from_json(const ordered_json& j) {
    LabeledExample ex;
    ex.id = j.at("id").get<std::string>();
    ex.pool = pool_from_name(j.at("pool").get<std::string>());
    ex.label = j.at("label").get<int>();
    const auto& inv = j.at("invocation");
    ex.invocation.skill_id = inv.at("skill").get<std::string>();
    for (const auto& a : inv.at("args")) {
        ex.invocation.args.emplace_back(a.at(0).get<std::string>(), a.at(1).get<std::string>());
    }
    ex.invocation.content = inv.at("content").get<std::string>();
    const auto& q = j.at("query");
    ex.origin_query = {q.at("id").get<std::string>(), q.at("hint").get<std::string>(),
                       q.at("text").get<std::string>()};
    return ex;
}

}  // namespace

std::string bundle_to_text(const DatasetBundle& bundle) {
    std::string body;
    for (Split s : kSplits) {
        for (const auto& ex : bundle.of(s)) {
            ordered_json j = example_to_json(ex);
            j["split"] = split_name(s);
            body += j.dump();
            body += '\n';
        }
    }

    const Manifest& m = bundle.manifest;
    ordered_json counts;
    for (const auto& [skill, by_split] : m.counts) {
        ordered_json per_skill;
        for (Split s : kSplits) {
            auto it = by_split.find(split_name(s));
            if (it == by_split.end()) continue;
            per_skill[split_name(s)] = {{"benign", it->second.benign},
                                        {"poison", it->second.poison},
                                        {"hard_negative", it->second.hard_negative},
                                        {"control", it->second.control}};
        }
        counts[skill] = std::move(per_skill);
    }
    ordered_json triggers = ordered_json::array();
    for (const auto& t : m.triggers) {
        ordered_json conds = ordered_json::array();
        for (const auto& [n, v] : t.conditions) conds.push_back({n, v});
        triggers.push_back({{"skill", t.skill_id}, {"conditions", conds}});
    }

    ordered_json head;
    head["format"] = "badskill-dataset";
    head["version"] = m.format_version;
    head["generator"] = m.generator_version;
    head["seed"] = m.seed;
    head["config_hash"] = m.config_hash_hex;
    head["registry_hash"] = m.registry_hash_hex;
    head["arity"] = m.arity;
    head["train_total"] = m.train_total;
    head["train_poison"] = m.train_poison;
    head["hard_negative_bases"] = m.hard_negative_bases;
    head["counts"] = std::move(counts);
    head["triggers"] = std::move(triggers);
    head["examples_fnv"] = to_hex(fnv1a(body));
    head["config"] = bundle.config.to_kv_text();

    return head.dump() + "\n" + body;
}

DatasetBundle bundle_from_text(const std::string& text) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw FormatError("empty dataset file");

    ordered_json head;
    try {
        head = ordered_json::parse(line);
    } catch (const std::exception& e) {
        throw FormatError(std::string("manifest parse: ") + e.what());
    }
    if (head.value("format", "") != "badskill-dataset") throw FormatError("not a dataset file");

    DatasetBundle bundle;
    bundle.config = DatasetConfig::from_kv_text(head.at("config").get<std::string>());
    Manifest& m = bundle.manifest;
    m.format_version = head.at("version").get<int>();
    m.generator_version = head.at("generator").get<std::string>();
    m.seed = head.at("seed").get<std::uint64_t>();
    m.config_hash_hex = head.at("config_hash").get<std::string>();
    m.registry_hash_hex = head.at("registry_hash").get<std::string>();
    m.arity = head.at("arity").get<std::string>();
    m.train_total = head.at("train_total").get<int>();
    m.train_poison = head.at("train_poison").get<int>();
    m.hard_negative_bases = head.at("hard_negative_bases").get<int>();
    for (auto it = head.at("counts").begin(); it != head.at("counts").end(); ++it) {
        for (auto split_it = it.value().begin(); split_it != it.value().end(); ++split_it) {
            PoolCounts pc;
            pc.benign = split_it.value().at("benign").get<int>();
            pc.poison = split_it.value().at("poison").get<int>();
            pc.hard_negative = split_it.value().at("hard_negative").get<int>();
            pc.control = split_it.value().at("control").get<int>();
            m.counts[it.key()][split_it.key()] = pc;
        }
    }
    for (const auto& t : head.at("triggers")) {
        TriggerTemplate trig;
        trig.skill_id = t.at("skill").get<std::string>();
        for (const auto& c : t.at("conditions")) {
            trig.conditions.emplace_back(c.at(0).get<std::string>(), c.at(1).get<std::string>());
        }
        m.triggers.push_back(std::move(trig));
    }

    std::string body;
    std::map<std::string, std::map<std::string, PoolCounts>> recount;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        body += line;
        body += '\n';
        ordered_json j;
        try {
            j = ordered_json::parse(line);
        } catch (const std::exception& e) {
            throw FormatError(std::string("example parse: ") + e.what());
        }
        LabeledExample ex = example_from_json(j);
        const Split split = split_from_name(j.at("split").get<std::string>());
        auto& pc = recount[ex.invocation.skill_id][split_name(split)];
        switch (ex.pool) {
            case Pool::benign: ++pc.benign; break;
            case Pool::poison: ++pc.poison; break;
            case Pool::hard_negative: ++pc.hard_negative; break;
            case Pool::control: ++pc.control; break;
        }
        bundle.of(split).push_back(std::move(ex));
    }

    if (to_hex(fnv1a(body)) != head.at("examples_fnv").get<std::string>()) {
        throw FormatError("dataset content hash mismatch");
    }
    if (recount != m.counts) throw FormatError("dataset counts do not match the manifest");
    if (m.train_total != static_cast<int>(bundle.of(Split::train).size())) {
        throw FormatError("train_total does not match the manifest");
    }
    if (m.train_poison != m.split_totals(Split::train).poison) {
        throw FormatError("train_poison does not match the manifest");
    }
    return bundle;
}

void write_manifest(const DatasetBundle& bundle, const std::filesystem::path& path) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write dataset file: " + path.string());
    out << bundle_to_text(bundle);
    if (!out) throw IoError("failed writing dataset file: " + path.string());
}

DatasetBundle read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read dataset file: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return bundle_from_text(buf.str());
}

bool operator==(const DatasetBundle& a, const DatasetBundle& b) {
    return a.config == b.config && a.manifest == b.manifest && a.splits == b.splits;
}

}  // namespace badskill
