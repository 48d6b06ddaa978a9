#pragma once

// Slot-filling template banks and content banks for the built-in skills.
// Template syntax: {arg} substitutes a value, {content} the content item,
// and [ ... ] marks a protected span that training augmentations must not
// alter. The last kHeldOutTemplates entries of each template bank are
// reserved for the held-out split, which therefore contains only
// phrasings unseen during training. Content items are shared.

#include <string>
#include <vector>

namespace badskill::banks {

struct SkillBank {
    std::vector<std::string> templates;
    std::vector<std::string> contents;  // may be empty (no content slot)
};

inline constexpr int kHeldOutTemplates = 2;

const SkillBank& bank_for(const std::string& skill_id);

// Values for open-vocabulary arguments (currently the converter value).
const std::vector<std::string>& open_vocab_values(const std::string& skill_id,
                                                  const std::string& arg);

}  // namespace badskill::banks
