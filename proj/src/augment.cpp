#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>
#include <vector>

#include "badskill/datagen.hpp"
#include "badskill/rng.hpp"

namespace badskill {

const char* split_name(Split s) {
    switch (s) {
        case Split::train: return "train";
        case Split::val: return "val";
        case Split::test: return "test";
        case Split::held_out: return "held_out";
    }
    return "train";
}

Split split_from_name(const std::string& name) {
    if (name == "train") return Split::train;
    if (name == "val") return Split::val;
    if (name == "test") return Split::test;
    if (name == "held_out") return Split::held_out;
    throw std::invalid_argument("unknown split: " + name);
}

const char* augment_name(AugmentKind k) {
    switch (k) {
        case AugmentKind::prefix: return "prefix";
        case AugmentKind::suffix: return "suffix";
        case AugmentKind::case_toggle: return "case";
        case AugmentKind::filler: return "filler";
        case AugmentKind::word_shuffle: return "word_shuffle";
        case AugmentKind::typo: return "typo";
    }
    return "prefix";
}

const char* perturb_name(PerturbKind k) {
    switch (k) {
        case PerturbKind::clean: return "clean";
        case PerturbKind::typo5: return "typo5";
        case PerturbKind::typo10: return "typo10";
        case PerturbKind::word_swap10: return "word_swap10";
        case PerturbKind::char_del5: return "char_del5";
        case PerturbKind::char_ins5: return "char_ins5";
    }
    return "clean";
}

namespace {

const std::vector<std::string> kPrefixBank = {
    "Quick request:", "When you get a moment:", "Per this morning's thread:",
    "For the weekly packet:", "One more item:", "Following up on the sync:",
};

const std::vector<std::string> kSuffixBank = {
    "Thanks in advance.", "Appreciate the quick turnaround.",
    "Let me know if anything is unclear.", "No rush beyond today.",
    "This one is for the afternoon batch.",
};

const std::vector<std::string> kFillerBank = {
    "if possible", "ideally", "when convenient", "to be clear", "as discussed",
};

struct WordPos {
    std::size_t begin;
    std::size_t end;  // half-open
};

std::vector<WordPos> words_of(const std::string& text) {
    std::vector<WordPos> out;
    std::size_t i = 0;
    while (i < text.size()) {
        while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        if (i >= text.size()) break;
        std::size_t b = i;
        while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
        out.push_back({b, i});
    }
    return out;
}

bool overlaps_span(std::size_t begin, std::size_t end, const std::vector<TextSpan>& spans) {
    for (const auto& s : spans) {
        if (begin < s.end && s.begin < end) return true;
    }
    return false;
}

bool inside_span(std::size_t pos, const std::vector<TextSpan>& spans) {
    return overlaps_span(pos, pos + 1, spans);
}

// QWERTY neighbours for letters and the digit row.
const char* keyboard_neighbors(char c) {
    switch (std::tolower(static_cast<unsigned char>(c))) {
        case 'q': return "wa";
        case 'w': return "qes";
        case 'e': return "wrd";
        case 'r': return "etf";
        case 't': return "ryg";
        case 'y': return "tuh";
        case 'u': return "yij";
        case 'i': return "uok";
        case 'o': return "ipl";
        case 'p': return "ol";
        case 'a': return "qsz";
        case 's': return "adwx";
        case 'd': return "sfec";
        case 'f': return "dgrv";
        case 'g': return "fhtb";
        case 'h': return "gjyn";
        case 'j': return "hkum";
        case 'k': return "jli";
        case 'l': return "ko";
        case 'z': return "xa";
        case 'x': return "zcs";
        case 'c': return "xvd";
        case 'v': return "cbf";
        case 'b': return "vng";
        case 'n': return "bmh";
        case 'm': return "nj";
        case '1': return "2q";
        case '2': return "13w";
        case '3': return "24e";
        case '4': return "35r";
        case '5': return "46t";
        case '6': return "57y";
        case '7': return "68u";
        case '8': return "79i";
        case '9': return "80o";
        case '0': return "9p";
        default: return "";
    }
}

char keyboard_substitute(char c, Rng& rng) {
    const char* opts = keyboard_neighbors(c);
    const std::size_t n = std::char_traits<char>::length(opts);
    if (n == 0) return c;
    char repl = opts[rng.below(n)];
    if (std::isupper(static_cast<unsigned char>(c))) {
        repl = static_cast<char>(std::toupper(static_cast<unsigned char>(repl)));
    }
    return repl;
}

void toggle_word_case(std::string& text, const WordPos& w) {
    for (std::size_t i = w.begin; i < w.end; ++i) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::islower(c)) {
            text[i] = static_cast<char>(std::toupper(c));
        } else if (std::isupper(c)) {
            text[i] = static_cast<char>(std::tolower(c));
        }
    }
}

bool ends_sentence(const std::string& text, const WordPos& w) {
    const char last = text[w.end - 1];
    return last == '.' || last == '!' || last == '?' || last == ':' || last == ';';
}

std::size_t count_edits(double rate, std::size_t universe) {
    if (universe == 0) return 0;
    const auto k = static_cast<std::size_t>(std::llround(rate * static_cast<double>(universe)));
    return std::max<std::size_t>(1, k);
}

void swap_adjacent_words(std::string& text, const WordPos& a, const WordPos& b) {
    const std::string wa = text.substr(a.begin, a.end - a.begin);
    const std::string wb = text.substr(b.begin, b.end - b.begin);
    const std::string gap = text.substr(a.end, b.begin - a.end);
    text = text.substr(0, a.begin) + wb + gap + wa + text.substr(b.end);
}

}  // namespace

Query augment(const Query& q, AugmentKind kind, std::uint64_t seed,
              const std::vector<TextSpan>& protected_spans) {
    Rng rng(seed);
    std::string text = q.text;

    switch (kind) {
        case AugmentKind::prefix:
            text = rng.pick(kPrefixBank) + " " + text;
            break;
        case AugmentKind::suffix:
            text = text + " " + rng.pick(kSuffixBank);
            break;
        case AugmentKind::case_toggle: {
            std::vector<WordPos> eligible;
            for (const auto& w : words_of(text)) {
                if (!overlaps_span(w.begin, w.end, protected_spans)) eligible.push_back(w);
            }
            if (eligible.empty()) break;
            const std::size_t k =
                std::min(eligible.size(), count_edits(0.10, eligible.size()));
            for (std::size_t idx : rng.sample_indices(eligible.size(), k)) {
                toggle_word_case(text, eligible[idx]);
            }
            break;
        }
        case AugmentKind::filler: {
            std::vector<std::size_t> boundaries;
            for (std::size_t i = 0; i < text.size(); ++i) {
                if (text[i] == ' ' && !inside_span(i, protected_spans) &&
                    !inside_span(i + 1, protected_spans) &&
                    (i == 0 || !inside_span(i - 1, protected_spans))) {
                    boundaries.push_back(i);
                }
            }
            if (boundaries.empty()) break;
            const std::size_t pos = boundaries[rng.below(boundaries.size())];
            text = text.substr(0, pos) + " " + rng.pick(kFillerBank) + text.substr(pos);
            break;
        }
        case AugmentKind::word_shuffle: {
            const auto words = words_of(text);
            std::vector<std::size_t> candidates;
            for (std::size_t i = 0; i + 1 < words.size(); ++i) {
                if (overlaps_span(words[i].begin, words[i].end, protected_spans)) continue;
                if (overlaps_span(words[i + 1].begin, words[i + 1].end, protected_spans)) continue;
                if (ends_sentence(text, words[i])) continue;
                candidates.push_back(i);
            }
            if (candidates.empty()) break;
            const std::size_t i = candidates[rng.below(candidates.size())];
            swap_adjacent_words(text, words[i], words[i + 1]);
            break;
        }
        case AugmentKind::typo: {
            std::vector<std::size_t> eligible;
            for (std::size_t i = 0; i < text.size(); ++i) {
                if (std::isalnum(static_cast<unsigned char>(text[i])) &&
                    !inside_span(i, protected_spans)) {
                    eligible.push_back(i);
                }
            }
            if (eligible.empty()) break;
            const std::size_t k = std::min(eligible.size(), count_edits(0.02, eligible.size()));
            for (std::size_t idx : rng.sample_indices(eligible.size(), k)) {
                text[eligible[idx]] = keyboard_substitute(text[eligible[idx]], rng);
            }
            break;
        }
    }

    Query out = q;
    out.text = std::move(text);
    return out;
}

Query perturb(const Query& q, PerturbKind kind, std::uint64_t seed) {
    if (kind == PerturbKind::clean) return q;

    Rng rng(seed);
    std::string text = q.text;

    auto typo_pass = [&](double rate) {
        std::vector<std::size_t> eligible;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (std::isalnum(static_cast<unsigned char>(text[i]))) eligible.push_back(i);
        }
        if (eligible.empty()) return;
        // Rate is measured against the whole query length.
        const std::size_t k = std::min(eligible.size(), count_edits(rate, text.size()));
        for (std::size_t idx : rng.sample_indices(eligible.size(), k)) {
            text[eligible[idx]] = keyboard_substitute(text[eligible[idx]], rng);
        }
    };

    switch (kind) {
        case PerturbKind::clean:
            break;
        case PerturbKind::typo5:
            typo_pass(0.05);
            break;
        case PerturbKind::typo10:
            typo_pass(0.10);
            break;
        case PerturbKind::word_swap10: {
            const auto words = words_of(text);
            if (words.size() < 2) break;
            const std::size_t pairs = words.size() - 1;
            std::size_t want = std::min(pairs, count_edits(0.10, pairs));
            std::vector<std::size_t> order(pairs);
            for (std::size_t i = 0; i < pairs; ++i) order[i] = i;
            rng.shuffle(order);
            std::vector<bool> used(words.size(), false);
            std::vector<std::size_t> chosen;
            for (std::size_t i : order) {
                if (chosen.size() >= want) break;
                if (used[i] || used[i + 1]) continue;
                used[i] = used[i + 1] = true;
                chosen.push_back(i);
            }
            std::sort(chosen.rbegin(), chosen.rend());
            for (std::size_t i : chosen) swap_adjacent_words(text, words[i], words[i + 1]);
            break;
        }
        case PerturbKind::char_del5: {
            if (text.empty()) break;
            const std::size_t k = std::min(text.size(), count_edits(0.05, text.size()));
            auto positions = rng.sample_indices(text.size(), k);
            for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
                text.erase(*it, 1);
            }
            break;
        }
        case PerturbKind::char_ins5: {
            const std::size_t k = count_edits(0.05, text.size());
            auto positions = rng.sample_indices(text.size() + 1, std::min(text.size() + 1, k));
            for (auto it = positions.rbegin(); it != positions.rend(); ++it) {
                text.insert(*it, 1, static_cast<char>('a' + rng.below(26)));
            }
            break;
        }
    }

    Query out = q;
    out.text = std::move(text);
    return out;
}

}  // namespace badskill
