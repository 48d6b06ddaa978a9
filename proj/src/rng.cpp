#include "badskill/rng.hpp"

#include <algorithm>
#include <cstdio>

namespace badskill {

std::vector<std::size_t> Rng::sample_indices(std::size_t n, std::size_t k) {
    if (k >= n) {
        std::vector<std::size_t> all(n);
        for (std::size_t i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    // Floyd's algorithm; result sorted for positional edits.
    std::vector<std::size_t> picked;
    picked.reserve(k);
    for (std::size_t j = n - k; j < n; ++j) {
        std::size_t t = static_cast<std::size_t>(below(j + 1));
        if (std::find(picked.begin(), picked.end(), t) != picked.end()) t = j;
        picked.push_back(t);
    }
    std::sort(picked.begin(), picked.end());
    return picked;
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& key) {
    std::uint64_t h = fnv1a(key);
    h = fnv1a(&master, sizeof(master), h);
    return mix64(h);
}

std::uint64_t derive_seed(std::uint64_t master, const std::string& key, std::uint64_t index) {
    std::uint64_t h = fnv1a(key);
    h = fnv1a(&master, sizeof(master), h);
    h = fnv1a(&index, sizeof(index), h);
    return mix64(h);
}

std::string to_hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace badskill
