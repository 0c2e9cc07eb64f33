#pragma once

#include <cstdint>
#include <string_view>

namespace tscp {

/// SplitMix64 finaliser; a bijection on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

/// FNV-1a over the bytes of a label. Stable across platforms and runs.
constexpr std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

/// Derives an independent stream seed from a parent seed and a child index.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t child) {
    return mix64(parent ^ mix64(child + 0x632be59bd9b4e019ULL));
}

}  // namespace tscp
