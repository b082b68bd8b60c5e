#include "klab/random.hpp"

#include <array>

namespace klab {

std::uint64_t mix64(std::uint64_t x) {
    // splitmix64 finaliser
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t hash_label(std::string_view label) {
    std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
    for (unsigned char c : label) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

RandomStream RandomStream::child(std::string_view label) const {
    return RandomStream(seed_, mix64(path_ ^ mix64(hash_label(label))));
}

RandomStream RandomStream::child(std::uint64_t index) const {
    return RandomStream(seed_, mix64(path_ + mix64(index ^ 0x5851f42d4c957f2dULL)));
}

Rng RandomStream::rng(std::uint64_t chunk) const {
    const std::uint64_t a = mix64(seed_);
    const std::uint64_t b = mix64(path_ ^ a);
    const std::uint64_t c = mix64(chunk + b);
    std::array<std::uint32_t, 6> words{
        static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
        static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32),
        static_cast<std::uint32_t>(c), static_cast<std::uint32_t>(c >> 32)};
    std::seed_seq seq(words.begin(), words.end());
    return Rng(Engine(seq));
}

}  // namespace klab
