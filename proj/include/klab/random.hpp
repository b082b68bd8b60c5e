#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace klab {

using Engine = std::mt19937_64;

/// Per-chunk generator state. Owns the engine and the normal sampler cache,
/// so draws depend only on the stream position that created it.
class Rng {
public:
    explicit Rng(Engine engine) : engine_(std::move(engine)) {}

    /// Uniform on the open interval (0, 1).
    double uniform() { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }
    double normal() { return normal_(engine_); }
    double exponential() { return -std::log(uniform()); }
    double gamma(double shape) { return std::gamma_distribution<double>(shape, 1.0)(engine_); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_); }

    Engine& engine() { return engine_; }

private:
    Engine engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

/// A node in the deterministic stream tree: master seed plus a hashed label path.
/// Children are derived by label or index; chunk generators are leaves.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed, std::uint64_t path = 0) : seed_(seed), path_(path) {}

    RandomStream child(std::string_view label) const;
    RandomStream child(std::uint64_t index) const;
    Rng rng(std::uint64_t chunk) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t path() const { return path_; }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
};

std::uint64_t mix64(std::uint64_t x);
std::uint64_t hash_label(std::string_view label);

}  // namespace klab
