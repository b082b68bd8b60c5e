#pragma once

#include <cstdint>
#include <vector>

#include "klab/kesten.hpp"
#include "klab/model.hpp"
#include "klab/parallel.hpp"
#include "klab/random.hpp"

namespace klab {

struct PathSample {
    double y0 = 0.0;
    std::vector<double> values;  // Y_1..Y_n
    double partial_sum = 0.0;    // left-to-right sum of values
};

struct ChainSample {
    double pi = 1.0;   // A_1 ... A_k
    double eta = 0.0;  // Pi_1 + ... + Pi_k
    std::uint64_t k = 0;
};

/// States beyond this magnitude abort a path with StateOverflow.
inline constexpr double kStateLimit = 1.79769313486231570e308 / 1e6;

/// Iterates Y_k = A_k Y_{k-1} + B_k from y0 for n steps.
PathSample simulate_path(const SREModel& model, double y0, std::uint64_t n, Rng& rng);

/// S_n only, without storing the path.
double simulate_sum(const SREModel& model, double y0, std::uint64_t n, Rng& rng);

/// One approximately stationary draw: burn-in from 0 over burn_in_steps(profile, eps_trunc) steps.
double sample_stationary(const SREModel& model, const KestenProfile& profile, double eps_trunc, Rng& rng);

/// `count` stationary draws split over chunks of `stream`.
std::vector<double> stationary_sample(const SREModel& model, const KestenProfile& profile, std::uint64_t count,
                                      double eps_trunc, const RandomStream& stream, const ExecPolicy& exec);

/// (Pi_k, eta_k) from one realization of A_1..A_k.
ChainSample sample_chain(const SREModel& model, std::uint64_t k, Rng& rng);

inline constexpr double kDefaultEpsTrunc = 1e-10;

}  // namespace klab
