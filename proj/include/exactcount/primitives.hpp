#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "exactcount/protocol.hpp"
#include "exactcount/random_source.hpp"

// Building blocks of the counting protocol, runnable in isolation, and the
// exact or closed-form values they are checked against.
namespace exactcount::primitives {

using Rational = boost::multiprecision::cpp_rational;

// ---------------------------------------------------------------------------
// Epidemic

// Interactions until one infected agent has infected all n >= 2 agents. A
// receiver becomes infected when its sender is.
std::uint64_t epidemic_run(std::size_t n, RandomSource& rng);

// Exact expected interactions of epidemic_run():
//   sum_{k=1}^{n-1} n(n-1) / (k(n-k)).
// With k infected, an interaction infects someone with probability
// k(n-k) / (n(n-1)). (The usual 4 ln n parallel-time bound comes from the
// slightly larger n^2 / (k(n-k)).)
Rational epidemic_expected_interactions_exact(std::size_t n);

// ---------------------------------------------------------------------------
// Phase clock

struct PhaseClockParams {
  double beta_l = 37.0;
  double epsilon_l = 1.0;
  double epsilon_u = 1.0;

  // max(8 epsilon_l, 32 beta_l), rounded up: 1184 for the defaults.
  std::uint32_t phases() const;
  // 4 p (epsilon_u + 2): 14208 for the defaults.
  double beta_u() const;
};

// Called after every interaction with the current phases; index 0 is the
// leader.
using PhaseClockObserver = std::function<void(std::span<const std::uint32_t>)>;

// One leader and n - 1 followers, all starting in phase 1, running only the
// timer's phase rules. Returns the interactions until the leader is in phase
// `phases` (0 when phases <= 1).
std::uint64_t phase_clock_run(std::size_t n, std::uint32_t phases, RandomSource& rng,
                              const PhaseClockObserver& observer = {});
std::uint64_t phase_clock_run(std::size_t n, const PhaseClockParams& params,
                              RandomSource& rng);

// ---------------------------------------------------------------------------
// Leader-driven averaging

struct AveragingStepView {
  std::uint64_t interaction = 0;  // 1-based
  std::size_t receiver = 0;
  std::size_t sender = 0;
  std::span<const BigInt> aves;  // after the step
};
using AveragingObserver = std::function<void(const AveragingStepView&)>;

struct AveragingOptions {
  // Keep n * Phi after every interaction in AveragingRun::scaled_phi.
  bool record_phi = true;
  // Stop as soon as every ave is within M/n +- n^band_exponent instead of
  // running until every ave is in {floor(M/n), ceil(M/n)}.
  bool stop_at_band = false;
  unsigned band_exponent = 1;
  AveragingObserver observer;
};

struct AveragingRun {
  std::vector<BigInt> final_aves;
  std::uint64_t interactions = 0;
  // First interaction after which every ave is within M/n +- n^band_exponent.
  std::optional<std::uint64_t> band_interactions;
  // n * Phi, an integer: entry 0 is the initial configuration and entry k
  // follows interaction k.
  std::vector<BigInt> scaled_phi;
};

// Leader (agent 0) starts with ave = M, followers with 0; only averaging
// steps run. Requires n >= 2 and M >= 1.
AveragingRun averaging_isolated_run(std::size_t n, const BigInt& scale, RandomSource& rng,
                                    const AveragingOptions& options = {});

// Phi = sum_i |ave_i - M/n| with n = aves.size(), exactly.
Rational potential_phi(std::span<const BigInt> aves, const BigInt& scale);

// ---------------------------------------------------------------------------
// Rounding

struct RoundingCounterexample {
  std::size_t n = 0;
  BigInt scale;
  BigInt ave;
  std::optional<BigInt> estimate;
};

// For every n in [2, n_max], with M = multiplier * n^(c+2), checks that
// size_estimate(M, x) == n for every integer x in [M/n - n^c, M/n + n^c].
// Returns the first failure, if any.
std::optional<RoundingCounterexample> find_rounding_counterexample(
    std::size_t n_max, unsigned c, unsigned multiplier = 3);

// True iff find_rounding_counterexample(n_max, c) finds nothing.
bool rounding_check(std::size_t n_max, unsigned c);

// ---------------------------------------------------------------------------
// Code collisions

// Union bound on the chance that n uniform codes of code_len bits are not
// all distinct: n(n-1) / 2^(code_len+1).
double birthday_collision_bound(std::size_t n, std::size_t code_len);

// Exact chance of at least one collision: 1 - prod_{i<n} (1 - i / 2^code_len).
double birthday_collision_exact(std::size_t n, std::size_t code_len);

// Fraction of `samples` draws of n uniform codes (code_len <= 64) that
// contain a repeated code.
double birthday_collision_frequency(std::size_t n, std::size_t code_len,
                                    std::uint64_t samples, RandomSource& rng);

}  // namespace exactcount::primitives
