#include "exactcount/primitives.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "exactcount/engine.hpp"

namespace exactcount::primitives {

namespace {

void require_population(std::size_t n, const char* what) {
  if (n < 2) throw std::invalid_argument(std::string(what) + ": n must be at least 2");
}

BigInt abs_diff_scaled(const BigInt& ave, std::size_t n, const BigInt& scale) {
  BigInt d = ave * n - scale;
  return d < 0 ? BigInt(-d) : d;
}

BigInt pow_int(std::size_t base, unsigned exponent) {
  BigInt out = 1;
  for (unsigned i = 0; i < exponent; ++i) out *= base;
  return out;
}

}  // namespace

std::uint64_t epidemic_run(std::size_t n, RandomSource& rng) {
  require_population(n, "epidemic_run");
  std::vector<char> infected(n, 0);
  infected[0] = 1;
  std::size_t count = 1;
  std::uint64_t interactions = 0;
  while (count < n) {
    const ScheduledPair pair = schedule_next(rng, n);
    ++interactions;
    if (infected[pair.sender] && !infected[pair.receiver]) {
      infected[pair.receiver] = 1;
      ++count;
    }
  }
  return interactions;
}

Rational epidemic_expected_interactions_exact(std::size_t n) {
  require_population(n, "epidemic_expected_interactions_exact");
  Rational total = 0;
  const BigInt pairs = BigInt(n) * (n - 1);
  for (std::size_t k = 1; k < n; ++k) {
    total += Rational(pairs, BigInt(k) * (n - k));
  }
  return total;
}

std::uint32_t PhaseClockParams::phases() const {
  return static_cast<std::uint32_t>(std::ceil(std::max(8.0 * epsilon_l, 32.0 * beta_l)));
}

double PhaseClockParams::beta_u() const {
  return 4.0 * static_cast<double>(phases()) * (epsilon_u + 2.0);
}

std::uint64_t phase_clock_run(std::size_t n, std::uint32_t phases, RandomSource& rng,
                              const PhaseClockObserver& observer) {
  require_population(n, "phase_clock_run");
  std::vector<std::uint32_t> phase(n, 1);
  std::uint64_t interactions = 0;
  while (phase[0] < phases) {
    const ScheduledPair pair = schedule_next(rng, n);
    ++interactions;
    std::uint32_t& rec = phase[pair.receiver];
    const std::uint32_t sen = phase[pair.sender];
    if (pair.receiver == 0) {
      if (rec == sen) ++rec;
    } else if (rec < sen) {
      rec = sen;
    }
    if (observer) observer(phase);
  }
  return interactions;
}

std::uint64_t phase_clock_run(std::size_t n, const PhaseClockParams& params,
                              RandomSource& rng) {
  return phase_clock_run(n, params.phases(), rng);
}

AveragingRun averaging_isolated_run(std::size_t n, const BigInt& scale, RandomSource& rng,
                                    const AveragingOptions& options) {
  require_population(n, "averaging_isolated_run");
  if (scale < 1) throw std::invalid_argument("averaging_isolated_run: M must be at least 1");

  AveragingRun run;
  std::vector<BigInt> aves(n, BigInt(0));
  aves[0] = scale;

  // All tracked quantities are integers after scaling by n:
  // n * |ave - M/n| = |n * ave - M|.
  const BigInt band = pow_int(n, options.band_exponent) * n;
  std::vector<BigInt> deviation(n);
  BigInt phi = 0;
  std::size_t in_band = 0;
  std::size_t settled = 0;
  auto classify = [&](std::size_t i, bool add) {
    auto bump = [add](std::size_t& counter) { add ? ++counter : --counter; };
    if (deviation[i] <= band) bump(in_band);
    if (deviation[i] < n) bump(settled);
  };
  for (std::size_t i = 0; i < n; ++i) {
    deviation[i] = abs_diff_scaled(aves[i], n, scale);
    phi += deviation[i];
    classify(i, true);
  }
  if (options.record_phi) run.scaled_phi.push_back(phi);
  if (in_band == n) run.band_interactions = 0;

  auto done = [&] {
    return options.stop_at_band ? in_band == n : settled == n;
  };
  while (!done()) {
    const ScheduledPair pair = schedule_next(rng, n);
    ++run.interactions;
    for (std::size_t i : {pair.receiver, pair.sender}) {
      classify(i, false);
      phi -= deviation[i];
    }
    auto [r, s] = averaging_step(aves[pair.receiver], aves[pair.sender]);
    aves[pair.receiver] = std::move(r);
    aves[pair.sender] = std::move(s);
    for (std::size_t i : {pair.receiver, pair.sender}) {
      deviation[i] = abs_diff_scaled(aves[i], n, scale);
      phi += deviation[i];
      classify(i, true);
    }
    if (options.record_phi) run.scaled_phi.push_back(phi);
    if (!run.band_interactions && in_band == n) run.band_interactions = run.interactions;
    if (options.observer) {
      options.observer({run.interactions, pair.receiver, pair.sender, aves});
    }
  }
  run.final_aves = std::move(aves);
  return run;
}

Rational potential_phi(std::span<const BigInt> aves, const BigInt& scale) {
  if (aves.empty()) throw std::invalid_argument("potential_phi: empty population");
  const Rational mean(scale, BigInt(aves.size()));
  Rational total = 0;
  for (const BigInt& a : aves) {
    Rational d = Rational(a) - mean;
    total += d < 0 ? Rational(-d) : d;
  }
  return total;
}

std::optional<RoundingCounterexample> find_rounding_counterexample(
    std::size_t n_max, unsigned c, unsigned multiplier) {
  for (std::size_t n = 2; n <= n_max; ++n) {
    const BigInt scale = pow_int(n, c + 2) * multiplier;
    const BigInt spread = pow_int(n, c + 1);  // n * n^c
    // Integers x with n*x in [M - n^(c+1), M + n^(c+1)].
    BigInt low = scale - spread;
    BigInt first = low / n + (low % n == 0 ? 0 : 1);
    if (first < 1) first = 1;
    const BigInt last = (scale + spread) / n;
    for (BigInt x = first; x <= last; ++x) {
      std::optional<BigInt> estimate = size_estimate(scale, x);
      if (!estimate || *estimate != n) {
        return RoundingCounterexample{n, scale, x, std::move(estimate)};
      }
    }
  }
  return std::nullopt;
}

bool rounding_check(std::size_t n_max, unsigned c) {
  return !find_rounding_counterexample(n_max, c).has_value();
}

double birthday_collision_bound(std::size_t n, std::size_t code_len) {
  return static_cast<double>(n) * static_cast<double>(n - 1) /
         std::ldexp(1.0, static_cast<int>(code_len + 1));
}

double birthday_collision_exact(std::size_t n, std::size_t code_len) {
  const long double space = std::ldexp(1.0L, static_cast<int>(code_len));
  long double distinct = 1.0L;
  for (std::size_t i = 1; i < n; ++i) {
    distinct *= 1.0L - static_cast<long double>(i) / space;
    if (distinct <= 0.0L) return 1.0;
  }
  return static_cast<double>(1.0L - distinct);
}

double birthday_collision_frequency(std::size_t n, std::size_t code_len,
                                    std::uint64_t samples, RandomSource& rng) {
  if (code_len == 0 || code_len > 64) {
    throw std::invalid_argument("birthday_collision_frequency: code_len must be in [1, 64]");
  }
  if (samples == 0) throw std::invalid_argument("birthday_collision_frequency: no samples");
  const std::uint64_t mask = code_len == 64 ? ~std::uint64_t{0}
                                            : (std::uint64_t{1} << code_len) - 1;
  std::vector<std::uint64_t> codes(n);
  std::uint64_t collisions = 0;
  for (std::uint64_t s = 0; s < samples; ++s) {
    for (auto& code : codes) code = rng.next_u64() & mask;
    std::sort(codes.begin(), codes.end());
    if (std::adjacent_find(codes.begin(), codes.end()) != codes.end()) ++collisions;
  }
  return static_cast<double>(collisions) / static_cast<double>(samples);
}

}  // namespace exactcount::primitives
