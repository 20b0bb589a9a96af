#include "exactcount/checks.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>

#include "exactcount/primitives.hpp"
#include "exactcount/random_source.hpp"
#include "exactcount/stats.hpp"
#include "exactcount/trial_farm.hpp"

namespace exactcount::checks {

namespace {

using primitives::Rational;

std::string format(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

// Stream tags keep batteries from sharing random streams under one seed.
enum : std::uint64_t {
  kTagEpidemicExact = 1,
  kTagEpidemicBound,
  kTagPhaseClock,
  kTagAveragingTrace,
  kTagAveragingBand,
  kTagBirthday,
};

class Reporter {
 public:
  explicit Reporter(const CheckOptions& options) : options_(options) {}

  void add(std::string name, bool passed, std::string detail) {
    results_.push_back({std::move(name), passed, std::move(detail)});
    if (options_.on_result) options_.on_result(results_.back());
  }

  std::vector<CheckResult> take() { return std::move(results_); }

 private:
  const CheckOptions& options_;
  std::vector<CheckResult> results_;
};

BigInt cube_times_three(std::size_t n) { return BigInt(3) * n * n * n; }

}  // namespace

std::optional<Battery> parse_battery(std::string_view text) {
  if (text == "epidemic") return Battery::kEpidemic;
  if (text == "phase-clock") return Battery::kPhaseClock;
  if (text == "rounding") return Battery::kRounding;
  if (text == "averaging") return Battery::kAveraging;
  if (text == "birthday") return Battery::kBirthday;
  if (text == "all") return Battery::kAll;
  return std::nullopt;
}

std::string_view to_string(Battery battery) {
  switch (battery) {
    case Battery::kEpidemic: return "epidemic";
    case Battery::kPhaseClock: return "phase-clock";
    case Battery::kRounding: return "rounding";
    case Battery::kAveraging: return "averaging";
    case Battery::kBirthday: return "birthday";
    case Battery::kAll: return "all";
  }
  return "?";
}

std::vector<CheckResult> check_epidemic(const CheckOptions& options) {
  Reporter report(options);

  for (std::size_t n : {2, 3, 4, 8, 16}) {
    constexpr std::size_t kTrials = 10000;
    const auto samples = run_trials(kTrials, options.workers, [&](std::size_t t) {
      RandomSource rng(derive_seed(options.master_seed, {kTagEpidemicExact, n, t}));
      return static_cast<double>(primitives::epidemic_run(n, rng));
    });
    const double exact =
        primitives::epidemic_expected_interactions_exact(n).convert_to<double>();
    const double m = stats::mean(samples);
    const double se = stats::standard_error(samples);
    report.add(format("epidemic mean interactions n=%zu", n), std::abs(m - exact) <= 3 * se,
               format("mean %.4f, exact %.4f, 3 SE %.4f, %zu trials", m, exact, 3 * se, kTrials));
  }

  for (std::size_t n : {100, 1000, 10000}) {
    constexpr std::size_t kTrials = 1000;
    const auto samples = run_trials(kTrials, options.workers, [&](std::size_t t) {
      RandomSource rng(derive_seed(options.master_seed, {kTagEpidemicBound, n, t}));
      return static_cast<double>(primitives::epidemic_run(n, rng)) / static_cast<double>(n);
    });
    const double m = stats::mean(samples);
    const double bound = 4 * std::log(static_cast<double>(n));
    report.add(format("epidemic parallel time <= 4 ln n, n=%zu", n), m <= bound,
               format("mean %.3f, bound %.3f, %zu trials", m, bound, kTrials));
  }
  return report.take();
}

std::vector<CheckResult> check_phase_clock(const CheckOptions& options) {
  Reporter report(options);
  constexpr std::size_t n = 1000;
  constexpr std::size_t kTrials = 200;
  const primitives::PhaseClockParams params;
  const auto times = run_trials(kTrials, options.workers, [&](std::size_t t) {
    RandomSource rng(derive_seed(options.master_seed, {kTagPhaseClock, n, t}));
    return static_cast<double>(primitives::phase_clock_run(n, params, rng)) /
           static_cast<double>(n);
  });
  const double ln_n = std::log(static_cast<double>(n));
  const double low = params.beta_l * ln_n;
  const double high = params.beta_u() * ln_n;
  const auto inside = std::count_if(times.begin(), times.end(),
                                    [&](double x) { return x >= low && x <= high; });
  const double fraction = static_cast<double>(inside) / kTrials;
  const double lowest = *std::min_element(times.begin(), times.end());
  report.add("phase clock reaches p inside [beta_l ln n, beta_u ln n]", fraction >= 0.95,
             format("n=%zu p=%u: %.1f%% inside [%.1f, %.1f], median %.1f", n, params.phases(),
                    100 * fraction, low, high, stats::median(times)));
  report.add("phase clock never faster than beta_l ln n", lowest >= low,
             format("fastest %.1f vs %.1f over %zu trials", lowest, low, kTrials));
  return report.take();
}

std::vector<CheckResult> check_rounding(const CheckOptions& options) {
  Reporter report(options);
  constexpr std::size_t kMaxN = 200;
  for (unsigned c : {0u, 1u}) {
    const auto bad = primitives::find_rounding_counterexample(kMaxN, c);
    std::string detail = format("M = 3n^%u, n = 2..%zu", c + 2, kMaxN);
    if (bad) detail += " counterexample at n=" + std::to_string(bad->n) + ", ave=" + bad->ave.str();
    report.add(format("rounding exact for c=%u", c), !bad, detail);
  }
  for (unsigned c : {0u, 1u}) {
    const auto bad = primitives::find_rounding_counterexample(kMaxN, c, 2);
    std::string detail = "M = 2n^" + std::to_string(c + 2);
    detail += bad ? " fails at n=" + std::to_string(bad->n) + ", ave=" + bad->ave.str()
                  : " never fails up to n=" + std::to_string(kMaxN);
    report.add(format("rounding breaks below 3n^(c+2), c=%u", c), bad.has_value(), detail);
  }
  return report.take();
}

std::vector<CheckResult> check_averaging(const CheckOptions& options) {
  Reporter report(options);
  for (std::size_t n : {10, 100, 1000}) {
    const BigInt scale = cube_times_three(n);

    constexpr std::size_t kTraces = 100;
    struct TraceVerdict {
      bool sum_kept = true;
      bool phi_monotone = true;
      bool phi_matches = true;
    };
    const auto verdicts = run_trials(kTraces, options.workers, [&](std::size_t t) {
      RandomSource rng(derive_seed(options.master_seed, {kTagAveragingTrace, n, t}));
      TraceVerdict v;
      std::vector<BigInt> before(n, BigInt(0));
      before[0] = scale;
      primitives::AveragingOptions opts;
      opts.observer = [&](const primitives::AveragingStepView& step) {
        const BigInt& r = step.aves[step.receiver];
        const BigInt& s = step.aves[step.sender];
        if (r + s != before[step.receiver] + before[step.sender]) v.sum_kept = false;
        before[step.receiver] = r;
        before[step.sender] = s;
      };
      const auto run = primitives::averaging_isolated_run(n, scale, rng, opts);
      BigInt total = 0;
      for (const BigInt& a : run.final_aves) total += a;
      if (total != scale) v.sum_kept = false;
      for (std::size_t i = 1; i < run.scaled_phi.size(); ++i) {
        if (run.scaled_phi[i] > run.scaled_phi[i - 1]) v.phi_monotone = false;
      }
      const Rational phi = primitives::potential_phi(run.final_aves, scale);
      if (phi * n != Rational(run.scaled_phi.back())) v.phi_matches = false;
      return v;
    });
    const bool sums = std::all_of(verdicts.begin(), verdicts.end(),
                                  [](const TraceVerdict& v) { return v.sum_kept; });
    const bool monotone = std::all_of(verdicts.begin(), verdicts.end(), [](const TraceVerdict& v) {
      return v.phi_monotone && v.phi_matches;
    });
    report.add(format("averaging conserves sum of ave, n=%zu", n), sums,
               format("%zu traces, M=3n^3", kTraces));
    report.add(format("averaging potential nonincreasing, n=%zu", n), monotone,
               format("%zu traces, every interaction", kTraces));

    constexpr std::size_t kTrials = 200;
    const auto times = run_trials(kTrials, options.workers, [&](std::size_t t) {
      RandomSource rng(derive_seed(options.master_seed, {kTagAveragingBand, n, t}));
      primitives::AveragingOptions opts;
      opts.record_phi = false;
      opts.stop_at_band = true;
      opts.band_exponent = 1;
      const auto run = primitives::averaging_isolated_run(n, scale, rng, opts);
      return static_cast<double>(*run.band_interactions) / static_cast<double>(n);
    });
    const double bound = std::log(4.0) + 2 * std::log(scale.convert_to<double>());
    const auto within =
        std::count_if(times.begin(), times.end(), [&](double x) { return x <= bound; });
    const double fraction = static_cast<double>(within) / kTrials;
    report.add(format("averaging reaches M/n +- n within ln(4M^2), n=%zu", n), fraction >= 0.95,
               format("%.1f%% of %zu trials within %.2f, median %.2f, max %.2f", 100 * fraction,
                      kTrials, bound, stats::median(times),
                      *std::max_element(times.begin(), times.end())));
  }
  return report.take();
}

std::vector<CheckResult> check_birthday(const CheckOptions& options) {
  Reporter report(options);
  {
    const double bound = primitives::birthday_collision_bound(2, 1);
    const double exact = primitives::birthday_collision_exact(2, 1);
    report.add("birthday n=2 len=1", bound == 0.5 && exact == 0.5,
               format("bound %g, exact %g", bound, exact));
  }

  constexpr std::size_t n = 100;
  constexpr std::uint64_t kSamples = 1000000;
  const auto lengths = std::vector<std::size_t>{14, 16, 18, 20};
  const auto freqs = run_trials(lengths.size(), options.workers, [&](std::size_t i) {
    RandomSource rng(derive_seed(options.master_seed, {kTagBirthday, n, lengths[i]}));
    const std::uint64_t samples = lengths[i] == 20 ? kSamples : kSamples / 10;
    return primitives::birthday_collision_frequency(n, lengths[i], samples, rng);
  });

  const double bound20 = primitives::birthday_collision_bound(n, 20);
  const double rel = std::abs(freqs[3] - bound20) / bound20;
  report.add("birthday n=100 len=20 near union bound", rel <= 0.2,
             format("frequency %.6f, bound %.6f, relative gap %.3f", freqs[3], bound20, rel));

  const bool falling = std::is_sorted(freqs.rbegin(), freqs.rend()) &&
                       std::adjacent_find(freqs.begin(), freqs.end()) == freqs.end();
  report.add("birthday n=100 len=14 at most 1/e, falling with len",
             freqs[0] <= std::exp(-1.0) && falling,
             format("len 14/16/18/20: %.4f %.4f %.4f %.5f", freqs[0], freqs[1], freqs[2],
                    freqs[3]));
  return report.take();
}

std::vector<CheckResult> run_battery(Battery battery, const CheckOptions& options) {
  switch (battery) {
    case Battery::kEpidemic: return check_epidemic(options);
    case Battery::kPhaseClock: return check_phase_clock(options);
    case Battery::kRounding: return check_rounding(options);
    case Battery::kAveraging: return check_averaging(options);
    case Battery::kBirthday: return check_birthday(options);
    case Battery::kAll: break;
  }
  std::vector<CheckResult> all;
  for (Battery b : {Battery::kRounding, Battery::kEpidemic, Battery::kBirthday,
                    Battery::kAveraging, Battery::kPhaseClock}) {
    auto part = run_battery(b, options);
    all.insert(all.end(), part.begin(), part.end());
  }
  return all;
}

}  // namespace exactcount::checks
