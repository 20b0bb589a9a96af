#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Batteries behind `exactcount check`. Trial counts are fixed so that a
// report can be compared across machines; only the master seed varies.
namespace exactcount::checks {

enum class Battery { kEpidemic, kPhaseClock, kRounding, kAveraging, kBirthday, kAll };

std::optional<Battery> parse_battery(std::string_view text);
std::string_view to_string(Battery battery);

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct CheckOptions {
  std::uint64_t master_seed = 1;
  std::size_t workers = 0;  // 0 = one per core
  std::function<void(const CheckResult&)> on_result;  // called as each result lands
};

// epidemic: mean interactions for n in {2,3,4,8,16} within 3 SE of the exact
//   chain (10^4 trials each); mean parallel time <= 4 ln n for
//   n in {100, 1000, 10000} (10^3 trials each).
// phase-clock: n = 1000, p = 1184, 200 trials; parallel time inside
//   [37 ln n, 14208 ln n] in >= 95% and never below 37 ln n.
// rounding: exhaustive to n = 200 for c in {0, 1}; M = 2 n^(c+2) must fail.
// averaging: n in {10, 100, 1000}, M = 3 n^3. 100 full traces per n with
//   sum and potential checked every step; 200 trials of time to the
//   [M/n - n, M/n + n] band, which must be <= ln(4 M^2) in >= 95%.
// birthday: exact value at n = 2, len 1; Monte Carlo at n = 100, len 20
//   within 20% of the union bound (10^6 samples); frequency at len 14
//   <= 1/e and falling as len grows.
std::vector<CheckResult> run_battery(Battery battery, const CheckOptions& options = {});

std::vector<CheckResult> check_epidemic(const CheckOptions& options);
std::vector<CheckResult> check_phase_clock(const CheckOptions& options);
std::vector<CheckResult> check_rounding(const CheckOptions& options);
std::vector<CheckResult> check_averaging(const CheckOptions& options);
std::vector<CheckResult> check_birthday(const CheckOptions& options);

}  // namespace exactcount::checks
