#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>

#include <boost/math/tools/minima.hpp>
#include <fmt/format.h>
#include <gsl/gsl_errno.h>
#include <gsl/gsl_sf_zeta.h>

#include "oee/error.hpp"
#include "oee/stats.hpp"

namespace oee {

namespace {

constexpr std::size_t kMinTail = 10;
constexpr double kAlphaLo = 1.0 + 1e-6;
constexpr double kAlphaHi = 50.0;

void disable_gsl_abort() {
  static std::once_flag once;
  std::call_once(once, [] { gsl_set_error_handler_off(); });
}

double ks_distance(const std::vector<std::uint64_t>& sorted_tail, double alpha, std::uint64_t x_min) {
  const double n = static_cast<double>(sorted_tail.size());
  const double norm = hurwitz_zeta(alpha, static_cast<double>(x_min));
  double d = 0.0;
  std::size_t below = 0;  // samples strictly below the current value
  for (std::size_t i = 0; i < sorted_tail.size();) {
    const auto v = sorted_tail[i];
    std::size_t j = i;
    while (j < sorted_tail.size() && sorted_tail[j] == v) ++j;
    // Both CDFs are step functions on the integers; between two observed
    // values the empirical one is flat, so the extremes sit at v - 1 and v.
    const double emp_before = static_cast<double>(below) / n;
    const double emp_at = static_cast<double>(j) / n;
    const double fit_before = v > x_min ? 1.0 - hurwitz_zeta(alpha, static_cast<double>(v)) / norm : 0.0;
    const double fit_at = 1.0 - hurwitz_zeta(alpha, static_cast<double>(v + 1)) / norm;
    d = std::max({d, std::abs(emp_before - fit_before), std::abs(emp_at - fit_at)});
    below = j;
    i = j;
  }
  return std::min(d, 1.0);
}

}  // namespace

double hurwitz_zeta(double s, double q) {
  disable_gsl_abort();
  gsl_sf_result result;
  if (gsl_sf_hzeta_e(s, q, &result) != GSL_SUCCESS) {
    fail(ErrorCode::InvalidParameter, fmt::format("hurwitz zeta undefined at s = {}, q = {}", s, q));
  }
  return result.val;
}

double power_law_cdf(double alpha, std::uint64_t x_min, std::uint64_t x) {
  if (x < x_min) return 0.0;
  return 1.0 - hurwitz_zeta(alpha, static_cast<double>(x + 1)) / hurwitz_zeta(alpha, static_cast<double>(x_min));
}

PowerLawFit fit_power_law(std::span<const std::uint64_t> samples, std::uint64_t x_min) {
  if (x_min < 1) fail(ErrorCode::InvalidParameter, "x_min must be at least 1");
  std::vector<std::uint64_t> tail;
  for (auto x : samples) {
    if (x == 0) fail(ErrorCode::InvalidParameter, "power-law samples must be positive");
    if (x >= x_min) tail.push_back(x);
  }
  if (tail.size() < kMinTail) {
    fail(ErrorCode::InsufficientSamples,
         fmt::format("{} samples at or above x_min = {}, need {}", tail.size(), x_min, kMinTail));
  }
  std::sort(tail.begin(), tail.end());
  if (tail.back() == x_min) fail(ErrorCode::DegenerateTail, "every tail sample equals x_min");

  const double n = static_cast<double>(tail.size());
  double sum_log = 0.0;
  double sum_log_shifted = 0.0;
  const double shift = static_cast<double>(x_min) - 0.5;
  for (auto x : tail) {
    const double lx = std::log(static_cast<double>(x));
    sum_log += lx;
    sum_log_shifted += lx - std::log(shift);
  }

  // Exact discrete likelihood: L(alpha) = -n ln zeta(alpha, x_min) - alpha sum ln x.
  const double q = static_cast<double>(x_min);
  auto nll = [&](double alpha) { return n * std::log(hurwitz_zeta(alpha, q)) + alpha * sum_log; };
  const auto [alpha, value] =
      boost::math::tools::brent_find_minima(nll, kAlphaLo, kAlphaHi, std::numeric_limits<double>::digits / 2);
  (void)value;

  PowerLawFit fit;
  fit.alpha = alpha;
  fit.alpha_closed_form = 1.0 + n / sum_log_shifted;
  fit.x_min = x_min;
  fit.n_tail = tail.size();
  fit.ks = ks_distance(tail, alpha, x_min);
  return fit;
}

PowerLawFit fit_power_law_scan(std::span<const std::uint64_t> samples) {
  std::vector<std::uint64_t> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  std::optional<PowerLawFit> best;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (i > 0 && sorted[i] == sorted[i - 1]) continue;
    if (sorted.size() - i < kMinTail) break;
    if (sorted[i] == sorted.back()) break;
    const auto fit = fit_power_law(samples, std::max<std::uint64_t>(sorted[i], 1));
    if (!best || fit.ks < best->ks) best = fit;
  }
  if (!best) return fit_power_law(samples, 1);
  return *best;
}

}  // namespace oee
