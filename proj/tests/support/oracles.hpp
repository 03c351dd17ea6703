#pragma once

// Independent reference implementations used to check the engine. They
// share no code with core beyond plain data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <vector>

#include "oee/events.hpp"
#include "oee/rules.hpp"

namespace oracle {

struct PlainRule {
  bool productive = true;
  std::vector<std::uint32_t> inputs;
  std::uint32_t out = 0;
};

struct Outcome {
  std::vector<std::uint8_t> sigma;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> created;    // (entity, rule)
  std::vector<std::pair<std::uint32_t, std::uint32_t>> destroyed;  // (entity, rule)
};

// Enumerates every rule against sigma(t). An absent entity is created when
// some active productive rule outputs it and no active destructive rule
// targets it; a present entity is destroyed when some active destructive
// rule targets it. Causes are the lowest qualifying rule index.
inline Outcome brute_force_update(const std::vector<PlainRule>& rules, const std::vector<std::uint8_t>& sigma) {
  const std::size_t e = sigma.size();
  std::vector<std::optional<std::uint32_t>> producer(e), destroyer(e);
  for (std::uint32_t r = 0; r < rules.size(); ++r) {
    bool active = true;
    for (auto i : rules[r].inputs) active = active && sigma[i] == 1;
    if (!active) continue;
    auto& slot = rules[r].productive ? producer[rules[r].out] : destroyer[rules[r].out];
    if (!slot) slot = r;
  }
  Outcome o{sigma, {}, {}};
  for (std::uint32_t i = 0; i < e; ++i) {
    if (destroyer[i]) {
      o.sigma[i] = 0;
      if (sigma[i] == 1) o.destroyed.emplace_back(i, *destroyer[i]);
    } else if (producer[i] && sigma[i] == 0) {
      o.sigma[i] = 1;
      o.created.emplace_back(i, *producer[i]);
    }
  }
  return o;
}

inline std::vector<std::uint32_t> brute_force_milieu(const std::vector<PlainRule>& rules, std::uint32_t i) {
  std::set<std::uint32_t> m;
  for (const auto& r : rules) {
    const bool reads = std::find(r.inputs.begin(), r.inputs.end(), i) != r.inputs.end();
    if (reads || r.out == i) m.insert(r.inputs.begin(), r.inputs.end());
  }
  m.erase(i);
  return {m.begin(), m.end()};
}

inline std::vector<PlainRule> plain(const oee::RuleTable& table) {
  std::vector<PlainRule> out;
  for (const auto& r : table.rules()) out.push_back({r.kind == oee::RuleKind::Productive, r.inputs, r.output});
  return out;
}

// Draws a random valid table over e entities with at most max_rules rules.
template <class Gen>
oee::RuleTable random_table(Gen& gen, std::size_t e, std::size_t max_rules) {
  oee::RuleTable table(e);
  const auto n = std::uniform_int_distribution<std::size_t>(0, max_rules)(gen);
  for (std::size_t k = 0; k < n; ++k) {
    const auto arity = std::uniform_int_distribution<std::size_t>(1, e - 1)(gen);
    std::vector<std::uint32_t> perm(e);
    for (std::uint32_t i = 0; i < e; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<std::uint32_t> inputs(perm.begin(), perm.begin() + static_cast<std::ptrdiff_t>(arity));
    const auto kind = std::bernoulli_distribution(0.5)(gen) ? oee::RuleKind::Productive : oee::RuleKind::Destructive;
    table.add(0, kind, inputs, perm[arity]);
  }
  return table;
}

template <class Gen>
std::vector<std::uint8_t> random_sigma(Gen& gen, std::size_t e) {
  std::vector<std::uint8_t> s(e);
  for (auto& x : s) x = static_cast<std::uint8_t>(std::bernoulli_distribution(0.5)(gen));
  return s;
}

// Hurwitz zeta by direct summation plus an Euler-Maclaurin tail.
inline double zeta(double s, double q) {
  constexpr int kTerms = 20000;
  double sum = 0.0;
  for (int k = 0; k < kTerms; ++k) sum += std::pow(q + k, -s);
  const double n = q + kTerms;
  return sum + std::pow(n, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(n, -s) + s / 12.0 * std::pow(n, -s - 1.0);
}

// Inverse-CDF sampler for p(x) = x^-alpha / zeta(alpha, x_min), x >= x_min.
class DiscretePowerLaw {
 public:
  DiscretePowerLaw(double alpha, std::uint64_t x_min, std::size_t table = 1'000'000)
      : alpha_(alpha), x_min_(x_min) {
    const double norm = zeta(alpha, static_cast<double>(x_min));
    cdf_.reserve(table);
    double acc = 0.0;
    for (std::size_t k = 0; k < table; ++k) {
      acc += std::pow(static_cast<double>(x_min + k), -alpha) / norm;
      cdf_.push_back(acc);
    }
  }

  template <class Gen>
  std::uint64_t operator()(Gen& gen) const {
    const double u = static_cast<double>(gen() >> 11) * 0x1.0p-53;
    const auto it = std::lower_bound(cdf_.begin(), cdf_.end(), u);
    if (it != cdf_.end()) return x_min_ + static_cast<std::uint64_t>(it - cdf_.begin());
    // Far tail: continuous approximation, beyond the table.
    const double x = (static_cast<double>(x_min_) - 0.5) * std::pow(1.0 - u, -1.0 / (alpha_ - 1.0)) + 0.5;
    return std::max<std::uint64_t>(x_min_ + cdf_.size(), static_cast<std::uint64_t>(x));
  }

 private:
  double alpha_;
  std::uint64_t x_min_;
  std::vector<double> cdf_;
};

// P(X <= k) for X ~ Binomial(n, p), summed in log space.
inline double binomial_cdf(std::uint64_t n, double p, std::uint64_t k) {
  double acc = 0.0;
  for (std::uint64_t j = 0; j <= k; ++j) {
    const double lg = std::lgamma(n + 1.0) - std::lgamma(j + 1.0) - std::lgamma(n - j + 1.0) + j * std::log(p) +
                      (n - j) * std::log1p(-p);
    acc += std::exp(lg);
  }
  return acc;
}

}  // namespace oracle
