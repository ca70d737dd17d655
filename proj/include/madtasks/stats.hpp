#pragma once

// 2x2 contingency statistics: crude odds ratios with Wald intervals, the
// Pearson chi-squared independence test and the phi coefficient.

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <tuple>
#include <utility>

#include "madtasks/error.hpp"
#include "madtasks/event.hpp"

namespace madtasks {

inline constexpr double kDefaultZ = 1.96;
// 0.05 critical value of chi-squared with one degree of freedom.
inline constexpr double kChi2Critical05 = 3.8415;

//            Cases  Controls
// behavior     a       b
// reference    c       d
struct CrossTab {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
  std::uint64_t d = 0;

  friend bool operator==(const CrossTab&, const CrossTab&) = default;
};

namespace detail {

inline void require_nonzero(const CrossTab& t, std::string_view context) {
  const std::string ctx(context);
  if (t.a == 0) throw ZeroCellError('a', ctx);
  if (t.b == 0) throw ZeroCellError('b', ctx);
  if (t.c == 0) throw ZeroCellError('c', ctx);
  if (t.d == 0) throw ZeroCellError('d', ctx);
}

}  // namespace detail

// (a/b)/(c/d). No continuity correction: any zero cell is an error.
inline double crude_or(const CrossTab& t, std::string_view context = {}) {
  detail::require_nonzero(t, context);
  return (static_cast<double>(t.a) / static_cast<double>(t.b)) / (static_cast<double>(t.c) / static_cast<double>(t.d));
}

inline double log_or_standard_error(const CrossTab& t) {
  return std::sqrt(1.0 / static_cast<double>(t.a) + 1.0 / static_cast<double>(t.b) + 1.0 / static_cast<double>(t.c) +
                   1.0 / static_cast<double>(t.d));
}

// exp(log(OR) -/+ z * sqrt(1/a + 1/b + 1/c + 1/d))
inline std::pair<double, double> or_confidence_interval(const CrossTab& t, double z = kDefaultZ,
                                                        std::string_view context = {}) {
  const double log_or = std::log(crude_or(t, context));
  const double half = z * log_or_standard_error(t);
  return {std::exp(log_or - half), std::exp(log_or + half)};
}

enum class Behavior { SAD, MAD, ThreePlus };
enum class Reference { NoTasks, SAD, MAD };

inline std::string_view to_string(Behavior b) {
  switch (b) {
    case Behavior::SAD: return "SAD";
    case Behavior::MAD: return "MAD";
    case Behavior::ThreePlus: return "3+";
  }
  return "?";
}

inline std::string_view to_string(Reference r) {
  switch (r) {
    case Reference::NoTasks: return "NoTasks";
    case Reference::SAD: return "SAD";
    case Reference::MAD: return "MAD";
  }
  return "?";
}

struct OddsRatioResult {
  double or_hat = 0;
  double ci_low = 0;
  double ci_high = 0;
  CrossTab cross_tab;
  Behavior behavior = Behavior::MAD;
  Reference reference = Reference::NoTasks;
  EventType event_type = EventType::CNC;
  Taxonomy taxonomy = Taxonomy::Shrp2;
};

inline OddsRatioResult odds_ratio(const CrossTab& t, Behavior behavior, Reference reference, EventType event_type,
                                  Taxonomy taxonomy, double z = kDefaultZ) {
  const std::string context = std::string(to_string(event_type)) + " " + std::string(to_string(behavior)) + "/" +
                              std::string(to_string(reference)) + " " + std::string(to_string(taxonomy));
  OddsRatioResult r;
  r.or_hat = crude_or(t, context);
  std::tie(r.ci_low, r.ci_high) = or_confidence_interval(t, z, context);
  r.cross_tab = t;
  r.behavior = behavior;
  r.reference = reference;
  r.event_type = event_type;
  r.taxonomy = taxonomy;
  return r;
}

// OR of numerator.behavior against denominator.behavior; both must share the
// stratum (event type, taxonomy, reference level).
inline double or_ratio(const OddsRatioResult& numerator, const OddsRatioResult& denominator) {
  if (numerator.event_type != denominator.event_type || numerator.taxonomy != denominator.taxonomy ||
      numerator.reference != denominator.reference) {
    throw ContractViolation("or_ratio requires equal event type, taxonomy and reference level");
  }
  return numerator.or_hat / denominator.or_hat;
}

// ---------------------------------------------------------------------------
// Pair statistics for co-occurrence edges

struct PairStats {
  std::uint64_t n = 0;
  std::uint64_t n_a = 0;
  std::uint64_t n_b = 0;
  std::uint64_t n_ab = 0;
  double expected_ab = 0;
  std::optional<double> chi2;
  std::optional<double> phi;  // empty when a marginal is 0 or n
};

namespace detail {

inline void check_pair_inputs(std::uint64_t n, std::uint64_t n_a, std::uint64_t n_b, std::uint64_t n_ab) {
  if (n_a > n || n_b > n || n_ab > n_a || n_ab > n_b || n_a + n_b - n_ab > n) {
    throw ContractViolation("inconsistent pair counts n=" + std::to_string(n) + " n_a=" + std::to_string(n_a) +
                            " n_b=" + std::to_string(n_b) + " n_ab=" + std::to_string(n_ab));
  }
}

inline bool degenerate_marginals(std::uint64_t n, std::uint64_t n_a, std::uint64_t n_b) {
  return n_a == 0 || n_b == 0 || n_a == n || n_b == n;
}

}  // namespace detail

struct Chi2Result {
  double chi2 = 0;
  bool significant = false;
};

// Pearson statistic of the table (n_ab, n_a-n_ab / n_b-n_ab, n-n_a-n_b+n_ab),
// summed cell by cell, without continuity correction.
inline Chi2Result chi2_2x2(std::uint64_t n, std::uint64_t n_a, std::uint64_t n_b, std::uint64_t n_ab) {
  detail::check_pair_inputs(n, n_a, n_b, n_ab);
  if (detail::degenerate_marginals(n, n_a, n_b)) {
    throw DegenerateError("a marginal equals 0 or n; chi-squared undefined");
  }
  const long double N = static_cast<long double>(n);
  const long double row[2] = {static_cast<long double>(n_a), N - static_cast<long double>(n_a)};
  const long double col[2] = {static_cast<long double>(n_b), N - static_cast<long double>(n_b)};
  const long double obs[2][2] = {
      {static_cast<long double>(n_ab), static_cast<long double>(n_a - n_ab)},
      {static_cast<long double>(n_b - n_ab), static_cast<long double>(n - n_a - n_b + n_ab)},
  };
  long double sum = 0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const long double expected = row[i] * col[j] / N;
      const long double diff = obs[i][j] - expected;
      sum += diff * diff / expected;
    }
  }
  const double chi2 = static_cast<double>(sum);
  return {chi2, chi2 > kChi2Critical05};
}

inline double phi_coefficient(std::uint64_t n, std::uint64_t n_a, std::uint64_t n_b, std::uint64_t n_ab) {
  detail::check_pair_inputs(n, n_a, n_b, n_ab);
  if (detail::degenerate_marginals(n, n_a, n_b)) {
    throw DegenerateError("a marginal equals 0 or n; phi undefined");
  }
  const long double N = static_cast<long double>(n);
  const long double A = static_cast<long double>(n_a);
  const long double B = static_cast<long double>(n_b);
  const long double num = N * static_cast<long double>(n_ab) - A * B;
  const long double den = std::sqrt(A * B * (N - A) * (N - B));
  return static_cast<double>(num / den);
}

inline PairStats make_pair_stats(std::uint64_t n, std::uint64_t n_a, std::uint64_t n_b, std::uint64_t n_ab) {
  detail::check_pair_inputs(n, n_a, n_b, n_ab);
  PairStats p{n, n_a, n_b, n_ab, 0.0, std::nullopt, std::nullopt};
  p.expected_ab = n == 0 ? 0.0 : static_cast<double>(n_a) * static_cast<double>(n_b) / static_cast<double>(n);
  if (!detail::degenerate_marginals(n, n_a, n_b)) {
    p.chi2 = chi2_2x2(n, n_a, n_b, n_ab).chi2;
    p.phi = phi_coefficient(n, n_a, n_b, n_ab);
  }
  return p;
}

}  // namespace madtasks
