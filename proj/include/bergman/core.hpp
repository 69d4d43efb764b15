#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdio>
#include <exception>
#include <mutex>
#include <thread>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace bergman {

using cplx = std::complex<double>;

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kPi = 3.14159265358979323846;

/// Raised for invalid inputs and configurations.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a computation cannot produce a trustworthy number.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A nonnegative real result that may be +infinity (divergent integral,
/// degenerate exponent) or sit on a logarithmic borderline.  `coarse` and
/// `refined` keep the last two refinement values when the result came out
/// of a refinement comparison.
struct Flagged {
  double value = 0.0;
  bool infinite = false;
  bool borderline = false;
  double coarse = 0.0;
  double refined = 0.0;

  static Flagged exact(double v) { return {v, false, false, v, v}; }
  static Flagged inf(double coarse = kInf, double refined = kInf) {
    return {kInf, true, false, coarse, refined};
  }

  bool finite() const noexcept { return !infinite; }
  double or_inf() const noexcept { return infinite ? kInf : value; }
};

/// Two successive boundary refinements differing by more than
/// `rel_threshold` (relative to the refined value) mark divergence.
inline Flagged compare_refinements(double coarse, double refined,
                                   double rel_threshold = 0.1) {
  if (!std::isfinite(coarse) || !std::isfinite(refined)) {
    return Flagged::inf(coarse, refined);
  }
  const double scale = std::max(std::abs(refined), std::abs(coarse));
  if (scale == 0.0) return Flagged::exact(0.0);
  if (std::abs(refined - coarse) > rel_threshold * std::abs(refined)) {
    return Flagged::inf(coarse, refined);
  }
  return {refined, false, false, coarse, refined};
}

namespace detail {

template <class T>
T pairwise_sum_impl(const T* data, std::size_t n) {
  if (n <= 8) {
    T acc{};
    for (std::size_t i = 0; i < n; ++i) acc += data[i];
    return acc;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_impl(data, half) + pairwise_sum_impl(data + half, n - half);
}

}  // namespace detail

/// Pairwise (cascade) summation; the reduction tree depends only on the
/// length, so results are bit-stable for a fixed input order.
template <class T>
T pairwise_sum(std::span<const T> values) {
  return detail::pairwise_sum_impl(values.data(), values.size());
}

template <class T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

/// log Γ(x) for x > 0, reentrant.
inline double log_gamma(double x) {
#if defined(__GLIBC__)
  int sign = 0;
  return ::lgamma_r(x, &sign);
#else
  return std::lgamma(x);
#endif
}

/// Γ(a)/Γ(b) evaluated through log-gamma differences (a, b > 0).
inline double gamma_ratio(double a, double b) { return std::exp(log_gamma(a) - log_gamma(b)); }

/// Symmetric Gauss hypergeometric series 2F1(a, a; c; x) for a, c > 0 and
/// 0 <= x < 1.  All terms are positive; summation stops once a geometric
/// tail bound falls below `tol` times the partial sum.
inline double hyp2f1_symmetric(double a, double c, double x, double tol = 1e-15,
                               std::size_t max_terms = 200'000'000) {
  if (!(a > 0.0) || !(c > 0.0)) throw ConfigError("hyp2f1_symmetric: parameters must be positive");
  if (x < 0.0 || x >= 1.0) throw ConfigError("hyp2f1_symmetric: argument outside [0,1)");
  if (x == 0.0) return 1.0;
  double term = 1.0;
  double sum = 1.0;
  const double k_min = 2.0 * a + c + 2.0;
  for (std::size_t k = 0; k < max_terms; ++k) {
    const double kd = static_cast<double>(k);
    const double ratio = (a + kd) * (a + kd) / ((kd + 1.0) * (c + kd));
    term *= ratio * x;
    sum += term;
    if (kd + 1.0 >= k_min) {
      // Beyond k_min the term ratio is monotone in k with limit x.
      const double kn = kd + 1.0;
      const double next = (a + kn) * (a + kn) / ((kn + 1.0) * (c + kn));
      const double q = x * std::max(next, 1.0);
      if (q < 1.0 && term * q / (1.0 - q) <= tol * sum) return sum;
    }
  }
  throw NumericError("hyp2f1_symmetric: series did not converge");
}

namespace detail {
inline int& thread_count() {
  static int count = 1;
  return count;
}
}  // namespace detail

/// Worker threads used by grid evaluations; results do not depend on it.
inline void set_num_threads(int threads) { detail::thread_count() = std::max(1, threads); }
inline int num_threads() { return detail::thread_count(); }

/// Runs fn(i) for i in [0, count) over contiguous static chunks.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(num_threads()), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t lo = count * w / workers;
    const std::size_t hi = count * (w + 1) / workers;
    pool.emplace_back([&, lo, hi] {
      try {
        for (std::size_t i = lo; i < hi; ++i) fn(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

inline std::string format_double(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

/// Six significant digits, for labels and file names.
inline std::string format_short(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace bergman
