#pragma once

#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>

namespace dld {

/// Error type thrown by every library operation on contract violations.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Canonical feature order. Every cohort file, model file, and report uses
// exactly this order; nothing in the library reorders features.
inline constexpr std::size_t kNumFeatures = 5;
inline constexpr std::array<std::string_view, kNumFeatures> kFeatureNames = {
    "perception", "rt_perception", "vocabulary", "morphosyntax", "repetition"};

using FeatureVector = std::array<double, kNumFeatures>;

/// Diagnostic group. DLD is the positive class everywhere (metrics, ROC,
/// predicted probabilities).
enum class Group { DLD, TD };

inline std::string_view to_string(Group g) {
  return g == Group::DLD ? "DLD" : "TD";
}

/// Case-insensitive label parse; canonical spellings are "DLD" and "TD".
inline std::optional<Group> parse_group(std::string_view s) {
  auto ieq = [](std::string_view a, std::string_view b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(a[i])) !=
          std::tolower(static_cast<unsigned char>(b[i]))) {
        return false;
      }
    }
    return true;
  };
  if (ieq(s, "DLD")) return Group::DLD;
  if (ieq(s, "TD")) return Group::TD;
  return std::nullopt;
}

inline double mean(std::span<const double> xs) {
  double s = 0.0;
  for (double x : xs) s += x;
  return s / static_cast<double>(xs.size());
}

/// Sample standard deviation (n-1 denominator). Returns 0 for n < 2.
inline double sample_sd(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

/// Shortest decimal text that parses back to the identical double.
inline std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

}  // namespace dld
