#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <string>

#include "sspr/graph.hpp"

namespace sspr {

/// Strength type: 1 = out-strength (row sums), 2 = in-strength (column sums).
enum class StrengthType { Out = 1, In = 2 };

inline constexpr std::array<StrengthType, 2> kStrengthTypes{StrengthType::Out, StrengthType::In};

inline std::size_t type_index(StrengthType t) { return t == StrengthType::Out ? 0 : 1; }
inline int type_number(StrengthType t) { return static_cast<int>(t); }
/// Parses 1 or 2; throws ConfigError otherwise.
StrengthType strength_type(int number);

/// Strengths and the weighted source/target moments that normalize r(a, b).
/// Means and SDs are indexed by type_index(a).
struct StrengthProfile {
  Vector out;
  Vector in;
  double tau = 0.0;
  std::array<double, 2> src_mean{};
  std::array<double, 2> trg_mean{};
  std::array<double, 2> src_sd{};
  std::array<double, 2> trg_sd{};

  const Vector& strength(StrengthType t) const { return t == StrengthType::Out ? out : in; }
};

/// Throws UndefinedError when the graph carries no weight.
StrengthProfile strength_profile(const WeightedDigraph& g);

/// Position of r(a, b) inside a quad: r11, r12, r21, r22.
inline std::size_t quad_index(StrengthType a, StrengthType b) {
  return 2 * type_index(a) + type_index(b);
}

/// The four directed assortativity coefficients. An empty entry means the
/// coefficient is undefined (a weighted SD vanished) or was not requested.
struct AssortativityQuad {
  std::array<std::optional<double>, 4> values{};

  std::optional<double>& operator()(StrengthType a, StrengthType b) {
    return values[quad_index(a, b)];
  }
  const std::optional<double>& operator()(StrengthType a, StrengthType b) const {
    return values[quad_index(a, b)];
  }
  std::optional<double>& operator[](std::size_t idx) { return values[idx]; }
  const std::optional<double>& operator[](std::size_t idx) const { return values[idx]; }
};

inline constexpr std::array<const char*, 4> kQuadNames{"r11", "r12", "r21", "r22"};

/// Why r(a, b) is undefined for this profile, or empty when it is defined.
std::optional<std::string> undefined_reason(const StrengthProfile& p, StrengthType a,
                                            StrengthType b);

/// r(a, b) of the graph. Throws UndefinedError naming the vanished SD.
double assortativity(const WeightedDigraph& g, StrengthType a, StrengthType b);
double assortativity(const WeightedDigraph& g, const StrengthProfile& p, StrengthType a,
                     StrengthType b);

AssortativityQuad assortativity_all(const WeightedDigraph& g);
AssortativityQuad assortativity_all(const WeightedDigraph& g, const StrengthProfile& p);

/// Change of r(a, b) caused by applying the step (node positions i, j, k, l)
/// to a graph whose strengths are summarized by `p`. Transfers preserve the
/// strengths, so the profile stays valid along a whole trajectory.
double assortativity_delta(const StrengthProfile& p, std::size_t i, std::size_t j,
                           std::size_t k, std::size_t l, double dw, StrengthType a,
                           StrengthType b);

/// Incremental quad along a rewiring trajectory. Deviation vectors are
/// computed once; each update is O(1) per coefficient.
class AssortativityTracker {
 public:
  AssortativityTracker(const WeightedDigraph& g, const StrengthProfile& p);

  const AssortativityQuad& current() const noexcept { return quad_; }
  void update(std::size_t i, std::size_t j, std::size_t k, std::size_t l, double dw);

 private:
  std::array<Vector, 2> src_dev_;
  std::array<Vector, 2> trg_dev_;
  std::array<double, 4> scale_{};  // 1 / (tau * sd_src * sd_trg), 0 when undefined
  AssortativityQuad quad_;
};

}  // namespace sspr
