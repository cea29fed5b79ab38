#include "sspr/assortativity.hpp"

#include <algorithm>
#include <cmath>

#include "sspr/errors.hpp"

namespace sspr {

StrengthType strength_type(int number) {
  if (number == 1) return StrengthType::Out;
  if (number == 2) return StrengthType::In;
  throw ConfigError("strength type must be 1 (out) or 2 (in), got " + std::to_string(number));
}

StrengthProfile strength_profile(const WeightedDigraph& g) {
  StrengthProfile p;
  p.out = g.out_strength();
  p.in = g.in_strength();
  p.tau = p.out.sum();
  if (!(p.tau > 0.0)) throw UndefinedError("strength profile undefined: total weight is zero");
  // Source moments are weighted by out-strength, target moments by in-strength.
  for (StrengthType t : kStrengthTypes) {
    const Vector& s = p.strength(t);
    const std::size_t x = type_index(t);
    p.src_mean[x] = p.out.dot(s) / p.tau;
    p.trg_mean[x] = p.in.dot(s) / p.tau;
    const Vector src_dev = s.array() - p.src_mean[x];
    const Vector trg_dev = s.array() - p.trg_mean[x];
    p.src_sd[x] = std::sqrt(std::max(0.0, p.out.dot(src_dev.cwiseProduct(src_dev)) / p.tau));
    p.trg_sd[x] = std::sqrt(std::max(0.0, p.in.dot(trg_dev.cwiseProduct(trg_dev)) / p.tau));
  }
  return p;
}

namespace {

const char* type_word(StrengthType t) { return t == StrengthType::Out ? "out" : "in"; }

// SDs below this relative level are round-off on constant strengths.
bool vanished(double sd, double mean) { return sd <= 1e-12 * std::max(1.0, std::abs(mean)); }

}  // namespace

std::optional<std::string> undefined_reason(const StrengthProfile& p, StrengthType a,
                                            StrengthType b) {
  const std::size_t xa = type_index(a);
  const std::size_t xb = type_index(b);
  if (vanished(p.src_sd[xa], p.src_mean[xa])) {
    return std::string("source ") + type_word(a) + "-strength SD is zero";
  }
  if (vanished(p.trg_sd[xb], p.trg_mean[xb])) {
    return std::string("target ") + type_word(b) + "-strength SD is zero";
  }
  return std::nullopt;
}

double assortativity(const WeightedDigraph& g, const StrengthProfile& p, StrengthType a,
                     StrengthType b) {
  if (auto reason = undefined_reason(p, a, b)) {
    throw UndefinedError("r(" + std::to_string(type_number(a)) + "," +
                         std::to_string(type_number(b)) + ") undefined: " + *reason);
  }
  const std::size_t xa = type_index(a);
  const std::size_t xb = type_index(b);
  const Vector src_dev = p.strength(a).array() - p.src_mean[xa];
  const Vector trg_dev = p.strength(b).array() - p.trg_mean[xb];
  const double cov = src_dev.dot(g.weights() * trg_dev);
  const double r = cov / (p.tau * p.src_sd[xa] * p.trg_sd[xb]);
  return std::clamp(r, -1.0, 1.0);
}

double assortativity(const WeightedDigraph& g, StrengthType a, StrengthType b) {
  return assortativity(g, strength_profile(g), a, b);
}

AssortativityQuad assortativity_all(const WeightedDigraph& g, const StrengthProfile& p) {
  AssortativityQuad q;
  for (StrengthType a : kStrengthTypes) {
    for (StrengthType b : kStrengthTypes) {
      if (!undefined_reason(p, a, b)) q(a, b) = assortativity(g, p, a, b);
    }
  }
  return q;
}

AssortativityQuad assortativity_all(const WeightedDigraph& g) {
  return assortativity_all(g, strength_profile(g));
}

double assortativity_delta(const StrengthProfile& p, std::size_t i, std::size_t j,
                           std::size_t k, std::size_t l, double dw, StrengthType a,
                           StrengthType b) {
  if (auto reason = undefined_reason(p, a, b)) {
    throw UndefinedError("r(" + std::to_string(type_number(a)) + "," +
                         std::to_string(type_number(b)) + ") undefined: " + *reason);
  }
  if (dw == 0.0) return 0.0;
  const std::size_t xa = type_index(a);
  const std::size_t xb = type_index(b);
  const Vector& sa = p.strength(a);
  const Vector& sb = p.strength(b);
  auto d = [&](std::size_t v) { return sa(static_cast<Eigen::Index>(v)) - p.src_mean[xa]; };
  auto e = [&](std::size_t v) { return sb(static_cast<Eigen::Index>(v)) - p.trg_mean[xb]; };
  // Cells (i,l) and (k,j) gain dw; (i,j) and (k,l) lose it.
  const double change = d(i) * e(l) + d(k) * e(j) - d(i) * e(j) - d(k) * e(l);
  return dw * change / (p.tau * p.src_sd[xa] * p.trg_sd[xb]);
}

AssortativityTracker::AssortativityTracker(const WeightedDigraph& g, const StrengthProfile& p)
    : quad_(assortativity_all(g, p)) {
  for (StrengthType t : kStrengthTypes) {
    const std::size_t x = type_index(t);
    src_dev_[x] = p.strength(t).array() - p.src_mean[x];
    trg_dev_[x] = p.strength(t).array() - p.trg_mean[x];
  }
  for (StrengthType a : kStrengthTypes) {
    for (StrengthType b : kStrengthTypes) {
      scale_[quad_index(a, b)] =
          undefined_reason(p, a, b)
              ? 0.0
              : 1.0 / (p.tau * p.src_sd[type_index(a)] * p.trg_sd[type_index(b)]);
    }
  }
}

void AssortativityTracker::update(std::size_t i, std::size_t j, std::size_t k, std::size_t l,
                                  double dw) {
  const auto I = static_cast<Eigen::Index>(i);
  const auto J = static_cast<Eigen::Index>(j);
  const auto K = static_cast<Eigen::Index>(k);
  const auto L = static_cast<Eigen::Index>(l);
  for (StrengthType a : kStrengthTypes) {
    const Vector& d = src_dev_[type_index(a)];
    for (StrengthType b : kStrengthTypes) {
      auto& slot = quad_(a, b);
      if (!slot) continue;
      const Vector& e = trg_dev_[type_index(b)];
      const double change = d(I) * e(L) + d(K) * e(J) - d(I) * e(J) - d(K) * e(L);
      *slot += dw * change * scale_[quad_index(a, b)];
    }
  }
}

}  // namespace sspr
