#include "sfode/periodization.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sfode/errors.hpp"

namespace sfode {

std::string_view to_string(PeriodizationKind kind) noexcept {
  switch (kind) {
    case PeriodizationKind::tent: return "tent";
    case PeriodizationKind::spline4: return "spline4";
    case PeriodizationKind::cosine: return "cosine";
  }
  return "?";
}

PeriodizationKind parse_periodization_kind(std::string_view name) {
  if (name == "tent") return PeriodizationKind::tent;
  if (name == "spline4") return PeriodizationKind::spline4;
  if (name == "cosine") return PeriodizationKind::cosine;
  throw ContractError("unknown periodization '" + std::string(name) + "'");
}

PeriodizationMap::PeriodizationMap(PeriodizationKind kind, double alpha, double beta)
    : kind_(kind), alpha_(alpha), beta_(beta) {
  if (!(alpha < beta)) throw ContractError("PeriodizationMap: requires alpha < beta");
}

double PeriodizationMap::spline_half(double x) const noexcept {
  const double w = beta_ - alpha_;
  return (-16.0 * x + 12.0) * w * x * x + alpha_;
}

double PeriodizationMap::forward(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("periodization forward: x outside [0,1]");
  const double w = beta_ - alpha_;
  // 1 - x is exact on [1/2, 1], so both halves share one formula.
  x = fold(x);
  switch (kind_) {
    case PeriodizationKind::tent:
      return beta_ - std::abs(2.0 * w * (0.5 - x));
    case PeriodizationKind::spline4:
      return spline_half(x);
    case PeriodizationKind::cosine:
      return 0.5 * (alpha_ - beta_) * std::cos(2.0 * std::numbers::pi * x) + 0.5 * (alpha_ + beta_);
  }
  return 0.0;
}

double PeriodizationMap::derivative(double x) const {
  if (!(x >= 0.0 && x <= 1.0)) throw DomainError("periodization derivative: x outside [0,1]");
  const double w = beta_ - alpha_;
  switch (kind_) {
    case PeriodizationKind::tent:
      if (x < 0.5) return 2.0 * w;
      if (x < 1.0) return -2.0 * w;
      return -2.0 * w;
    case PeriodizationKind::spline4:
      if (x <= 0.5) return (-48.0 * x + 24.0) * w * x;
      return ((48.0 * x - 72.0) * x + 24.0) * w;
    case PeriodizationKind::cosine:
      return std::numbers::pi * w * std::sin(2.0 * std::numbers::pi * x);
  }
  return 0.0;
}

double PeriodizationMap::inverse(double t) const {
  if (!(t >= alpha_ && t <= beta_)) throw DomainError("periodization inverse: t outside [alpha, beta]");
  const double w = beta_ - alpha_;
  switch (kind_) {
    case PeriodizationKind::tent:
      return (t - alpha_) / (2.0 * w);
    case PeriodizationKind::cosine: {
      // cos(2 pi x) = (alpha + beta - 2t) / (beta - alpha)
      const double c = std::clamp((alpha_ + beta_ - 2.0 * t) / w, -1.0, 1.0);
      return std::acos(c) / (2.0 * std::numbers::pi);
    }
    case PeriodizationKind::spline4: {
      if (t == alpha_) return 0.0;
      if (t == beta_) return 0.5;
      // Safeguarded Newton on [0, 1/2]; the bracket shrinks every step.
      double lo = 0.0, hi = 0.5;
      double x = std::clamp((t - alpha_) / (2.0 * w), 0.0, 0.5);
      for (int it = 0; it < 200; ++it) {
        const double g = spline_half(x) - t;
        if (g == 0.0) return x;
        if (g < 0.0)
          lo = x;
        else
          hi = x;
        if (hi - lo < 1e-15) break;
        const double slope = (-48.0 * x + 24.0) * w * x;
        double next = slope > 0.0 ? x - g / slope : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - x) < 1e-16) {
          x = next;
          break;
        }
        x = next;
      }
      return x;
    }
  }
  return 0.0;
}

ProductPeriodization ProductPeriodization::uniform(PeriodizationKind kind,
                                                   const std::vector<Interval>& boxes) {
  std::vector<PeriodizationMap> maps;
  maps.reserve(boxes.size());
  for (const auto& b : boxes) maps.emplace_back(kind, b.lo, b.hi);
  return ProductPeriodization(std::move(maps));
}

void ProductPeriodization::forward(std::span<const double> x, std::span<double> out) const {
  if (x.size() != maps_.size() || out.size() != maps_.size())
    throw ContractError("ProductPeriodization::forward: dimension mismatch");
  for (std::size_t j = 0; j < maps_.size(); ++j) out[j] = maps_[j].forward(x[j]);
}

void ProductPeriodization::inverse(std::span<const double> t, std::span<double> out) const {
  if (t.size() != maps_.size() || out.size() != maps_.size())
    throw ContractError("ProductPeriodization::inverse: dimension mismatch");
  for (std::size_t j = 0; j < maps_.size(); ++j) out[j] = maps_[j].inverse(t[j]);
}

double ProductPeriodization::abs_jacobian(std::span<const double> x) const {
  if (x.size() != maps_.size()) throw ContractError("ProductPeriodization::abs_jacobian: dimension mismatch");
  double j = 1.0;
  for (std::size_t i = 0; i < maps_.size(); ++i) j *= std::abs(maps_[i].derivative(x[i]));
  return j;
}

}  // namespace sfode
