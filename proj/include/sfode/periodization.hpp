#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sfode {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;
  double length() const noexcept { return hi - lo; }
};

enum class PeriodizationKind { tent, spline4, cosine };

std::string_view to_string(PeriodizationKind kind) noexcept;
// Accepts "tent", "spline4", "cosine"; throws ContractError otherwise.
PeriodizationKind parse_periodization_kind(std::string_view name);

// A symmetric variable transform phi: [0,1] -> [alpha, beta] with
// phi(0) = alpha, phi(1/2) = beta, phi(1/2 - x) = phi(1/2 + x), strictly
// increasing on (0, 1/2).
class PeriodizationMap {
 public:
  PeriodizationMap(PeriodizationKind kind, double alpha, double beta);
  static PeriodizationMap tent(double alpha, double beta) { return {PeriodizationKind::tent, alpha, beta}; }
  static PeriodizationMap spline4(double alpha, double beta) { return {PeriodizationKind::spline4, alpha, beta}; }
  static PeriodizationMap cosine(double alpha, double beta) { return {PeriodizationKind::cosine, alpha, beta}; }

  PeriodizationKind kind() const noexcept { return kind_; }
  double alpha() const noexcept { return alpha_; }
  double beta() const noexcept { return beta_; }

  // x in [0,1]; throws DomainError outside.
  double forward(double x) const;
  // Analytic phi'(x). The tent kinks 0, 1/2, 1 return the slope of the
  // branch to their right (x = 1 uses the left branch).
  double derivative(double x) const;
  // Unique x in [0, 1/2] with forward(x) = t, t in [alpha, beta].
  double inverse(double t) const;

  // Constant factor replacing phi' inside [0, 1/2] for the tent map,
  // |phi'| = 2 (beta - alpha).
  double tent_slope() const noexcept { return 2.0 * (beta_ - alpha_); }

  // phi^{-1}(phi(x)) for x in [0,1): the reflection of x into [0, 1/2].
  static double fold(double x) noexcept { return x <= 0.5 ? x : 1.0 - x; }

 private:
  double spline_half(double x) const noexcept;  // first branch on [0, 1/2]
  PeriodizationKind kind_;
  double alpha_;
  double beta_;
};

// Componentwise periodization of a vector of variables.
class ProductPeriodization {
 public:
  ProductPeriodization() = default;
  explicit ProductPeriodization(std::vector<PeriodizationMap> maps) : maps_(std::move(maps)) {}
  static ProductPeriodization uniform(PeriodizationKind kind, const std::vector<Interval>& boxes);

  std::size_t size() const noexcept { return maps_.size(); }
  const PeriodizationMap& operator[](std::size_t j) const { return maps_[j]; }
  const std::vector<PeriodizationMap>& maps() const noexcept { return maps_; }

  void forward(std::span<const double> x, std::span<double> out) const;
  void inverse(std::span<const double> t, std::span<double> out) const;
  // Product of |phi_j'(x_j)|.
  double abs_jacobian(std::span<const double> x) const;

 private:
  std::vector<PeriodizationMap> maps_;
};

}  // namespace sfode
