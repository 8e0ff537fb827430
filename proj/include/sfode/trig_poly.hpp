#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace sfode {

using Complex = std::complex<double>;
using Frequency = std::vector<int>;

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// e^{2 pi i t}
inline Complex unit_phase(double t) {
  const double a = kTwoPi * t;
  return {std::cos(a), std::sin(a)};
}

// Lexicographic comparison of two equal-length frequency vectors.
bool frequency_less(std::span<const int> a, std::span<const int> b) noexcept;

// A finite set of integer frequencies of a common dimension, stored flat.
// After canonicalize() the entries are sorted lexicographically and unique,
// and find() becomes available.
class FrequencySet {
 public:
  FrequencySet() = default;
  explicit FrequencySet(int dim);
  FrequencySet(int dim, std::vector<int> flat);
  static FrequencySet from_list(int dim, const std::vector<Frequency>& list);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return dim_ == 0 ? count0_ : data_.size() / dim_; }
  bool empty() const noexcept { return size() == 0; }
  std::span<const int> operator[](std::size_t i) const {
    return {data_.data() + i * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
  }
  const std::vector<int>& flat() const noexcept { return data_; }

  void reserve(std::size_t n) { data_.reserve(n * static_cast<std::size_t>(dim_)); }
  void push_back(std::span<const int> k);

  // Sort lexicographically and drop duplicates. Returns the permutation
  // applied: new entry i was old entry perm[i] (first occurrence kept).
  std::vector<std::size_t> canonicalize();
  bool is_canonical() const;
  // Binary search; requires canonical order.
  std::optional<std::size_t> find(std::span<const int> k) const;

  friend bool operator==(const FrequencySet&, const FrequencySet&) = default;

 private:
  int dim_ = 0;
  std::size_t count0_ = 0;  // zero-dimensional sets only hold the empty frequency
  std::vector<int> data_;
};

class AntiderivativeRep;

// Multivariate sparse trigonometric polynomial
//   p(x) = sum_{k in I} c_k e^{2 pi i k.x},  x in [0,1)^dim.
// Immutable after construction; terms are kept in lexicographic order so
// every summation runs in a fixed order. dim == 0 is permitted and
// denotes a constant (used for the linear part of one-dimensional
// antiderivatives).
class SparseTrigPoly {
 public:
  SparseTrigPoly() = default;
  explicit SparseTrigPoly(int dim);
  // Throws ContractError on duplicate frequencies or size mismatch.
  SparseTrigPoly(FrequencySet freqs, std::vector<Complex> coeffs);
  static SparseTrigPoly from_terms(int dim, const std::vector<std::pair<Frequency, Complex>>& terms);

  int dim() const noexcept { return freqs_.dim(); }
  std::size_t size() const noexcept { return coeffs_.size(); }
  bool empty() const noexcept { return coeffs_.empty(); }
  const FrequencySet& frequencies() const noexcept { return freqs_; }
  const std::vector<Complex>& coefficients() const noexcept { return coeffs_; }
  Complex coefficient(std::span<const int> k) const;

  Complex evaluate(std::span<const double> x) const;
  // Elementwise equal to evaluate(); points are split across workers
  // (0 = hardware concurrency), each point summed in the same order.
  std::vector<Complex> evaluate_batch(const std::vector<std::vector<double>>& xs,
                                      unsigned workers = 0) const;

  AntiderivativeRep antiderivative_first_var() const;

  // Polynomial in the leading dim - tail.size() variables with the
  // trailing ones fixed to tail.
  SparseTrigPoly fix_trailing(std::span<const double> tail) const;

  // Component j: max |k_j| over terms with |c_k| >= coeff_floor.
  std::vector<int> directional_expansion(double coeff_floor) const;

  // Largest |c_k|, 0 for the empty polynomial.
  double max_magnitude() const noexcept;

  friend SparseTrigPoly operator+(const SparseTrigPoly& p, const SparseTrigPoly& q);
  friend SparseTrigPoly operator*(Complex a, const SparseTrigPoly& p);

 private:
  FrequencySet freqs_;
  std::vector<Complex> coeffs_;
};

// Antiderivative in the first variable of a SparseTrigPoly b over (x, y):
//   sum_{k != 0} o_{(k,l)} (e^{2 pi i k x} - 1) e^{2 pi i l.y}
//     + x sum_l lin_l e^{2 pi i l.y}
// with o_{(k,l)} = b_{(k,l)} / (2 pi i k) and lin_l = b_{(0,l)}. The
// integration constant is chosen so the value vanishes at x = 0. The
// linear part is not a trigonometric polynomial in x, hence its own type.
class AntiderivativeRep {
 public:
  AntiderivativeRep() = default;
  AntiderivativeRep(SparseTrigPoly oscillatory, SparseTrigPoly linear);

  int dim() const noexcept { return oscillatory_.dim(); }
  const SparseTrigPoly& oscillatory() const noexcept { return oscillatory_; }
  const SparseTrigPoly& linear() const noexcept { return linear_; }
  std::size_t size() const noexcept { return oscillatory_.size() + linear_.size(); }

  Complex evaluate(double x, std::span<const double> y) const;
  // y -> evaluate(x, y) as a polynomial in y.
  SparseTrigPoly at_first(double x) const;
  // Exact inverse of SparseTrigPoly::antiderivative_first_var.
  SparseTrigPoly derivative_first_var() const;

 private:
  SparseTrigPoly oscillatory_;
  SparseTrigPoly linear_;
};

// Precompiled evaluator for large sparse sums of the form
//   sum_g Y_g(y) [ sum_k c_{g,k} E(k x) + x lin_g ]
// where E(kx) is e^{2 pi i k x} (plain form) or e^{2 pi i k x} - 1
// (antiderivative form). Terms sharing the trailing frequency l are grouped
// and the per-coordinate exponentials are tabulated once per point, so the
// cost per point is O(sum of table widths + terms).
class FastEvaluator {
 public:
  FastEvaluator() = default;
  explicit FastEvaluator(const SparseTrigPoly& p);
  explicit FastEvaluator(const AntiderivativeRep& u);

  int dim() const noexcept { return dim_; }
  bool empty() const noexcept { return groups_.empty(); }
  // x is the full point (first coordinate included). Reentrant.
  Complex operator()(std::span<const double> x) const;

 private:
  struct Group {
    std::size_t nz_begin, nz_end;  // into nz_dim_/nz_freq_
    std::size_t k_begin, k_end;    // into k_freq_/k_coeff_
    Complex linear;
  };
  void build(const SparseTrigPoly& plain, const SparseTrigPoly* linear, bool antiderivative);

  int dim_ = 0;
  bool antiderivative_form_ = false;
  int first_width_ = 0;
  std::vector<int> widths_;  // max |l_j| per trailing coordinate j = 1..dim-1
  std::vector<Group> groups_;
  std::vector<int> nz_dim_, nz_freq_;
  std::vector<int> k_freq_;
  std::vector<Complex> k_coeff_;
};

}  // namespace sfode
