#pragma once

#include <set>
#include <vector>

#include "sfode/lattice.hpp"
#include "sfode/rng.hpp"
#include "sfode/sfft.hpp"
#include "sfode/trig_poly.hpp"

namespace sfode::testing {

inline Complex random_coefficient(Rng& rng, double lo = 1.0, double hi = 10.0) {
  const double mag = rng.uniform(lo, hi);
  return mag * unit_phase(rng.uniform01());
}

// Random frequency set of the given size inside [-N, N]^d.
inline FrequencySet random_support(Rng& rng, int d, int N, std::size_t size) {
  std::set<std::vector<int>> picked;
  while (picked.size() < size) {
    std::vector<int> k(static_cast<std::size_t>(d));
    for (auto& c : k) c = static_cast<int>(rng.integer(-N, N));
    picked.insert(k);
  }
  FrequencySet set(d);
  for (const auto& k : picked) set.push_back(k);
  return set;
}

inline SparseTrigPoly random_poly(Rng& rng, int d, int N, std::size_t size, double lo = 1.0, double hi = 10.0) {
  auto set = random_support(rng, d, N, size);
  std::vector<Complex> coeffs(set.size());
  for (auto& c : coeffs) c = random_coefficient(rng, lo, hi);
  return {std::move(set), std::move(coeffs)};
}

inline std::vector<double> random_point(Rng& rng, int d) {
  std::vector<double> x(static_cast<std::size_t>(d));
  for (auto& v : x) v = rng.uniform01();
  return x;
}

// Term-by-term sum with std::exp, independent of the library's evaluators.
inline Complex naive_evaluate(const SparseTrigPoly& p, const std::vector<double>& x) {
  Complex sum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    double phase = 0.0;
    const auto k = p.frequencies()[i];
    for (std::size_t j = 0; j < x.size(); ++j) phase += k[j] * x[j];
    sum += p.coefficients()[i] * std::exp(Complex(0.0, kTwoPi * phase));
  }
  return sum;
}

inline double max_coefficient_error(const SparseTrigPoly& a, const SparseTrigPoly& b) {
  double err = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i)
    err = std::max(err, std::abs(a.coefficients()[i] - b.coefficient(a.frequencies()[i])));
  for (std::size_t i = 0; i < b.size(); ++i)
    err = std::max(err, std::abs(b.coefficients()[i] - a.coefficient(b.frequencies()[i])));
  return err;
}

// Largest difference between f.on_lattice and pointwise evaluation of the
// restriction to the first t coordinates, on a random lattice and anchor.
inline double lattice_path_mismatch(const BlackBoxFn& f, Rng& rng, int t) {
  const std::int64_t M = 211;
  std::vector<std::int64_t> z(static_cast<std::size_t>(t));
  for (auto& c : z) c = rng.integer(1, M - 1);
  const Rank1Lattice lat(z, M);
  const auto anchor = random_point(rng, f.dim - t);
  std::vector<Complex> batch;
  f.on_lattice(lat, anchor, batch);
  const auto g = f.restricted(t, anchor);
  const auto nodes = lattice_nodes(lat);
  double err = batch.size() == nodes.size() ? 0.0 : 1e300;
  for (std::size_t j = 0; j < nodes.size() && j < batch.size(); ++j) err = std::max(err, std::abs(batch[j] - g(nodes[j])));
  return err;
}

}  // namespace sfode::testing
