#include "sfode/trig_poly.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "sfode/errors.hpp"

namespace sfode {

bool frequency_less(std::span<const int> a, std::span<const int> b) noexcept {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

// ---------------------------------------------------------------------------
// FrequencySet

FrequencySet::FrequencySet(int dim) : dim_(dim) {
  if (dim < 0) throw ContractError("FrequencySet: negative dimension");
}

FrequencySet::FrequencySet(int dim, std::vector<int> flat) : dim_(dim), data_(std::move(flat)) {
  if (dim < 0) throw ContractError("FrequencySet: negative dimension");
  if (dim == 0 && !data_.empty()) throw ContractError("FrequencySet: data for dim 0");
  if (dim > 0 && data_.size() % static_cast<std::size_t>(dim) != 0)
    throw ContractError("FrequencySet: flat data length is not a multiple of dim");
}

FrequencySet FrequencySet::from_list(int dim, const std::vector<Frequency>& list) {
  FrequencySet set(dim);
  set.reserve(list.size());
  for (const auto& k : list) set.push_back(k);
  return set;
}

void FrequencySet::push_back(std::span<const int> k) {
  if (static_cast<int>(k.size()) != dim_)
    throw ContractError("FrequencySet: frequency of length " + std::to_string(k.size()) +
                        " in a set of dimension " + std::to_string(dim_));
  if (dim_ == 0) {
    ++count0_;
    return;
  }
  data_.insert(data_.end(), k.begin(), k.end());
}

std::vector<std::size_t> FrequencySet::canonicalize() {
  const std::size_t n = size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (dim_ == 0) {
    if (n > 1) count0_ = 1;
    order.resize(std::min<std::size_t>(n, 1));
    return order;
  }
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return frequency_less((*this)[a], (*this)[b]);
  });
  std::vector<int> sorted;
  sorted.reserve(data_.size());
  std::vector<std::size_t> kept;
  kept.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    auto k = (*this)[order[i]];
    if (!kept.empty() && std::equal(k.begin(), k.end(), (*this)[kept.back()].begin())) continue;
    kept.push_back(order[i]);
    sorted.insert(sorted.end(), k.begin(), k.end());
  }
  data_ = std::move(sorted);
  return kept;
}

bool FrequencySet::is_canonical() const {
  for (std::size_t i = 1; i < size(); ++i)
    if (!frequency_less((*this)[i - 1], (*this)[i])) return false;
  return dim_ != 0 || count0_ <= 1;
}

std::optional<std::size_t> FrequencySet::find(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim_) return std::nullopt;
  if (dim_ == 0) return count0_ > 0 ? std::optional<std::size_t>(0) : std::nullopt;
  std::size_t lo = 0, hi = size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (frequency_less((*this)[mid], k))
      lo = mid + 1;
    else
      hi = mid;
  }
  if (lo < size() && std::ranges::equal((*this)[lo], k)) return lo;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// SparseTrigPoly

SparseTrigPoly::SparseTrigPoly(int dim) : freqs_(dim) {}

SparseTrigPoly::SparseTrigPoly(FrequencySet freqs, std::vector<Complex> coeffs)
    : freqs_(std::move(freqs)) {
  if (freqs_.size() != coeffs.size())
    throw ContractError("SparseTrigPoly: " + std::to_string(freqs_.size()) + " frequencies but " +
                        std::to_string(coeffs.size()) + " coefficients");
  const std::size_t n = freqs_.size();
  auto perm = freqs_.canonicalize();
  if (perm.size() != n) throw ContractError("SparseTrigPoly: duplicate frequency");
  coeffs_.resize(n);
  for (std::size_t i = 0; i < n; ++i) coeffs_[i] = coeffs[perm[i]];
}

SparseTrigPoly SparseTrigPoly::from_terms(int dim,
                                          const std::vector<std::pair<Frequency, Complex>>& terms) {
  FrequencySet set(dim);
  std::vector<Complex> coeffs;
  set.reserve(terms.size());
  coeffs.reserve(terms.size());
  for (const auto& [k, c] : terms) {
    set.push_back(k);
    coeffs.push_back(c);
  }
  return {std::move(set), std::move(coeffs)};
}

Complex SparseTrigPoly::coefficient(std::span<const int> k) const {
  if (static_cast<int>(k.size()) != dim()) throw ContractError("coefficient: dimension mismatch");
  auto idx = freqs_.find(k);
  return idx ? coeffs_[*idx] : Complex{};
}

Complex SparseTrigPoly::evaluate(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim())
    throw ContractError("evaluate: point of dimension " + std::to_string(x.size()) +
                        " for a polynomial of dimension " + std::to_string(dim()));
  Complex sum{};
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    auto k = freqs_[i];
    double t = 0.0;
    for (int j = 0; j < dim(); ++j) t += k[j] * x[j];
    sum += coeffs_[i] * unit_phase(t - std::floor(t));
  }
  return sum;
}

std::vector<Complex> SparseTrigPoly::evaluate_batch(const std::vector<std::vector<double>>& xs,
                                                    unsigned workers) const {
  for (const auto& x : xs)
    if (static_cast<int>(x.size()) != dim()) throw ContractError("evaluate_batch: dimension mismatch");
  std::vector<Complex> out(xs.size());
  if (workers == 0) workers = std::max(1U, std::thread::hardware_concurrency());
  const std::size_t n = xs.size();
  if (workers == 1 || n < 256) {
    for (std::size_t i = 0; i < n; ++i) out[i] = evaluate(xs[i]);
    return out;
  }
  std::vector<std::jthread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t begin = 0; begin < n; begin += chunk) {
    const std::size_t end = std::min(n, begin + chunk);
    pool.emplace_back([&, begin, end] {
      for (std::size_t i = begin; i < end; ++i) out[i] = evaluate(xs[i]);
    });
  }
  return out;
}

AntiderivativeRep SparseTrigPoly::antiderivative_first_var() const {
  if (dim() < 1) throw ContractError("antiderivative_first_var: dimension must be at least 1");
  FrequencySet osc(dim()), lin(dim() - 1);
  std::vector<Complex> osc_c, lin_c;
  for (std::size_t i = 0; i < size(); ++i) {
    auto k = freqs_[i];
    if (k[0] != 0) {
      osc.push_back(k);
      // c / (2 pi i k)
      const double scale = kTwoPi * k[0];
      osc_c.emplace_back(coeffs_[i].imag() / scale, -coeffs_[i].real() / scale);
    } else {
      lin.push_back(k.subspan(1));
      lin_c.push_back(coeffs_[i]);
    }
  }
  return {SparseTrigPoly(std::move(osc), std::move(osc_c)),
          SparseTrigPoly(std::move(lin), std::move(lin_c))};
}

SparseTrigPoly SparseTrigPoly::fix_trailing(std::span<const double> tail) const {
  const int m = static_cast<int>(tail.size());
  if (m > dim()) throw ContractError("fix_trailing: more values than variables");
  if (m == 0) return *this;
  const auto lead = static_cast<std::size_t>(dim() - m);
  FrequencySet set(static_cast<int>(lead));
  std::vector<Complex> coeffs;
  // Terms are sorted, so equal leading parts are adjacent.
  for (std::size_t i = 0; i < size(); ++i) {
    const auto k = freqs_[i];
    double t = 0.0;
    for (int j = 0; j < m; ++j) t += k[lead + j] * tail[j];
    const Complex c = coeffs_[i] * unit_phase(t - std::floor(t));
    const auto head = k.first(lead);
    if (!coeffs.empty() && std::ranges::equal(head, set[set.size() - 1])) {
      coeffs.back() += c;
    } else {
      set.push_back(head);
      coeffs.push_back(c);
    }
  }
  return {std::move(set), std::move(coeffs)};
}

std::vector<int> SparseTrigPoly::directional_expansion(double coeff_floor) const {
  if (coeff_floor < 0.0) throw ContractError("directional_expansion: negative floor");
  std::vector<int> out(static_cast<std::size_t>(dim()), 0);
  for (std::size_t i = 0; i < size(); ++i) {
    if (std::abs(coeffs_[i]) < coeff_floor) continue;
    auto k = freqs_[i];
    for (int j = 0; j < dim(); ++j) out[j] = std::max(out[j], std::abs(k[j]));
  }
  return out;
}

double SparseTrigPoly::max_magnitude() const noexcept {
  double m = 0.0;
  for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
  return m;
}

SparseTrigPoly operator+(const SparseTrigPoly& p, const SparseTrigPoly& q) {
  if (p.dim() != q.dim()) throw ContractError("operator+: dimension mismatch");
  FrequencySet set(p.dim());
  std::vector<Complex> coeffs;
  std::size_t i = 0, j = 0;
  while (i < p.size() || j < q.size()) {
    if (j == q.size() || (i < p.size() && frequency_less(p.freqs_[i], q.freqs_[j]))) {
      set.push_back(p.freqs_[i]);
      coeffs.push_back(p.coeffs_[i++]);
    } else if (i == p.size() || frequency_less(q.freqs_[j], p.freqs_[i])) {
      set.push_back(q.freqs_[j]);
      coeffs.push_back(q.coeffs_[j++]);
    } else {
      set.push_back(p.freqs_[i]);
      coeffs.push_back(p.coeffs_[i++] + q.coeffs_[j++]);
    }
  }
  return {std::move(set), std::move(coeffs)};
}

SparseTrigPoly operator*(Complex a, const SparseTrigPoly& p) {
  SparseTrigPoly out = p;
  for (auto& c : out.coeffs_) c *= a;
  return out;
}

// ---------------------------------------------------------------------------
// AntiderivativeRep

AntiderivativeRep::AntiderivativeRep(SparseTrigPoly oscillatory, SparseTrigPoly linear)
    : oscillatory_(std::move(oscillatory)), linear_(std::move(linear)) {
  if (oscillatory_.dim() < 1 || linear_.dim() != oscillatory_.dim() - 1)
    throw ContractError("AntiderivativeRep: linear part must have one dimension less");
  for (std::size_t i = 0; i < oscillatory_.size(); ++i)
    if (oscillatory_.frequencies()[i][0] == 0)
      throw ContractError("AntiderivativeRep: oscillatory term with zero first frequency");
}

SparseTrigPoly AntiderivativeRep::at_first(double x) const {
  std::map<Frequency, Complex> terms;
  const auto& freqs = oscillatory_.frequencies();
  for (std::size_t i = 0; i < oscillatory_.size(); ++i) {
    const auto k = freqs[i];
    const double kx = k[0] * x;
    terms[Frequency(k.begin() + 1, k.end())] += oscillatory_.coefficients()[i] * (unit_phase(kx - std::floor(kx)) - 1.0);
  }
  for (std::size_t i = 0; i < linear_.size(); ++i) {
    const auto l = linear_.frequencies()[i];
    terms[Frequency(l.begin(), l.end())] += x * linear_.coefficients()[i];
  }
  return SparseTrigPoly::from_terms(linear_.dim(), {terms.begin(), terms.end()});
}

Complex AntiderivativeRep::evaluate(double x, std::span<const double> y) const {
  if (static_cast<int>(y.size()) != linear_.dim())
    throw ContractError("AntiderivativeRep::evaluate: dimension mismatch");
  const auto& freqs = oscillatory_.frequencies();
  const auto& coeffs = oscillatory_.coefficients();
  Complex sum{};
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    auto k = freqs[i];
    double t = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) t += k[j + 1] * y[j];
    const double kx = k[0] * x;
    sum += coeffs[i] * (unit_phase(kx - std::floor(kx)) - 1.0) * unit_phase(t - std::floor(t));
  }
  return sum + x * linear_.evaluate(y);
}

SparseTrigPoly AntiderivativeRep::derivative_first_var() const {
  FrequencySet set(dim());
  std::vector<Complex> coeffs;
  const auto& of = oscillatory_.frequencies();
  for (std::size_t i = 0; i < oscillatory_.size(); ++i) {
    set.push_back(of[i]);
    const double scale = kTwoPi * of[i][0];
    const Complex c = oscillatory_.coefficients()[i];
    coeffs.emplace_back(-c.imag() * scale, c.real() * scale);
  }
  std::vector<int> k(static_cast<std::size_t>(dim()), 0);
  for (std::size_t i = 0; i < linear_.size(); ++i) {
    auto l = linear_.frequencies()[i];
    std::copy(l.begin(), l.end(), k.begin() + 1);
    set.push_back(k);
    coeffs.push_back(linear_.coefficients()[i]);
  }
  return {std::move(set), std::move(coeffs)};
}

// ---------------------------------------------------------------------------
// FastEvaluator

FastEvaluator::FastEvaluator(const SparseTrigPoly& p) { build(p, nullptr, false); }

FastEvaluator::FastEvaluator(const AntiderivativeRep& u) {
  build(u.oscillatory(), &u.linear(), true);
}

void FastEvaluator::build(const SparseTrigPoly& plain, const SparseTrigPoly* linear,
                          bool antiderivative) {
  dim_ = plain.dim();
  antiderivative_form_ = antiderivative;
  const int trailing = std::max(0, dim_ - 1);
  widths_.assign(static_cast<std::size_t>(trailing), 0);
  first_width_ = 0;

  struct Builder {
    std::vector<std::pair<int, Complex>> k_terms;
    Complex linear{};
  };
  std::map<std::vector<int>, Builder> groups;
  const auto& freqs = plain.frequencies();
  for (std::size_t i = 0; i < plain.size(); ++i) {
    auto k = freqs[i];
    const int k0 = dim_ > 0 ? k[0] : 0;
    std::vector<int> l(k.begin() + (dim_ > 0 ? 1 : 0), k.end());
    first_width_ = std::max(first_width_, std::abs(k0));
    groups[l].k_terms.emplace_back(k0, plain.coefficients()[i]);
  }
  if (linear != nullptr) {
    for (std::size_t i = 0; i < linear->size(); ++i) {
      auto l = linear->frequencies()[i];
      groups[std::vector<int>(l.begin(), l.end())].linear += linear->coefficients()[i];
    }
  }
  groups_.clear();
  nz_dim_.clear();
  nz_freq_.clear();
  k_freq_.clear();
  k_coeff_.clear();
  for (const auto& [l, b] : groups) {
    Group g{};
    g.nz_begin = nz_dim_.size();
    for (int j = 0; j < trailing; ++j) {
      if (l[j] == 0) continue;
      nz_dim_.push_back(j);
      nz_freq_.push_back(l[j]);
      widths_[j] = std::max(widths_[j], std::abs(l[j]));
    }
    g.nz_end = nz_dim_.size();
    g.k_begin = k_freq_.size();
    for (const auto& [k0, c] : b.k_terms) {
      k_freq_.push_back(k0);
      k_coeff_.push_back(c);
    }
    g.k_end = k_freq_.size();
    g.linear = b.linear;
    groups_.push_back(g);
  }
}

namespace {

// Fills table[center + m] = e^{2 pi i m t} for |m| <= width.
void fill_powers(Complex* table, int width, double t) {
  Complex* center = table + width;
  center[0] = 1.0;
  if (width == 0) return;
  const Complex w = unit_phase(t);
  Complex acc = 1.0;
  for (int m = 1; m <= width; ++m) {
    // Re-anchor periodically to bound the round-off of repeated products.
    acc = (m % 32 == 0) ? unit_phase(m * t - std::floor(m * t)) : acc * w;
    center[m] = acc;
    center[-m] = std::conj(acc);
  }
}

}  // namespace

Complex FastEvaluator::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != dim_) throw ContractError("FastEvaluator: dimension mismatch");
  thread_local std::vector<Complex> scratch;
  thread_local std::vector<std::size_t> offsets;
  const std::size_t trailing = widths_.size();
  std::size_t total = 2 * static_cast<std::size_t>(first_width_) + 1;
  offsets.resize(trailing);
  for (std::size_t j = 0; j < trailing; ++j) {
    offsets[j] = total + static_cast<std::size_t>(widths_[j]);
    total += 2 * static_cast<std::size_t>(widths_[j]) + 1;
  }
  scratch.resize(total);
  const double x0 = dim_ > 0 ? x[0] : 0.0;
  fill_powers(scratch.data(), first_width_, x0);
  for (std::size_t j = 0; j < trailing; ++j)
    if (widths_[j] > 0) fill_powers(scratch.data() + offsets[j] - widths_[j], widths_[j], x[j + 1]);

  const Complex* e0 = scratch.data() + first_width_;
  Complex sum{};
  for (const auto& g : groups_) {
    Complex yf = 1.0;
    for (std::size_t n = g.nz_begin; n < g.nz_end; ++n)
      yf *= scratch[offsets[static_cast<std::size_t>(nz_dim_[n])] + nz_freq_[n]];
    Complex xf = g.linear * x0;
    if (antiderivative_form_) {
      for (std::size_t n = g.k_begin; n < g.k_end; ++n) xf += k_coeff_[n] * (e0[k_freq_[n]] - 1.0);
    } else {
      for (std::size_t n = g.k_begin; n < g.k_end; ++n) xf += k_coeff_[n] * e0[k_freq_[n]];
    }
    sum += yf * xf;
  }
  return sum;
}

}  // namespace sfode
