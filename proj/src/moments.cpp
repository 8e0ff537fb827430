#include "sfode/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>

#include "sfode/errors.hpp"

namespace sfode {

Density Density::uniform(const std::vector<Interval>& box) {
  double volume = 1.0;
  for (const auto& b : box) {
    if (!(b.hi > b.lo)) throw ContractError("Density::uniform: empty interval");
    volume *= b.length();
  }
  Density d;
  d.uniform_value_ = 1.0 / volume;
  return d;
}

Density Density::custom(std::function<double(std::span<const double>)> rho) {
  if (!rho) throw ContractError("Density::custom: empty callable");
  Density d;
  d.rho_ = std::move(rho);
  return d;
}

double Density::operator()(std::span<const double> xi) const {
  return is_uniform() ? uniform_value_ : rho_(xi);
}

MomentRep::MomentRep(int order, SparseTrigPoly coeffs, PeriodizationMap map, std::uint64_t samples)
    : order_(order), coeffs_(std::move(coeffs)), map_(map), samples_(samples) {
  if (order_ < 1) throw ContractError("MomentRep: order must be >= 1");
  if (coeffs_.dim() != 1) throw ContractError("MomentRep: coefficients must be one-dimensional");
}

double MomentRep::evaluate(double t) const {
  if (!(t >= map_.alpha() && t <= map_.beta())) throw DomainError("evaluate_moment: t outside the interval");
  const double x = map_.inverse(t);
  return coeffs_.evaluate(std::span<const double>(&x, 1)).real();
}

namespace {

SparseTrigPoly reflect_first(const SparseTrigPoly& p) {
  FrequencySet set(p.dim());
  set.reserve(p.size());
  std::vector<int> k(static_cast<std::size_t>(p.dim()));
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto f = p.frequencies()[i];
    std::copy(f.begin(), f.end(), k.begin());
    k[0] = -k[0];
    set.push_back(k);
  }
  return {std::move(set), p.coefficients()};
}

// sum_k p_(k,l) e^{2 pi i l.y}, i.e. p at x = 0 as a polynomial in y.
SparseTrigPoly collapse_first(const SparseTrigPoly& p) {
  std::map<Frequency, Complex> terms;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const auto k = p.frequencies()[i];
    terms[Frequency(k.begin() + 1, k.end())] += p.coefficients()[i];
  }
  return SparseTrigPoly::from_terms(p.dim() - 1, {terms.begin(), terms.end()});
}

// u(x, y) = x lin(y) + osc(x, y) - osc(0, y) with osc(1 - x, y) = reflected(x, y).
struct LatticeParts {
  SparseTrigPoly osc, reflected, at_zero, lin;

  explicit LatticeParts(const AntiderivativeRep& u)
      : osc(u.oscillatory()), reflected(reflect_first(u.oscillatory())), at_zero(collapse_first(u.oscillatory())),
        lin(u.linear()) {}
};

std::vector<Complex> on_tail(const SparseTrigPoly& q, std::span<const double> anchor, const Rank1Lattice& tail) {
  const auto r = q.fix_trailing(anchor);
  if (r.dim() == 0) return std::vector<Complex>(static_cast<std::size_t>(tail.size()), r.empty() ? Complex{} : r.coefficients()[0]);
  return lattice_evaluate(r, tail);
}

struct LatticeValues {
  std::vector<Complex> osc, reflected, at_zero, lin;

  LatticeValues(const LatticeParts& p, const Rank1Lattice& lat, const Rank1Lattice& tail, std::span<const double> anchor)
      : osc(lattice_evaluate(p.osc.fix_trailing(anchor), lat)),
        reflected(lattice_evaluate(p.reflected.fix_trailing(anchor), lat)),
        at_zero(on_tail(p.at_zero, anchor, tail)),
        lin(on_tail(p.lin, anchor, tail)) {}

  Complex at(std::size_t j, double x) const {
    return x <= 0.5 ? x * lin[j] + osc[j] - at_zero[j] : (1.0 - x) * lin[j] + reflected[j] - at_zero[j];
  }
};

Complex power(Complex u, int n) {
  Complex un = u;
  for (int i = 1; i < n; ++i) un *= u;
  return un;
}

}  // namespace

BlackBoxFn moment_integrand(const SolutionRep& rep, int n, const Density& density, const PeriodizationMap* spatial) {
  if (n < 1) throw ContractError("moment: order must be >= 1");
  const int d = rep.d_xi();
  const auto& maps = rep.maps();
  const PeriodizationMap phi_t = spatial != nullptr ? *spatial : maps.spatial;
  if (phi_t.alpha() != maps.spatial.alpha() || phi_t.beta() != maps.spatial.beta())
    throw ContractError("moment: spatial map must cover the solution's interval");
  const bool same = phi_t.kind() == maps.spatial.kind();
  // u vanishes at both ends, so under the tent map an odd power is continued
  // oddly about x = 1/2; this removes the kinks of the even continuation.
  const double flip = phi_t.kind() == PeriodizationKind::tent && n % 2 == 1 ? -1.0 : 1.0;
  auto weight = [&maps, &density](std::span<const double> y) {
    thread_local std::vector<double> xi;
    xi.resize(y.size());
    maps.random.forward(y, xi);
    return density(xi) * maps.random.abs_jacobian(y);
  };
  BlackBoxFn fn;
  fn.dim = 1 + d;
  fn.thread_safe = true;
  fn.eval = [&rep, &maps, weight, phi_t, same, n, flip](std::span<const double> p) {
    const auto y = p.subspan(1);
    const double x = PeriodizationMap::fold(p[0]);
    const double sign = p[0] > 0.5 ? flip : 1.0;
    return sign * power(rep.at_folded(same ? x : maps.spatial.inverse(phi_t.forward(x)), y), n) * weight(y);
  };
  if (!same) return fn;

  auto u1 = std::make_shared<const LatticeParts>(rep.u1());
  auto u2 = std::make_shared<const LatticeParts>(rep.u2());
  fn.on_lattice = [&rep, weight, u1, u2, n, d, flip](const Rank1Lattice& lat, std::span<const double> anchor,
                                                std::vector<Complex>& out) {
    const auto& z = lat.generator();
    const std::int64_t M = lat.size();
    const Rank1Lattice tail(std::vector<std::int64_t>(z.begin() + 1, z.end()), M);
    const LatticeValues v1(*u1, lat, tail, anchor), v2(*u2, lat, tail, anchor);
    const auto c1 = on_tail(rep.c1(), anchor, tail);
    const int t = lat.dim();
    std::vector<double> y(static_cast<std::size_t>(d));
    std::copy(anchor.begin(), anchor.end(), y.begin() + (t - 1));
    std::vector<std::int64_t> acc(static_cast<std::size_t>(t), 0);
    const double inv = 1.0 / static_cast<double>(M);
    out.resize(static_cast<std::size_t>(M));
    for (std::int64_t j = 0; j < M; ++j) {
      const double x = static_cast<double>(acc[0]) * inv;
      for (int c = 1; c < t; ++c) y[c - 1] = static_cast<double>(acc[c]) * inv;
      for (int c = 0; c < t; ++c) {
        acc[c] += z[c];
        if (acc[c] >= M) acc[c] -= M;
      }
      const auto i = static_cast<std::size_t>(j);
      const double sign = x > 0.5 ? flip : 1.0;
      out[i] = sign * power(v1.at(i, x) + c1[i] * v2.at(i, x), n) * weight(y);
    }
  };
  return fn;
}

MomentRep moment(const SolutionRep& rep, int n, const Density& density, const SfftConfig& cfg,
                 const PeriodizationMap* spatial) {
  const int d = rep.d_xi();
  auto res = sfft(moment_integrand(rep, n, density, spatial), cfg);
  const PeriodizationMap phi_t = spatial != nullptr ? *spatial : rep.maps().spatial;

  const double scale = std::ldexp(1.0, -d);
  std::vector<std::pair<Frequency, Complex>> terms;
  const auto& freqs = res.poly.frequencies();
  for (std::size_t i = 0; i < res.poly.size(); ++i) {
    const auto k = freqs[i];
    bool zero_tail = true;
    for (int j = 1; j <= d; ++j) zero_tail = zero_tail && k[j] == 0;
    if (zero_tail) terms.push_back({Frequency{k[0]}, res.poly.coefficients()[i] * scale});
  }
  return {n, SparseTrigPoly::from_terms(1, terms), phi_t, res.samples};
}

}  // namespace sfode
