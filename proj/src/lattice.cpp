#include "sfode/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "sfode/errors.hpp"
#include "sfode/fft.hpp"
#include "sfode/primes.hpp"
#include "sfode/rng.hpp"

namespace sfode {
namespace {

std::int64_t pos_mod(std::int64_t a, std::int64_t m) noexcept {
  const std::int64_t r = a % m;
  return r < 0 ? r + m : r;
}

// Residues of every member of freqs, in order.
std::vector<std::int64_t> residues(const Rank1Lattice& lat, const FrequencySet& freqs) {
  std::vector<std::int64_t> out(freqs.size());
  for (std::size_t i = 0; i < freqs.size(); ++i) out[i] = lat.residue(freqs[i]);
  return out;
}

bool all_distinct(std::vector<std::int64_t> values) {
  std::sort(values.begin(), values.end());
  return std::adjacent_find(values.begin(), values.end()) == values.end();
}

}  // namespace

Rank1Lattice::Rank1Lattice(std::vector<std::int64_t> z, std::int64_t M) : z_(std::move(z)), M_(M) {
  if (M_ < 1) throw ContractError("Rank1Lattice: size must be positive");
  for (auto& c : z_) c = pos_mod(c, M_);
}

std::int64_t Rank1Lattice::residue(std::span<const int> k) const noexcept {
  int128 acc = 0;
  for (std::size_t j = 0; j < z_.size(); ++j) acc += static_cast<int128>(k[j]) * z_[j];
  auto r = static_cast<std::int64_t>(acc % M_);
  return r < 0 ? r + M_ : r;
}

void Rank1Lattice::node(std::int64_t j, std::span<double> out) const noexcept {
  const double inv = 1.0 / static_cast<double>(M_);
  for (std::size_t t = 0; t < z_.size(); ++t) {
    const auto r = static_cast<std::int64_t>(static_cast<uint128>(j) * static_cast<std::uint64_t>(z_[t]) %
                                             static_cast<std::uint64_t>(M_));
    out[t] = static_cast<double>(r) * inv;
  }
}

std::ostream& operator<<(std::ostream& os, const Rank1Lattice& lat) {
  os << lat.size() << ';';
  for (auto c : lat.generator()) os << ' ' << c;
  return os;
}

std::vector<std::vector<double>> lattice_nodes(const Rank1Lattice& lat) {
  std::vector<std::vector<double>> nodes(static_cast<std::size_t>(lat.size()),
                                         std::vector<double>(static_cast<std::size_t>(lat.dim())));
  for (std::int64_t j = 0; j < lat.size(); ++j) lat.node(j, nodes[static_cast<std::size_t>(j)]);
  return nodes;
}

std::vector<Complex> lattice_evaluate(const SparseTrigPoly& poly, const Rank1Lattice& lat) {
  if (poly.dim() != lat.dim()) throw ContractError("lattice_evaluate: dimension mismatch");
  std::vector<Complex> buf(static_cast<std::size_t>(lat.size()));
  const auto& freqs = poly.frequencies();
  for (std::size_t i = 0; i < poly.size(); ++i)
    buf[static_cast<std::size_t>(lat.residue(freqs[i]))] += poly.coefficients()[i];
  dft_backward(buf);
  return buf;
}

bool is_reconstructing(const Rank1Lattice& lat, const FrequencySet& freqs) {
  if (freqs.dim() != lat.dim()) throw ContractError("is_reconstructing: dimension mismatch");
  if (freqs.size() > static_cast<std::size_t>(lat.size())) return false;
  return all_distinct(residues(lat, freqs));
}

Rank1Lattice cbc_reconstructing_lattice(const FrequencySet& freqs, const CbcOptions& options) {
  const int d = freqs.dim();
  const std::size_t n = freqs.size();
  if (n == 0) throw ContractError("cbc_reconstructing_lattice: empty frequency set");
  if (n == 1) return {std::vector<std::int64_t>(static_cast<std::size_t>(d), 0), 1};

  // Phase 1: greedy generating vector for a modulus large enough that a
  // collision-free choice exists for every component.
  const auto big = static_cast<std::int64_t>(next_prime(std::max<std::uint64_t>(
      static_cast<std::uint64_t>(n) * n, 2 * static_cast<std::uint64_t>(n))));
  std::vector<std::int64_t> z(static_cast<std::size_t>(d), 0);
  std::vector<std::int64_t> prefix(n, 0);  // residues of the first t components
  std::vector<std::int64_t> trial(n);
  for (int t = 0; t < d; ++t) {
    bool found = false;
    for (std::int64_t zt = 1; zt < big && !found; ++zt) {
      for (std::size_t i = 0; i < n; ++i)
        trial[i] = pos_mod(prefix[i] + static_cast<std::int64_t>(
                                           static_cast<int128>(freqs[i][t]) * zt % big), big);
      // Residues need only be distinct between distinct projections.
      std::vector<std::pair<std::int64_t, std::size_t>> tagged(n);
      for (std::size_t i = 0; i < n; ++i) tagged[i] = {trial[i], i};
      std::sort(tagged.begin(), tagged.end());
      bool ok = true;
      for (std::size_t i = 1; i < n && ok; ++i) {
        if (tagged[i].first != tagged[i - 1].first) continue;
        auto a = freqs[tagged[i].second].first(static_cast<std::size_t>(t) + 1);
        auto b = freqs[tagged[i - 1].second].first(static_cast<std::size_t>(t) + 1);
        ok = std::ranges::equal(a, b);
      }
      if (ok) {
        z[static_cast<std::size_t>(t)] = zt;
        prefix = trial;
        found = true;
      }
    }
    if (!found) throw ConstructionError("cbc_reconstructing_lattice: no generator component found");
  }

  // Phase 2: smallest prime size >= |I| that keeps the residues distinct.
  std::vector<std::int64_t> exact(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    int128 acc = 0;
    for (int t = 0; t < d; ++t) acc += static_cast<int128>(freqs[i][t]) * z[static_cast<std::size_t>(t)];
    exact[i] = static_cast<std::int64_t>(acc);
  }
  const std::int64_t limit = std::min(options.max_size, big - 1);
  std::vector<std::uint32_t> stamp;
  std::uint32_t epoch = 0;
  for (auto M = static_cast<std::int64_t>(next_prime(n)); M <= limit;
       M = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(M) + 1))) {
    if (stamp.size() < static_cast<std::size_t>(M)) stamp.assign(static_cast<std::size_t>(M), 0), epoch = 0;
    ++epoch;
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      auto& slot = stamp[static_cast<std::size_t>(pos_mod(exact[i], M))];
      if (slot == epoch) ok = false;
      slot = epoch;
    }
    if (ok) return {z, M};
  }
  if (big <= options.max_size) return {z, big};
  throw ConstructionError("cbc_reconstructing_lattice: no reconstructing lattice of size <= " +
                          std::to_string(options.max_size) + " for " + std::to_string(n) + " frequencies");
}

MultipleRank1Lattice build_multiple_lattices(const FrequencySet& freqs, double c, int b, std::uint64_t seed) {
  const std::size_t n = freqs.size();
  if (n == 0) throw ContractError("build_multiple_lattices: empty frequency set");
  if (c < 1.0) throw ContractError("build_multiple_lattices: c must be >= 1");
  if (b < 1) throw ContractError("build_multiple_lattices: b must be >= 1");
  const int d = freqs.dim();
  const auto lo = static_cast<std::int64_t>(std::ceil(c * static_cast<double>(n)));
  const auto hi = std::max(lo, static_cast<std::int64_t>(std::floor(2.0 * c * static_cast<double>(n))));
  const int max_lattices = static_cast<int>(std::ceil(2.0 * std::log(static_cast<double>(n)))) + 3;

  Rng rng(seed);
  std::vector<std::int64_t> res(n);
  std::vector<std::uint32_t> counts;
  for (int attempt = 0; attempt < b; ++attempt) {
    MultipleRank1Lattice out;
    out.restarts = attempt;
    out.assignment.assign(n, UINT32_MAX);
    std::size_t remaining = n;
    for (int l = 0; l < max_lattices && remaining > 0; ++l) {
      auto M = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(rng.integer(lo, hi))));
      if (M > hi) M = static_cast<std::int64_t>(next_prime(static_cast<std::uint64_t>(lo)));
      std::vector<std::int64_t> z(static_cast<std::size_t>(d));
      for (auto& zj : z) zj = rng.integer(0, M - 1);
      Rank1Lattice lat(std::move(z), M);
      counts.assign(static_cast<std::size_t>(M), 0);
      for (std::size_t i = 0; i < n; ++i) {
        res[i] = lat.residue(freqs[i]);
        ++counts[static_cast<std::size_t>(res[i])];
      }
      const auto index = static_cast<std::uint32_t>(out.lattices.size());
      bool used = false;
      for (std::size_t i = 0; i < n; ++i) {
        if (out.assignment[i] != UINT32_MAX || counts[static_cast<std::size_t>(res[i])] != 1) continue;
        out.assignment[i] = index;
        --remaining;
        used = true;
      }
      if (used) out.lattices.push_back(std::move(lat));
    }
    if (remaining == 0) return out;
  }
  throw ExhaustionError("build_multiple_lattices: no complete assignment for " + std::to_string(n) +
                        " frequencies after " + std::to_string(b) + " searches");
}

ReconstructionPlan ReconstructionPlan::single(FrequencySet targets, Rank1Lattice lat) {
  if (!targets.is_canonical()) throw ContractError("ReconstructionPlan: targets must be canonical");
  if (!is_reconstructing(lat, targets)) throw ContractError("ReconstructionPlan: lattice is not reconstructing");
  ReconstructionPlan plan;
  plan.scheme_ = Scheme::single;
  plan.assignment_.assign(targets.size(), 0);
  plan.targets_ = std::move(targets);
  plan.lattices_.push_back(std::move(lat));
  return plan;
}

ReconstructionPlan ReconstructionPlan::multiple(FrequencySet targets, MultipleRank1Lattice mlat) {
  if (!targets.is_canonical()) throw ContractError("ReconstructionPlan: targets must be canonical");
  if (mlat.assignment.size() != targets.size()) throw ContractError("ReconstructionPlan: assignment size mismatch");
  for (auto a : mlat.assignment)
    if (a >= mlat.lattices.size()) throw ContractError("ReconstructionPlan: frequency without lattice");
  ReconstructionPlan plan;
  plan.scheme_ = Scheme::multiple;
  plan.targets_ = std::move(targets);
  plan.lattices_ = std::move(mlat.lattices);
  plan.assignment_ = std::move(mlat.assignment);
  plan.restarts_ = mlat.restarts;
  return plan;
}

std::uint64_t ReconstructionPlan::sample_count() const noexcept {
  std::uint64_t total = 0;
  for (const auto& lat : lattices_) total += static_cast<std::uint64_t>(lat.size());
  return total;
}

SparseTrigPoly lattice_reconstruct(const ReconstructionPlan& plan, std::span<const std::vector<Complex>> samples,
                                   std::vector<AliasingBackground>* background) {
  const auto& lattices = plan.lattices();
  if (samples.size() != lattices.size())
    throw ContractError("lattice_reconstruct: expected " + std::to_string(lattices.size()) + " sample vectors, got " +
                        std::to_string(samples.size()));
  for (std::size_t l = 0; l < lattices.size(); ++l)
    if (samples[l].size() != static_cast<std::size_t>(lattices[l].size()))
      throw ContractError("lattice_reconstruct: sample vector " + std::to_string(l) + " has wrong length");

  const auto& targets = plan.targets();
  std::vector<Complex> coeffs(targets.size());
  if (background) background->clear();
  for (std::size_t l = 0; l < lattices.size(); ++l) {
    std::vector<Complex> buf = samples[l];
    dft_forward(buf);
    const double inv = 1.0 / static_cast<double>(lattices[l].size());
    for (std::size_t i = 0; i < targets.size(); ++i) {
      if (plan.assignment()[i] != l) continue;
      coeffs[i] = buf[static_cast<std::size_t>(lattices[l].residue(targets[i]))] * inv;
    }
    if (!background) continue;
    std::vector<char> occupied(buf.size(), 0);
    for (std::size_t i = 0; i < targets.size(); ++i)
      occupied[static_cast<std::size_t>(lattices[l].residue(targets[i]))] = 1;
    AliasingBackground bg;
    for (std::size_t r = 0; r < buf.size(); ++r)
      if (!occupied[r]) {
        bg.mean += buf[r] * inv;
        ++bg.residues;
      }
    if (bg.residues > 0) bg.mean /= static_cast<double>(bg.residues);
    for (std::size_t r = 0; r < buf.size(); ++r)
      if (!occupied[r]) bg.variance += std::norm(buf[r] * inv - bg.mean);
    if (bg.residues > 1) bg.variance /= static_cast<double>(bg.residues - 1);
    background->push_back(bg);
  }
  return {targets, std::move(coeffs)};
}

}  // namespace sfode
