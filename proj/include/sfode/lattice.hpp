#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "sfode/trig_poly.hpp"

namespace sfode {

// Rank-1 lattice {(j/M) z mod 1 : j = 0..M-1}.
class Rank1Lattice {
 public:
  Rank1Lattice() = default;
  // Components of z are reduced into [0, M).
  Rank1Lattice(std::vector<std::int64_t> z, std::int64_t M);

  int dim() const noexcept { return static_cast<int>(z_.size()); }
  std::int64_t size() const noexcept { return M_; }
  const std::vector<std::int64_t>& generator() const noexcept { return z_; }

  // k.z mod M in [0, M).
  std::int64_t residue(std::span<const int> k) const noexcept;
  // Node j written into out (length dim).
  void node(std::int64_t j, std::span<double> out) const noexcept;

  friend bool operator==(const Rank1Lattice&, const Rank1Lattice&) = default;

 private:
  std::vector<std::int64_t> z_;
  std::int64_t M_ = 1;
};

// "M; z_1 ... z_d"
std::ostream& operator<<(std::ostream& os, const Rank1Lattice& lat);

std::vector<std::vector<double>> lattice_nodes(const Rank1Lattice& lat);

// Values of poly at every lattice node, by folding frequencies onto their
// residues and one length-M inverse DFT.
std::vector<Complex> lattice_evaluate(const SparseTrigPoly& poly, const Rank1Lattice& lat);

// True iff k -> k.z mod M is injective on freqs.
bool is_reconstructing(const Rank1Lattice& lat, const FrequencySet& freqs);

struct CbcOptions {
  std::int64_t max_size = std::int64_t{1} << 26;
};

// Component-by-component search for a reconstructing lattice. The
// generating vector is built greedily for a large prime modulus, then the
// smallest prime lattice size >= |I| keeping the residues distinct is
// selected. Deterministic in I. Throws ConstructionError when no size
// below options.max_size works.
Rank1Lattice cbc_reconstructing_lattice(const FrequencySet& freqs, const CbcOptions& options = {});

// Union of rank-1 lattices; assignment[i] names the lattice reconstructing
// the i-th frequency of the (canonical) target set.
struct MultipleRank1Lattice {
  std::vector<Rank1Lattice> lattices;
  std::vector<std::uint32_t> assignment;
  // Number of draws that were abandoned before success.
  int restarts = 0;
};

// Randomized multiple rank-1 lattice. Lattice sizes are primes drawn from
// [c|I|, 2c|I|], generators uniform. A frequency is assigned to the first
// lattice on which its residue differs from those of all other members of
// I. One attempt allows a bounded number of lattices; at most b attempts.
// Throws ExhaustionError when every attempt fails.
MultipleRank1Lattice build_multiple_lattices(const FrequencySet& freqs, double c, int b,
                                             std::uint64_t seed);

// Sampling and reconstruction scheme for a target frequency set. The
// Fourier matrix is never formed; products with it and its pseudo inverse
// go through length-M DFTs.
class ReconstructionPlan {
 public:
  enum class Scheme { single, multiple };

  static ReconstructionPlan single(FrequencySet targets, Rank1Lattice lat);
  static ReconstructionPlan multiple(FrequencySet targets, MultipleRank1Lattice mlat);

  Scheme scheme() const noexcept { return scheme_; }
  const FrequencySet& targets() const noexcept { return targets_; }
  const std::vector<Rank1Lattice>& lattices() const noexcept { return lattices_; }
  const std::vector<std::uint32_t>& assignment() const noexcept { return assignment_; }
  // Sum of the lattice sizes; shared origin nodes are counted per lattice.
  std::uint64_t sample_count() const noexcept;
  int restarts() const noexcept { return restarts_; }

 private:
  Scheme scheme_ = Scheme::single;
  FrequencySet targets_;
  std::vector<Rank1Lattice> lattices_;
  std::vector<std::uint32_t> assignment_;
  int restarts_ = 0;
};

// Mean and variance of the scaled DFT values at the residues of one lattice
// that no target occupies. Those values are pure aliasing.
struct AliasingBackground {
  Complex mean;
  double variance = 0.0;
  std::size_t residues = 0;
};

// samples[i] holds the values on lattices()[i], in node order. Throws
// ContractError on shape mismatch. When background is given it receives one
// entry per lattice.
SparseTrigPoly lattice_reconstruct(const ReconstructionPlan& plan,
                                   std::span<const std::vector<Complex>> samples,
                                   std::vector<AliasingBackground>* background = nullptr);

}  // namespace sfode
