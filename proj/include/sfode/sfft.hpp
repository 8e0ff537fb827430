#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "sfode/lattice.hpp"
#include "sfode/trig_poly.hpp"

namespace sfode {

enum class SamplingBackend { single_lattice, multiple_lattice };

std::string_view to_string(SamplingBackend backend) noexcept;
// "r1l" / "mr1l"
SamplingBackend parse_backend(std::string_view name);

enum class ThresholdMode {
  per_iteration,  // relative to the maximum of each detection iteration
  post_union,     // relative to the maximum over all iterations of a step
};

// Parameter block of the dimension-incremental sparse FFT.
struct SfftConfig {
  int N = 16;               // search box [-N, N]^d
  std::size_t s = 1000;     // global sparsity cap
  std::size_t s_local = 0;  // per-iteration cap; 0 means s
  double theta = 1e-12;     // relative threshold
  int r = 3;                // detection iterations per step
  int b = 5;                // multiple-lattice searches per step
  SamplingBackend backend = SamplingBackend::multiple_lattice;
  std::uint64_t seed = 0;
  double oversampling = 2.0;  // c of the multiple-lattice construction
  ThresholdMode threshold_mode = ThresholdMode::per_iteration;
  // Recompute the strongest final candidates on further lattices, subtract
  // the aliasing background of each lattice and keep the candidates whose
  // averaged estimate stands out from that background.
  bool verify_final = true;
  std::size_t candidate_cap = 10'000'000;
  std::uint64_t sample_cap = 0;  // 0 = unlimited
  CbcOptions cbc{};
  unsigned workers = 1;            // sampling threads for thread-safe black boxes
  std::ostream* progress = nullptr;  // line-oriented step records when set

  std::size_t local_cap() const noexcept { return s_local == 0 ? s : s_local; }
  // Throws ContractError for invalid values.
  void validate() const;
};

// Periodic black box on [0,1)^dim. eval must be deterministic. When
// restrict is set it returns a function of the first t coordinates with
// the trailing ones fixed to the anchor, equal to eval on concatenated
// points; it lets structured functions precompute the fixed part.
//
// on_lattice, when set, writes the restricted function's values at every
// node of lat (lat.dim() leading coordinates, anchor for the rest) into
// out, in node order. It must agree with eval; functions built from
// trigonometric polynomials use it to sample a whole lattice by FFT.
struct BlackBoxFn {
  using Eval = std::function<Complex(std::span<const double>)>;
  using Restrict = std::function<Eval(int t, std::span<const double> anchor)>;
  using LatticeEval =
      std::function<void(const Rank1Lattice& lat, std::span<const double> anchor, std::vector<Complex>& out)>;

  int dim = 1;
  Eval eval;
  bool thread_safe = false;
  Restrict restrict;
  LatticeEval on_lattice;

  Eval restricted(int t, std::span<const double> anchor) const;
};

// One step, for diagnostics. Axis detection records carry the coordinate
// (1-based) in t; incremental records the number of leading coordinates.
struct SfftStepRecord {
  int t = 0;
  std::size_t candidates = 0;   // |J_t|
  std::size_t kept = 0;         // |I_t|
  std::uint64_t samples = 0;    // evaluations of f during the step
  int restarts = 0;             // multiple-lattice restarts
  bool axis_detection = false;
};

struct SfftResult {
  SparseTrigPoly poly;
  std::uint64_t samples = 0;
  std::vector<SfftStepRecord> steps;
};

// Sparse FFT: detects the significant frequencies of f inside [-N,N]^d and
// approximates their Fourier coefficients from samples along (multiple)
// rank-1 lattices.
SfftResult sfft(const BlackBoxFn& f, const SfftConfig& cfg);

// Coefficients of x_{1..t} -> f(x_{1..t}, anchor) on the plan's targets.
// samples_used is incremented by the plan's sample count. background, when
// given, receives the aliasing background of each lattice.
SparseTrigPoly projected_coefficients(const BlackBoxFn& f, std::span<const double> anchor,
                                      const ReconstructionPlan& plan, std::uint64_t& samples_used,
                                      unsigned workers = 1,
                                      std::vector<AliasingBackground>* background = nullptr);

// Reconstruction plan for a canonical target set with the configured backend.
ReconstructionPlan make_plan(const FrequencySet& targets, const SfftConfig& cfg, std::uint64_t seed);

}  // namespace sfode
