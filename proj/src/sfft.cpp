#include "sfode/sfft.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <ostream>
#include <string>
#include <thread>

#include "sfode/errors.hpp"
#include "sfode/primes.hpp"
#include "sfode/fft.hpp"
#include "sfode/rng.hpp"

namespace sfode {

std::string_view to_string(SamplingBackend backend) noexcept {
  return backend == SamplingBackend::single_lattice ? "r1l" : "mr1l";
}

SamplingBackend parse_backend(std::string_view name) {
  if (name == "r1l") return SamplingBackend::single_lattice;
  if (name == "mr1l") return SamplingBackend::multiple_lattice;
  throw ContractError("unknown sampling backend '" + std::string(name) + "'");
}

void SfftConfig::validate() const {
  if (N < 1) throw ContractError("SfftConfig: N must be >= 1");
  if (s < 1) throw ContractError("SfftConfig: s must be >= 1");
  if (!(theta > 0.0)) throw ContractError("SfftConfig: theta must be positive");
  if (r < 1) throw ContractError("SfftConfig: r must be >= 1");
  if (b < 1) throw ContractError("SfftConfig: b must be >= 1");
  if (oversampling < 1.0) throw ContractError("SfftConfig: oversampling must be >= 1");
}

BlackBoxFn::Eval BlackBoxFn::restricted(int t, std::span<const double> anchor) const {
  if (t < 0 || t + static_cast<int>(anchor.size()) != dim)
    throw ContractError("BlackBoxFn::restricted: anchor does not complete the point");
  if (anchor.empty()) return eval;
  if (restrict) return restrict(t, anchor);
  std::vector<double> tail(anchor.begin(), anchor.end());
  return [eval = eval, tail = std::move(tail), t](std::span<const double> x) {
    thread_local std::vector<double> point;
    point.resize(static_cast<std::size_t>(t) + tail.size());
    std::copy(x.begin(), x.end(), point.begin());
    std::copy(tail.begin(), tail.end(), point.begin() + t);
    return eval(point);
  };
}

namespace {

constexpr double kAbsoluteFloor = 100.0 * std::numeric_limits<double>::epsilon();
constexpr double kVerifyZ = 4.0;

// Indices of the entries passing the relative threshold, ordered by
// descending magnitude (ties by index, i.e. lexicographic frequency) and
// truncated to cap.
std::vector<std::size_t> select(const std::vector<double>& mags, double reference, double theta, std::size_t cap) {
  const double cut = std::max(theta * reference, kAbsoluteFloor);
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < mags.size(); ++i)
    if (mags[i] >= cut) idx.push_back(i);
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return mags[a] > mags[b]; });
  if (idx.size() > cap) idx.resize(cap);
  return idx;
}

double max_of(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, x);
  return m;
}

void sample_lattice(const BlackBoxFn::Eval& g, const Rank1Lattice& lat, std::vector<Complex>& out,
                    unsigned workers) {
  const std::int64_t M = lat.size();
  const int t = lat.dim();
  out.resize(static_cast<std::size_t>(M));
  auto run = [&](std::int64_t begin, std::int64_t end) {
    std::vector<std::int64_t> acc(static_cast<std::size_t>(t));
    std::vector<double> point(static_cast<std::size_t>(t));
    const auto& z = lat.generator();
    for (int c = 0; c < t; ++c)
      acc[c] = static_cast<std::int64_t>(static_cast<uint128>(begin) * static_cast<std::uint64_t>(z[c]) %
                                         static_cast<std::uint64_t>(M));
    const double inv = 1.0 / static_cast<double>(M);
    for (std::int64_t j = begin; j < end; ++j) {
      for (int c = 0; c < t; ++c) {
        point[c] = static_cast<double>(acc[c]) * inv;
        acc[c] += z[c];
        if (acc[c] >= M) acc[c] -= M;
      }
      out[static_cast<std::size_t>(j)] = g(point);
    }
  };
  if (workers <= 1 || M < 4096) {
    run(0, M);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  {
    std::vector<std::jthread> pool;
    const std::int64_t chunk = (M + workers - 1) / workers;
    unsigned w = 0;
    for (std::int64_t begin = 0; begin < M; begin += chunk, ++w)
      pool.emplace_back([&, begin, w] {
        try {
          run(begin, std::min(M, begin + chunk));
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

void check_budget(const SfftConfig& cfg, std::uint64_t used, std::uint64_t more) {
  if (cfg.sample_cap != 0 && used + more > cfg.sample_cap)
    throw BudgetError("sfft: sample budget of " + std::to_string(cfg.sample_cap) + " exceeded");
}

void report(const SfftConfig& cfg, const SfftStepRecord& rec) {
  if (cfg.progress == nullptr) return;
  *cfg.progress << (rec.axis_detection ? "sfft axis=" : "sfft t=") << rec.t << " candidates=" << rec.candidates << " kept=" << rec.kept
                << " samples=" << rec.samples << " restarts=" << rec.restarts << '\n';
}

// One-dimensional candidate detection along coordinate `axis`; returns
// (frequency, largest magnitude seen) sorted by frequency.
std::vector<std::pair<int, double>> detect_axis(const BlackBoxFn& f, const SfftConfig& cfg, int axis, std::uint64_t& samples) {
  const int L = 2 * cfg.N + 1;
  const int d = f.dim;
  const int iterations = d == 1 ? 1 : cfg.r;
  check_budget(cfg, samples, static_cast<std::uint64_t>(L) * iterations);
  std::vector<double> best(static_cast<std::size_t>(L), 0.0);
  std::map<int, double> kept;  // per-iteration survivors, by frequency
  std::vector<double> point(static_cast<std::size_t>(d));
  std::vector<Complex> buf(static_cast<std::size_t>(L));
  for (int it = 0; it < iterations; ++it) {
    Rng rng(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(axis), static_cast<std::uint64_t>(it)));
    for (auto& x : point) x = rng.grid01();
    for (int j = 0; j < L; ++j) {
      point[axis] = static_cast<double>(j) / L;
      buf[j] = f.eval(point);
    }
    samples += static_cast<std::uint64_t>(L);
    dft_forward(buf);
    // mags[k + N] for k in [-N, N]
    std::vector<double> mags(static_cast<std::size_t>(L));
    for (int k = -cfg.N; k <= cfg.N; ++k) mags[k + cfg.N] = std::abs(buf[((k % L) + L) % L]) / L;
    for (int i = 0; i < L; ++i) best[i] = std::max(best[i], mags[i]);
    if (cfg.threshold_mode == ThresholdMode::per_iteration) {
      for (auto i : select(mags, max_of(mags), cfg.theta, cfg.local_cap())) {
        auto& m = kept[static_cast<int>(i) - cfg.N];
        m = std::max(m, mags[i]);
      }
    }
  }
  std::vector<std::pair<int, double>> out;
  if (cfg.threshold_mode == ThresholdMode::per_iteration) {
    for (const auto& [k, m] : kept) out.emplace_back(k, m);
  } else {
    for (auto i : select(best, max_of(best), cfg.theta, cfg.local_cap() * static_cast<std::size_t>(iterations)))
      out.emplace_back(static_cast<int>(i) - cfg.N, best[i]);
    std::sort(out.begin(), out.end());
  }
  return out;
}

FrequencySet extend(const FrequencySet& prefix, const std::vector<std::pair<int, double>>& axis_candidates) {
  FrequencySet out(prefix.dim() + 1);
  out.reserve(prefix.size() * axis_candidates.size());
  std::vector<int> k(static_cast<std::size_t>(prefix.dim()) + 1);
  for (std::size_t i = 0; i < prefix.size(); ++i) {
    std::copy(prefix[i].begin(), prefix[i].end(), k.begin());
    for (const auto& [c, m] : axis_candidates) {
      k.back() = c;
      out.push_back(k);
    }
  }
  return out;
}

// Extra reconstructions of the final candidates. A single rank-1 lattice
// is fixed by the target set, so only one further lattice is available.
int verification_passes(const SfftConfig& cfg) {
  if (!cfg.verify_final) return 0;
  return cfg.backend == SamplingBackend::single_lattice ? std::min(cfg.r - 1, 1) : cfg.r - 1;
}

// Subset of poly's terms with the given indices, canonical.
SparseTrigPoly subset(const SparseTrigPoly& poly, std::vector<std::size_t> idx) {
  std::sort(idx.begin(), idx.end());
  FrequencySet set(poly.dim());
  std::vector<Complex> coeffs;
  for (auto i : idx) {
    set.push_back(poly.frequencies()[i]);
    coeffs.push_back(poly.coefficients()[i]);
  }
  return {std::move(set), std::move(coeffs)};
}

std::vector<double> magnitudes(const SparseTrigPoly& p) {
  std::vector<double> m(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) m[i] = std::abs(p.coefficients()[i]);
  return m;
}

}  // namespace

ReconstructionPlan make_plan(const FrequencySet& targets, const SfftConfig& cfg, std::uint64_t seed) {
  if (cfg.backend == SamplingBackend::single_lattice)
    return ReconstructionPlan::single(targets, cbc_reconstructing_lattice(targets, cfg.cbc));
  return ReconstructionPlan::multiple(targets, build_multiple_lattices(targets, cfg.oversampling, cfg.b, seed));
}

SparseTrigPoly projected_coefficients(const BlackBoxFn& f, std::span<const double> anchor,
                                      const ReconstructionPlan& plan, std::uint64_t& samples_used,
                                      unsigned workers, std::vector<AliasingBackground>* background) {
  const int t = plan.targets().dim();
  std::vector<std::vector<Complex>> samples(plan.lattices().size());
  if (f.on_lattice) {
    if (t + static_cast<int>(anchor.size()) != f.dim)
      throw ContractError("projected_coefficients: anchor does not complete the point");
    for (std::size_t l = 0; l < samples.size(); ++l) {
      f.on_lattice(plan.lattices()[l], anchor, samples[l]);
      if (samples[l].size() != static_cast<std::size_t>(plan.lattices()[l].size()))
        throw ContractError("projected_coefficients: lattice evaluator returned the wrong number of values");
    }
  } else {
    const auto g = f.restricted(t, anchor);
    const unsigned w = f.thread_safe ? workers : 1;
    for (std::size_t l = 0; l < samples.size(); ++l) sample_lattice(g, plan.lattices()[l], samples[l], w);
  }
  samples_used += plan.sample_count();
  return lattice_reconstruct(plan, samples, background);
}

SfftResult sfft(const BlackBoxFn& f, const SfftConfig& cfg) {
  cfg.validate();
  if (f.dim < 1 || !f.eval) throw ContractError("sfft: black box needs dim >= 1 and an evaluator");
  const int d = f.dim;
  SfftResult result;
  result.poly = SparseTrigPoly(d);

  if (d == 1) {
    // A single dense DFT over the box already yields the coefficients.
    const int L = 2 * cfg.N + 1;
    check_budget(cfg, 0, static_cast<std::uint64_t>(L));
    std::vector<Complex> buf(static_cast<std::size_t>(L));
    for (int j = 0; j < L; ++j) {
      const double x = static_cast<double>(j) / L;
      buf[j] = f.eval(std::span<const double>(&x, 1));
    }
    dft_forward(buf);
    FrequencySet set(1);
    std::vector<Complex> coeffs;
    for (int k = -cfg.N; k <= cfg.N; ++k) {
      set.push_back(std::span<const int>(&k, 1));
      coeffs.push_back(buf[((k % L) + L) % L] / static_cast<double>(L));
    }
    SparseTrigPoly all(std::move(set), std::move(coeffs));
    auto mags = magnitudes(all);
    result.poly = subset(all, select(mags, max_of(mags), cfg.theta, cfg.s));
    result.samples = static_cast<std::uint64_t>(L);
    result.steps.push_back({1, all.size(), result.poly.size(), result.samples, 0, false});
    report(cfg, result.steps.back());
    return result;
  }

  // Step A: one-dimensional candidates for every coordinate.
  std::vector<std::vector<std::pair<int, double>>> axis(static_cast<std::size_t>(d));
  for (int t = 0; t < d; ++t) {
    const std::uint64_t before = result.samples;
    axis[t] = detect_axis(f, cfg, t, result.samples);
    result.steps.push_back({t + 1, static_cast<std::size_t>(2 * cfg.N + 1), axis[t].size(),
                            result.samples - before, 0, true});
    report(cfg, result.steps.back());
    if (axis[t].empty()) return result;
  }

  // I_1 is the first axis' candidate set, capped at s.
  FrequencySet current(1);
  {
    std::vector<double> mags;
    for (const auto& [k, m] : axis[0]) mags.push_back(m);
    auto keep = select(mags, 0.0, cfg.theta, cfg.s);
    std::sort(keep.begin(), keep.end());
    for (auto i : keep) current.push_back(std::span<const int>(&axis[0][i].first, 1));
  }

  // Step B: grow one coordinate at a time.
  for (int t = 2; t <= d; ++t) {
    FrequencySet candidates = extend(current, axis[t - 1]);
    if (candidates.size() > cfg.candidate_cap)
      throw BudgetError("sfft: candidate set of " + std::to_string(candidates.size()) + " frequencies at t=" +
                        std::to_string(t) + " exceeds cap " + std::to_string(cfg.candidate_cap));
    const std::uint64_t before = result.samples;
    const auto plan = make_plan(candidates, cfg, derive_seed(cfg.seed, 2, static_cast<std::uint64_t>(t)));
    SfftStepRecord rec{t, candidates.size(), 0, 0, plan.restarts(), false};

    if (t == d) {
      // Final pass: the full function, no anchor.
      check_budget(cfg, result.samples, plan.sample_count());
      std::vector<AliasingBackground> background;
      auto coeffs = projected_coefficients(f, {}, plan, result.samples, cfg.workers, &background);
      auto mags = magnitudes(coeffs);
      const int passes = verification_passes(cfg);
      if (passes == 0) {
        result.poly = subset(coeffs, select(mags, max_of(mags), cfg.theta, cfg.s));
      } else {
        auto pre = select(mags, max_of(mags), cfg.theta, cfg.local_cap() * static_cast<std::size_t>(cfg.r));
        std::sort(pre.begin(), pre.end());
        const auto first = subset(coeffs, pre);
        // The significance test uses the further passes only, since the first
        // one selected the candidates. It corrects each estimate by its
        // lattice's background mean and charges it that lattice's background
        // variance. Aliasing is heavy tailed, so with two or more passes the
        // one deviating most is left out. The reported coefficient is the
        // plain mean over all passes.
        const auto n = static_cast<double>(passes + 1);
        std::vector<Complex> mean(first.coefficients().begin(), first.coefficients().end());
        std::vector<std::vector<Complex>> excess(static_cast<std::size_t>(passes));
        std::vector<std::vector<double>> noise(static_cast<std::size_t>(passes));
        for (int pass = 1; pass <= passes; ++pass) {
          const auto again = make_plan(first.frequencies(), cfg, derive_seed(cfg.seed, 4, static_cast<std::uint64_t>(pass)));
          check_budget(cfg, result.samples, again.sample_count());
          const auto run = projected_coefficients(f, {}, again, result.samples, cfg.workers, &background);
          auto& ex = excess[static_cast<std::size_t>(pass - 1)];
          auto& var = noise[static_cast<std::size_t>(pass - 1)];
          for (std::size_t j = 0; j < mean.size(); ++j) {
            const auto& bg = background[again.assignment()[j]];
            mean[j] += run.coefficients()[j];
            ex.push_back(run.coefficients()[j] - bg.mean);
            var.push_back(bg.variance);
          }
        }
        std::vector<double> score(first.size());
        for (std::size_t j = 0; j < mean.size(); ++j) {
          mean[j] /= n;
          Complex sum;
          double var = 0.0;
          std::size_t worst = 0;
          for (std::size_t p = 0; p < excess.size(); ++p) {
            sum += excess[p][j];
            var += noise[p][j];
            if (std::norm(excess[p][j]) > std::norm(excess[worst][j])) worst = p;
          }
          if (excess.size() > 1) {
            sum -= excess[worst][j];
            var -= noise[worst][j];
          }
          score[j] = std::norm(sum) >= kVerifyZ * kVerifyZ * var ? std::abs(mean[j]) : 0.0;
        }
        const SparseTrigPoly averaged(first.frequencies(), std::move(mean));
        result.poly = subset(averaged, select(score, max_of(score), cfg.theta, cfg.s));
      }
      rec.kept = result.poly.size();
      rec.samples = result.samples - before;
      result.steps.push_back(rec);
      report(cfg, rec);
      return result;
    }

    std::vector<double> best(candidates.size(), 0.0);
    std::vector<char> hit(candidates.size(), 0);
    std::vector<double> anchor(static_cast<std::size_t>(d - t));
    for (int it = 0; it < cfg.r; ++it) {
      check_budget(cfg, result.samples, plan.sample_count());
      Rng rng(derive_seed(cfg.seed, 3, static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(it)));
      for (auto& a : anchor) a = rng.grid01();
      auto coeffs = projected_coefficients(f, anchor, plan, result.samples, cfg.workers);
      auto mags = magnitudes(coeffs);
      for (std::size_t i = 0; i < mags.size(); ++i) best[i] = std::max(best[i], mags[i]);
      if (cfg.threshold_mode == ThresholdMode::per_iteration)
        for (auto i : select(mags, max_of(mags), cfg.theta, cfg.local_cap())) hit[i] = 1;
    }
    std::vector<std::size_t> keep;
    if (cfg.threshold_mode == ThresholdMode::per_iteration) {
      std::vector<double> ranked(best.size(), 0.0);
      for (std::size_t i = 0; i < best.size(); ++i)
        if (hit[i]) ranked[i] = best[i];
      keep = select(ranked, 0.0, cfg.theta, cfg.s);
      keep.erase(std::remove_if(keep.begin(), keep.end(), [&](std::size_t i) { return !hit[i]; }), keep.end());
    } else {
      keep = select(best, max_of(best), cfg.theta, cfg.s);
    }
    std::sort(keep.begin(), keep.end());
    FrequencySet next(t);
    next.reserve(keep.size());
    for (auto i : keep) next.push_back(candidates[i]);
    current = std::move(next);
    rec.kept = current.size();
    rec.samples = result.samples - before;
    result.steps.push_back(rec);
    report(cfg, rec);
    if (current.empty()) return result;
  }
  return result;
}

}  // namespace sfode
