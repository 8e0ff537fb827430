#include <doctest.h>

#include <set>
#include <sstream>

#include "sfode/errors.hpp"
#include "sfode/lattice.hpp"
#include "sfode/primes.hpp"
#include "support.hpp"

using namespace sfode;
using namespace sfode::testing;

namespace {

FrequencySet box(int d, int N) {
  FrequencySet set(d);
  std::vector<int> k(static_cast<std::size_t>(d), -N);
  while (true) {
    set.push_back(k);
    int j = d - 1;
    while (j >= 0 && k[j] == N) k[j--] = -N;
    if (j < 0) break;
    ++k[j];
  }
  return set;
}

// Exhaustive collision scan, independent of is_reconstructing.
bool injective(const Rank1Lattice& lat, const FrequencySet& set) {
  std::set<long long> seen;
  for (std::size_t i = 0; i < set.size(); ++i) {
    long long r = 0;
    for (int j = 0; j < set.dim(); ++j) r += static_cast<long long>(set[i][j]) * lat.generator()[j];
    r %= lat.size();
    if (r < 0) r += lat.size();
    if (!seen.insert(r).second) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("primes") {
  CHECK(is_prime(2));
  CHECK(!is_prime(1));
  CHECK(is_prime(1'000'000'007));
  CHECK(!is_prime(3215031751ULL));  // strong pseudoprime to bases 2, 3, 5, 7
  CHECK(next_prime(9) == 11);
  CHECK(next_prime(11) == 11);
}

TEST_CASE("lattice nodes") {
  const auto a = lattice_nodes(Rank1Lattice({1, 1}, 2));
  REQUIRE(a.size() == 2);
  CHECK(a[1] == std::vector<double>{0.5, 0.5});
  const auto b = lattice_nodes(Rank1Lattice({1, 2}, 4));
  const std::vector<std::vector<double>> expect{{0, 0}, {0.25, 0.5}, {0.5, 0}, {0.75, 0.5}};
  CHECK(b == expect);
  const auto c = lattice_nodes(Rank1Lattice({3, 5, 7}, 1));
  REQUIRE(c.size() == 1);
  CHECK(c[0] == std::vector<double>{0, 0, 0});
  std::ostringstream os;
  os << Rank1Lattice({1, 2}, 4);
  CHECK(os.str() == "4; 1 2");
}

TEST_CASE("lattice evaluate: constant and single frequency") {
  const Rank1Lattice lat({1, 3}, 7);
  const auto c = lattice_evaluate(SparseTrigPoly::from_terms(2, {{{0, 0}, Complex(2.5, -1)}}), lat);
  for (const auto& v : c) CHECK(std::abs(v - Complex(2.5, -1)) < 1e-14);
  const auto s = lattice_evaluate(SparseTrigPoly::from_terms(2, {{{2, -1}, 1.0}}), lat);
  const int residue = ((2 * 1 - 1 * 3) % 7 + 7) % 7;
  for (int j = 0; j < 7; ++j) CHECK(std::abs(s[j] - unit_phase(static_cast<double>(j * residue) / 7)) < 1e-14);
}

TEST_CASE("lattice evaluate matches direct evaluation") {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(rng, 5, 10, 20);
    std::vector<std::int64_t> z(5);
    for (auto& c : z) c = rng.integer(0, 126);
    const Rank1Lattice lat(z, 127);
    const auto fast = lattice_evaluate(p, lat);
    const auto direct = p.evaluate_batch(lattice_nodes(lat));
    for (std::size_t j = 0; j < fast.size(); ++j) CHECK(std::abs(fast[j] - direct[j]) <= 1e-10);
  }
}

TEST_CASE("is_reconstructing") {
  CHECK(is_reconstructing(Rank1Lattice({3, 4}, 5), FrequencySet::from_list(2, {{0, 0}})));
  CHECK(!is_reconstructing(Rank1Lattice({1, 4}, 5), FrequencySet::from_list(2, {{0, 0}, {1, 1}})));
  const auto b = box(2, 2);
  const Rank1Lattice lat({1, 5}, 25);
  CHECK(is_reconstructing(lat, b) == injective(lat, b));
  CHECK(is_reconstructing(lat, b));
}

TEST_CASE("cbc construction") {
  const auto one = cbc_reconstructing_lattice(FrequencySet::from_list(3, {{0, 0, 0}}));
  CHECK(one.size() == 1);
  const auto line = cbc_reconstructing_lattice(box(1, 4));
  CHECK(line.size() == 11);
  Rng rng(6);
  for (int trial = 0; trial < 50; ++trial) {
    const auto set = random_support(rng, 3, 8, 50);
    const auto lat = cbc_reconstructing_lattice(set);
    CHECK(injective(lat, set));
    CHECK(lat.size() >= 50);
    CHECK(lat == cbc_reconstructing_lattice(set));
  }
  CbcOptions tiny;
  tiny.max_size = 20;
  CHECK_THROWS_AS(cbc_reconstructing_lattice(box(2, 3), tiny), ConstructionError);
}

TEST_CASE("multiple lattices: assignment is alias free") {
  const auto single = build_multiple_lattices(FrequencySet::from_list(2, {{1, 1}}), 2.0, 5, 1);
  CHECK(single.lattices.size() == 1);
  const auto b = box(2, 2);
  const auto ml = build_multiple_lattices(b, 2.0, 5, 42);
  REQUIRE(ml.assignment.size() == b.size());
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto& lat = ml.lattices[ml.assignment[i]];
    for (std::size_t j = 0; j < b.size(); ++j)
      if (j != i) CHECK(lat.residue(b[i]) != lat.residue(b[j]));
  }
}

TEST_CASE("multiple lattices rarely restart") {
  Rng rng(7);
  int clean = 0;
  for (int trial = 0; trial < 500; ++trial) {
    const auto set = random_support(rng, 4, 16, 100);
    const auto ml = build_multiple_lattices(set, 2.0, 5, derive_seed(7, trial));
    if (ml.restarts == 0) ++clean;
    for (const auto& lat : ml.lattices) {
      CHECK(is_prime(static_cast<std::uint64_t>(lat.size())));
      CHECK(lat.size() >= 200);
      CHECK(lat.size() <= 400);
    }
  }
  CHECK(clean >= 475);
}

TEST_CASE("reconstruction round trip") {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = random_poly(rng, 3, 10, 30);
    const auto single = ReconstructionPlan::single(p.frequencies(), cbc_reconstructing_lattice(p.frequencies()));
    const auto multi = ReconstructionPlan::multiple(p.frequencies(),
                                                    build_multiple_lattices(p.frequencies(), 2.0, 5, trial));
    for (const auto* plan : {&single, &multi}) {
      std::vector<std::vector<Complex>> samples;
      for (const auto& lat : plan->lattices()) samples.push_back(lattice_evaluate(p, lat));
      CHECK(max_coefficient_error(lattice_reconstruct(*plan, samples), p) <= 1e-10);
    }
  }
}

TEST_CASE("reconstruction of zero samples and shape errors") {
  const auto set = box(2, 1);
  const auto plan = ReconstructionPlan::single(set, cbc_reconstructing_lattice(set));
  std::vector<std::vector<Complex>> zeros{std::vector<Complex>(static_cast<std::size_t>(plan.lattices()[0].size()))};
  const auto rec = lattice_reconstruct(plan, zeros);
  for (const auto& c : rec.coefficients()) CHECK(c == Complex(0.0));
  std::vector<std::vector<Complex>> wrong{std::vector<Complex>(3)};
  CHECK_THROWS_AS(lattice_reconstruct(plan, wrong), ContractError);
}

TEST_CASE("aliased frequency perturbs by its coefficient") {
  const auto set = FrequencySet::from_list(1, {{0}, {1}, {2}});
  const Rank1Lattice lat({1}, 5);
  const auto plan = ReconstructionPlan::single(set, lat);
  // 6 = 1 mod 5 aliases onto frequency 1.
  const auto p = SparseTrigPoly::from_terms(1, {{{0}, 1.0}, {{1}, 2.0}, {{2}, 3.0}, {{6}, Complex(0.5, 0.25)}});
  std::vector<std::vector<Complex>> samples{lattice_evaluate(p, lat)};
  const auto rec = lattice_reconstruct(plan, samples);
  const int one = 1;
  CHECK(std::abs(rec.coefficient(std::span<const int>(&one, 1)) - Complex(2.5, 0.25)) < 1e-12);
}

TEST_CASE("aliasing background from unoccupied residues") {
  const auto set = FrequencySet::from_list(1, {{0}, {1}, {2}});
  const Rank1Lattice lat({1}, 5);
  const auto plan = ReconstructionPlan::single(set, lat);
  std::vector<AliasingBackground> bg;
  const auto exact = SparseTrigPoly::from_terms(1, {{{0}, 1.0}, {{2}, 3.0}});
  std::vector<std::vector<Complex>> samples{lattice_evaluate(exact, lat)};
  lattice_reconstruct(plan, samples, &bg);
  REQUIRE(bg.size() == 1);
  CHECK(bg[0].residues == 2);
  CHECK(std::abs(bg[0].mean) < 1e-14);
  CHECK(bg[0].variance < 1e-28);
  // Residues 3 and 4 receive 0.4 and 0.2i.
  const auto p = SparseTrigPoly::from_terms(1, {{{0}, 1.0}, {{3}, 0.4}, {{9}, Complex(0.0, 0.2)}});
  samples = {lattice_evaluate(p, lat)};
  const auto rec = lattice_reconstruct(plan, samples, &bg);
  REQUIRE(bg.size() == 1);
  CHECK(std::abs(bg[0].mean - Complex(0.2, 0.1)) < 1e-14);
  CHECK(bg[0].variance == doctest::Approx(0.1));
  CHECK(std::abs(rec.coefficients()[0] - 1.0) < 1e-14);
}
