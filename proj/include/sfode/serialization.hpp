#pragma once

#include <iosfwd>

#include "sfode/ode_solver.hpp"

namespace sfode {

// "# dim=<d> terms=<n>" followed by one "k_1 ... k_d re im" row per term,
// in lexicographic order, coefficients with 17 significant digits.
void write_poly(std::ostream& os, const SparseTrigPoly& p);
SparseTrigPoly read_poly(std::istream& is);

// One-line JSON header (maps, d_xi, stage sample counts) followed by the
// dumps of u1 (oscillatory, linear), u2 (oscillatory, linear) and c1.
void write_solution(std::ostream& os, const SolutionRep& rep);
SolutionRep read_solution(std::istream& is);

}  // namespace sfode
