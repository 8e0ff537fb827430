#include "sfode/serialization.hpp"

#include <cstdio>
#include <istream>
#include <json.hpp>
#include <ostream>
#include <sstream>
#include <string>

#include "sfode/errors.hpp"

namespace sfode {

void write_poly(std::ostream& os, const SparseTrigPoly& p) {
  os << "# dim=" << p.dim() << " terms=" << p.size() << '\n';
  const auto old = os.precision(17);
  for (std::size_t i = 0; i < p.size(); ++i) {
    for (int k : p.frequencies()[i]) os << k << ' ';
    os << p.coefficients()[i].real() << ' ' << p.coefficients()[i].imag() << '\n';
  }
  os.precision(old);
}

SparseTrigPoly read_poly(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ContractError("read_poly: missing header");
  int dim = -1;
  long long terms = -1;
  if (std::sscanf(line.c_str(), "# dim=%d terms=%lld", &dim, &terms) != 2 || dim < 0 || terms < 0)
    throw ContractError("read_poly: malformed header '" + line + "'");
  FrequencySet set(dim);
  std::vector<Complex> coeffs;
  std::vector<int> k(static_cast<std::size_t>(dim));
  for (long long t = 0; t < terms; ++t) {
    if (!std::getline(is, line)) throw ContractError("read_poly: truncated term list");
    std::istringstream row(line);
    double re = 0.0, im = 0.0;
    for (auto& c : k) row >> c;
    row >> re >> im;
    if (!row) throw ContractError("read_poly: malformed row '" + line + "'");
    set.push_back(k);
    coeffs.emplace_back(re, im);
  }
  return {std::move(set), std::move(coeffs)};
}

namespace {

nlohmann::json map_json(const PeriodizationMap& m) {
  return {{"kind", std::string(to_string(m.kind()))}, {"alpha", m.alpha()}, {"beta", m.beta()}};
}

PeriodizationMap map_from(const nlohmann::json& j) {
  return {parse_periodization_kind(j.at("kind").get<std::string>()), j.at("alpha").get<double>(),
          j.at("beta").get<double>()};
}

}  // namespace

void write_solution(std::ostream& os, const SolutionRep& rep) {
  nlohmann::json random = nlohmann::json::array();
  for (const auto& m : rep.maps().random.maps()) random.push_back(map_json(m));
  const auto& s = rep.samples();
  nlohmann::json header = {{"d_xi", rep.d_xi()},
                           {"spatial", map_json(rep.maps().spatial)},
                           {"random", random},
                           {"samples", {{"rhs", s.rhs}, {"v1", s.v1}, {"v2", s.v2}, {"c1", s.c1}}}};
  os << header.dump() << '\n';
  write_poly(os, rep.u1().oscillatory());
  write_poly(os, rep.u1().linear());
  write_poly(os, rep.u2().oscillatory());
  write_poly(os, rep.u2().linear());
  write_poly(os, rep.c1());
}

SolutionRep read_solution(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ContractError("read_solution: missing header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw ContractError(std::string("read_solution: bad header: ") + e.what());
  }
  std::vector<PeriodizationMap> random;
  for (const auto& m : h.at("random")) random.push_back(map_from(m));
  SolverMaps maps{map_from(h.at("spatial")), ProductPeriodization(std::move(random))};
  StageSamples s;
  const auto& js = h.at("samples");
  s.rhs = js.at("rhs");
  s.v1 = js.at("v1");
  s.v2 = js.at("v2");
  s.c1 = js.at("c1");
  auto u1o = read_poly(is);
  auto u1l = read_poly(is);
  auto u2o = read_poly(is);
  auto u2l = read_poly(is);
  auto c1 = read_poly(is);
  return {AntiderivativeRep(std::move(u1o), std::move(u1l)), AntiderivativeRep(std::move(u2o), std::move(u2l)),
          std::move(c1), std::move(maps), s};
}

}  // namespace sfode
