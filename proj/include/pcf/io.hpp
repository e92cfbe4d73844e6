#pragma once

#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

#include "json.hpp"

#include "bands.hpp"
#include "green.hpp"

namespace pcf {

using json = nlohmann::json;

// 17 significant digits, round-trip exact.
inline std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline json to_json(const BlochTheta& t) { return json::array({t[0], t[1]}); }

inline json to_json(const Resolution& r) {
  return {{"cutoff", r.cutoff},
          {"source_cutoff", r.source_cutoff},
          {"pw_cutoff", r.pw_cutoff},
          {"gram_threshold", r.gram_threshold}};
}

inline json to_json(const Spectrum& s) {
  json j = {{"theta", to_json(s.theta)},
            {"multicell", s.multicell},
            {"solver", s.solver},
            {"resolution", to_json(s.resolution)},
            {"basis_raw", s.basis_raw},
            {"basis_retained", s.basis_retained},
            {"eigenvalues", s.eigenvalues}};
  j["eps"] = std::isnan(s.eps) ? json(nullptr) : json(s.eps);
  return j;
}

// sigma0 as a union of closed intervals.
inline std::vector<std::array<double, 2>> band_union(const std::vector<std::array<double, 2>>& extents) {
  std::vector<std::array<double, 2>> iv = extents, out;
  std::sort(iv.begin(), iv.end());
  for (const auto& e : iv) {
    if (!out.empty() && e[0] <= out.back()[1])
      out.back()[1] = std::max(out.back()[1], e[1]);
    else
      out.push_back(e);
  }
  return out;
}

inline json to_json(const GapRecord& g) {
  return {{"band", g.band}, {"lower", g.lower}, {"upper", g.upper}, {"width", g.width()},
          {"relative_width", g.relative_width()}};
}

inline json to_json(const BandStructure& bs) {
  json thetas = json::array();
  for (const auto& t : bs.grid.points) thetas.push_back(to_json(t));
  json gaps = json::array();
  for (const auto& g : detect_gaps(bs)) gaps.push_back(to_json(g));
  return {{"solver", bs.solver},
          {"grid", {{"kind", bs.grid.kind}, {"n1", bs.grid.n1}, {"n2", bs.grid.n2}}},
          {"thetas", thetas},
          {"values", bs.values},
          {"extents", bs.extents},
          {"sigma0", band_union(bs.extents)},
          {"gaps", gaps}};
}

inline json to_json(const GreenConstant& g) {
  return {{"theta", to_json(g.theta)},
          {"k", g.k},
          {"value", g.value},
          {"error", g.error},
          {"tableau", g.tableau},
          {"sigmas", g.resolution.sigmas},
          {"radii", g.resolution.radii},
          {"cutoff", g.resolution.cutoff},
          {"mollifier_order", g.resolution.order}};
}

inline json to_json(const ArrowBoundsReport& r) {
  json rows = json::array();
  for (const auto& x : r.rows)
    rows.push_back({{"theta", to_json(x.theta)},
                    {"from_limit_solve", x.from_limit_solve},
                    {"disc_integral", x.disc_integral},
                    {"lambda1_upper", x.lambda1_upper},
                    {"lambda2_upper", x.lambda2_upper},
                    {"lambda3_lower", x.lambda3_lower}});
  return {{"delta", r.delta},
          {"mu2", r.mu2},
          {"c_upper", r.c_upper},
          {"c_lower", r.c_lower},
          {"max_lambda2_upper", r.max_lambda2_upper},
          {"min_lambda3_lower", r.min_lambda3_lower},
          {"gap", r.gap},
          {"rows", rows}};
}

inline void write_bands_csv(std::ostream& os, const BandStructure& bs) {
  os << "theta1,theta2,band,lambda\n";
  for (std::size_t i = 0; i < bs.values.size(); ++i)
    for (std::size_t k = 0; k < bs.values[i].size(); ++k)
      os << fmt(bs.grid.points[i][0]) << ',' << fmt(bs.grid.points[i][1]) << ',' << k + 1 << ','
         << fmt(bs.values[i][k]) << '\n';
}

inline void write_gaps_csv(std::ostream& os, const std::vector<GapRecord>& gaps) {
  os << "band,lower,upper,width,relative_width\n";
  for (const auto& g : gaps)
    os << g.band << ',' << fmt(g.lower) << ',' << fmt(g.upper) << ',' << fmt(g.width()) << ','
       << fmt(g.relative_width()) << '\n';
}

inline void write_slab_csv(std::ostream& os, const BandStructure& bs) {
  os << "theta1,band,lambda\n";
  for (std::size_t i = 0; i < bs.values.size(); ++i)
    for (std::size_t k = 0; k < bs.values[i].size(); ++k)
      os << fmt(bs.grid.points[i][0]) << ',' << k + 1 << ',' << fmt(bs.values[i][k]) << '\n';
}

inline void write_slab_gaps_csv(std::ostream& os, const std::vector<GapRecord>& gaps) {
  os << "band,lower,upper\n";
  for (const auto& g : gaps) os << g.band << ',' << fmt(g.lower) << ',' << fmt(g.upper) << '\n';
}

inline void write_hausdorff_csv(std::ostream& os, const ConvergenceStudy& s) {
  os << "eps,hausdorff,window\n";
  for (std::size_t e = 0; e < s.eps.size(); ++e)
    os << fmt(s.eps[e]) << ',' << fmt(s.distances[e]) << ',' << fmt(s.window) << '\n';
}

inline void write_omega_k_csv(std::ostream& os, const std::vector<OmegaKRegion>& regions) {
  os << "band,eps,omega2,k2\n";
  for (const auto& r : regions)
    for (const auto& p : r.pairs) os << r.gap.band << ',' << fmt(p.eps) << ',' << fmt(p.omega2) << ',' << fmt(p.k2) << '\n';
}

inline void write_arrow_csv(std::ostream& os, const ArrowBoundsReport& r) {
  os << "delta,theta1,theta2,lambda2_upper,lambda3_lower\n";
  for (const auto& x : r.rows)
    os << fmt(r.delta) << ',' << fmt(x.theta[0]) << ',' << fmt(x.theta[1]) << ',' << fmt(x.lambda2_upper) << ','
       << fmt(x.lambda3_lower) << '\n';
}

}  // namespace pcf
