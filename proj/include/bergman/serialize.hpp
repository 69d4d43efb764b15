#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"
#include "bergman/kernels.hpp"
#include "bergman/lattice.hpp"
#include "bergman/measures.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/summing.hpp"

namespace bergman {

using json = nlohmann::json;

/// Non-finite reals travel as "inf" / "-inf"; NaN as null.
inline json real_to_json(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

inline double real_from_json(const json& j) {
  if (j.is_null()) return std::nan("");
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    if (s == "nan") return std::nan("");
    throw ConfigError("expected a number, got \"" + s + "\"");
  }
  if (!j.is_number()) throw ConfigError("expected a number, got " + j.dump());
  return j.get<double>();
}

inline json point_to_json(const BallPoint& p) {
  json a = json::array();
  for (const auto& c : p.coords()) {
    a.push_back(c.real());
    a.push_back(c.imag());
  }
  return a;
}

inline BallPoint point_from_json(const json& j) {
  if (!j.is_array() || j.empty() || j.size() % 2 != 0)
    throw ConfigError("point must be a flat array [re, im, ...] of even length");
  std::vector<cplx> c;
  for (std::size_t k = 0; k < j.size(); k += 2) c.emplace_back(j[k].get<double>(), j[k + 1].get<double>());
  return BallPoint(std::move(c));
}

inline json to_json(const Lattice& lat) {
  json pts = json::array();
  for (const auto& p : lat.points) pts.push_back(point_to_json(p));
  return {{"delta", lat.delta},
          {"regionRadius", lat.region_radius},
          {"points", pts},
          {"separation", lat.separation},
          {"multiplicity", lat.multiplicity}};
}

inline Lattice lattice_from_json(const json& j) {
  Lattice lat;
  lat.delta = j.at("delta").get<double>();
  lat.region_radius = j.at("regionRadius").get<double>();
  lat.separation = j.value("separation", 0.5);
  lat.multiplicity = j.value("multiplicity", 1);
  for (const auto& p : j.at("points")) lat.points.push_back(point_from_json(p));
  lat.n = lat.points.empty() ? 1 : lat.points.front().dim();
  return lat;
}

inline json to_json(const HoloPoly& f) {
  json cs = json::array();
  for (std::size_t k = 0; k < f.coeffs.size(); ++k) {
    if (f.coeffs[k] == cplx{}) continue;
    cs.push_back({{"m", f.index[k]}, {"re", f.coeffs[k].real()}, {"im", f.coeffs[k].imag()}});
  }
  return {{"n", f.n}, {"degree", f.degree}, {"coeffs", cs}};
}

inline HoloPoly holopoly_from_json(const json& j) {
  HoloPoly f = HoloPoly::zero(j.at("n").get<int>(), j.at("degree").get<int>());
  for (const auto& c : j.at("coeffs")) {
    const auto m = c.at("m").get<MultiIndex>();
    const auto pos = f.position(m);
    if (!pos) throw ConfigError("HoloPoly: multi-index outside the degree bound");
    f.coeffs[*pos] = cplx(c.at("re").get<double>(), c.at("im").get<double>());
  }
  return f;
}

inline json to_json(const MeasureSpec& mu) {
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    json atoms = json::array();
    for (std::size_t k = 0; k < a->points.size(); ++k)
      atoms.push_back({{"z", point_to_json(a->points[k])}, {"mass", a->masses[k]}});
    return {{"type", "atomic"}, {"atoms", atoms}};
  }
  if (const auto* rp = std::get_if<RadialPowerMeasure>(&mu)) {
    json j = {{"type", "radial_power"}, {"t", rp->t}, {"scale", rp->scale}};
    if (rp->n != 1) j["n"] = rp->n;
    return j;
  }
  const auto& g = std::get<GridDensityMeasure>(mu);
  return {{"type", "grid"}, {"r", g.r}, {"theta", g.theta}, {"values", g.values}};
}

inline MeasureSpec measure_from_json(const json& j) {
  const auto type = j.at("type").get<std::string>();
  MeasureSpec mu;
  if (type == "atomic") {
    AtomicMeasure a;
    for (const auto& at : j.at("atoms")) {
      a.points.push_back(point_from_json(at.at("z")));
      a.masses.push_back(at.at("mass").get<double>());
    }
    mu = std::move(a);
  } else if (type == "radial_power") {
    mu = RadialPowerMeasure{j.at("t").get<double>(), j.value("scale", 1.0), j.value("n", 1)};
  } else if (type == "grid") {
    GridDensityMeasure g;
    g.r = j.at("r").get<std::vector<double>>();
    g.theta = j.at("theta").get<std::vector<double>>();
    g.values = j.at("values").get<std::vector<std::vector<double>>>();
    mu = std::move(g);
  } else {
    throw ConfigError("unknown measure type \"" + type + "\"");
  }
  validate(mu);
  return mu;
}

inline json to_json(const QuadratureScheme& q) {
  return {{"panels", q.panels}, {"nodes", q.nodes}, {"angular", q.angular}, {"rmax", q.rmax}};
}

inline QuadratureScheme scheme_from_json(const json& j) {
  QuadratureScheme q;
  q.panels = j.value("panels", q.panels);
  q.nodes = j.value("nodes", q.nodes);
  q.angular = j.value("angular", q.angular);
  q.rmax = j.value("rmax", q.rmax);
  q.ball_panels = j.value("ballPanels", q.ball_panels);
  q.ball_angular = j.value("ballAngular", q.ball_angular);
  q.validate();
  return q;
}

inline json to_json(const SummingEstimate& e) {
  return {{"r", e.r}, {"lower", real_to_json(e.lower)}, {"upper", real_to_json(e.upper.or_inf())},
          {"method", e.method}, {"D", e.D}};
}

}  // namespace bergman
