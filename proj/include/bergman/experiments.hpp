#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "bergman/ball.hpp"
#include "bergman/core.hpp"
#include "bergman/kernels.hpp"
#include "bergman/lattice.hpp"
#include "bergman/measures.hpp"
#include "bergman/operators.hpp"
#include "bergman/quadrature.hpp"
#include "bergman/serialize.hpp"
#include "bergman/summing.hpp"

namespace bergman {

inline const std::vector<std::string>& scenario_names() {
  static const std::vector<std::string> names{"toeplitz-summing", "carleson-summing", "lemma24-equivalence",
                                              "berezin-identity", "forelli-rudin-asymptotics"};
  return names;
}

struct MeasureEntry {
  std::string id;
  std::string family = "custom";
  double param = std::nan("");  // family parameter (t for radial-powers, |a| for single-atoms)
  MeasureSpec spec;
};

struct ExperimentConfig {
  std::string scenario = "toeplitz-summing";
  std::vector<MeasureEntry> measures;
  double p = 2.0, q = 2.0, r = 2.0;
  std::vector<double> deltas{1.0};
  std::vector<int> degrees{256};
  QuadratureScheme quadrature;
  std::uint64_t seed = 1;
  std::string output_dir;
  std::vector<std::string> formats;
  std::vector<double> ps;
  double region_radius = 2.0;
  std::vector<double> radii{0.9, 0.99, 0.999};
  std::vector<std::pair<double, double>> fr_pairs{{0.0, 4.0}, {1.0, 4.0}, {0.0, 3.0}};
  int points = 50;
};

struct Cell {
  std::string scenario;
  std::string measure;
  std::string family;
  double param = std::nan("");
  double p = 0, q = 0, r = 0;
  double exponent = std::nan("");
  int D = 0;
  double delta = std::nan("");
  double lhs_lower = std::nan("");
  double lhs_upper = std::nan("");
  double rhs = std::nan("");
  double ratio_low = std::nan("");
  double ratio_high = std::nan("");
  std::vector<std::string> flags;
  std::map<std::string, double> extras;

  bool operator==(const Cell& o) const {
    auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
    if (scenario != o.scenario || measure != o.measure || family != o.family || D != o.D || flags != o.flags) return false;
    if (!same(param, o.param) || !same(p, o.p) || !same(q, o.q) || !same(r, o.r) || !same(exponent, o.exponent) ||
        !same(delta, o.delta) || !same(lhs_lower, o.lhs_lower) || !same(lhs_upper, o.lhs_upper) ||
        !same(rhs, o.rhs) || !same(ratio_low, o.ratio_low) || !same(ratio_high, o.ratio_high))
      return false;
    if (extras.size() != o.extras.size()) return false;
    for (const auto& [k, v] : extras) {
      auto it = o.extras.find(k);
      if (it == o.extras.end() || !same(v, it->second)) return false;
    }
    return true;
  }
};

struct FamilySummary {
  std::string family;
  double p = 0, r = 0;
  double min_ratio = std::nan("");
  double max_ratio = std::nan("");
  double envelope = std::nan("");
  int both_infinite = 0;
  int mismatched = 0;
  double max_convergence_delta = std::nan("");

  bool operator==(const FamilySummary& o) const {
    auto same = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
    return family == o.family && same(p, o.p) && same(r, o.r) && same(min_ratio, o.min_ratio) &&
           same(max_ratio, o.max_ratio) && same(envelope, o.envelope) && both_infinite == o.both_infinite &&
           mismatched == o.mismatched && same(max_convergence_delta, o.max_convergence_delta);
  }
};

struct ExperimentReport {
  std::string scenario;
  std::uint64_t seed = 0;
  std::vector<Cell> cells;
  std::vector<FamilySummary> summary;
  int numeric_errors = 0;

  bool operator==(const ExperimentReport& o) const {
    return scenario == o.scenario && seed == o.seed && cells == o.cells && summary == o.summary &&
           numeric_errors == o.numeric_errors;
  }
};

// --- builtin families -------------------------------------------------------


/// Named measure families; params carry the family knobs.
inline std::vector<MeasureEntry> builtin_family(const std::string& name, const json& params = json::object()) {
  std::vector<MeasureEntry> out;
  if (name == "radial-powers") {
    const auto ts = params.value("ts", std::vector<double>{1.0, 2.0, 3.0});
    const double scale = params.value("scale", 1.0);
    for (double t : ts) {
      MeasureSpec mu = RadialPowerMeasure{t, scale, 1};
      validate(mu);
      out.push_back({"radial_power(t=" + format_short(t) + ")", name, t, std::move(mu)});
    }
  } else if (name == "single-atoms") {
    const auto radii = params.value("radii", std::vector<double>{0.0, 0.6});
    const double mass = params.value("mass", 1.0);
    for (double a : radii) {
      MeasureSpec mu = AtomicMeasure{{BallPoint(cplx(a, 0.0))}, {mass}};
      validate(mu);
      out.push_back({"atom(" + format_short(a) + ")", name, a, std::move(mu)});
    }
  } else if (name == "lattice-atoms") {
    const double delta = params.value("delta", 1.0);
    const double R = params.value("regionRadius", 1.5);
    const double e = params.value("weightExponent", 2.0);
    const Lattice lat = generate_lattice(delta, R, 1);
    AtomicMeasure a;
    for (const auto& pt : lat.points) {
      a.points.push_back(pt);
      a.masses.push_back(std::pow(pt.defect(), e));
    }
    MeasureSpec mu = std::move(a);
    validate(mu);
    out.push_back({"lattice_atoms(delta=" + format_short(delta) + ",R=" + format_short(R) + ",e=" + format_short(e) + ")",
                   name, e, std::move(mu)});
  } else if (name == "annuli") {
    std::vector<std::pair<double, double>> bands{{0.3, 0.6}};
    if (params.contains("bands")) bands = params.at("bands").get<std::vector<std::pair<double, double>>>();
    const double value = params.value("value", 1.0);
    for (const auto& [r1, r2] : bands) {
      MeasureSpec mu = GridDensityMeasure{{r1, r2}, {0.0}, {{value}, {value}}};
      validate(mu);
      out.push_back({"annulus(" + format_short(r1) + "," + format_short(r2) + ")", name, r1, std::move(mu)});
    }
  } else {
    throw ConfigError("unknown measure family \"" + name + "\"");
  }
  return out;
}

// --- config -----------------------------------------------------------------

inline void validate(const ExperimentConfig& c) {
  const auto& names = scenario_names();
  if (std::find(names.begin(), names.end(), c.scenario) == names.end())
    throw ConfigError("unknown scenario \"" + c.scenario + "\"");
  for (double d : c.deltas)
    if (!(d > 0.0)) throw ConfigError("deltas must be positive");
  for (int D : c.degrees)
    if (D < 0 || D > 1024) throw ConfigError("degrees must lie in [0, 1024]");
  if (c.scenario == "toeplitz-summing" && (!(c.p > 1.0) || !(c.r >= 1.0)))
    throw ConfigError("toeplitz-summing requires p > 1 and r >= 1");
  if (c.scenario == "carleson-summing" && (!(c.p >= 1.0 && c.p <= 2.0) || !(c.q >= 1.0 && c.q <= 2.0)))
    throw ConfigError("carleson-summing requires p, q in [1, 2]");
  if (c.scenario == "lemma24-equivalence") {
    for (double p : c.ps)
      if (!(p >= 1.0)) throw ConfigError("lemma24-equivalence requires every p >= 1");
    if (!(c.region_radius > 0.0)) throw ConfigError("regionRadius must be positive");
  }
  if (c.scenario == "forelli-rudin-asymptotics") {
    if (c.radii.size() < 2) throw ConfigError("forelli-rudin-asymptotics needs at least two radii");
    for (double r : c.radii)
      if (!(r > 0.0 && r < 1.0)) throw ConfigError("radii must lie in (0, 1)");
    for (const auto& [b, cc] : c.fr_pairs)
      if (!(b > -1.0)) throw ConfigError("Forelli-Rudin pairs need b > -1");
  }
  c.quadrature.validate();
}

inline ExperimentConfig config_from_json(const json& j) {
  ExperimentConfig c;
  try {
    c.scenario = j.value("scenario", c.scenario);
    c.p = j.value("p", c.p);
    c.q = j.value("q", c.q);
    c.r = j.value("r", c.r);
    if (j.contains("deltas")) c.deltas = j.at("deltas").get<std::vector<double>>();
    if (j.contains("degrees")) c.degrees = j.at("degrees").get<std::vector<int>>();
    if (j.contains("quadrature")) c.quadrature = scheme_from_json(j.at("quadrature"));
    c.seed = j.value("seed", c.seed);
    if (j.contains("output")) {
      const auto& o = j.at("output");
      if (o.is_string()) {
        c.output_dir = o.get<std::string>();
      } else {
        c.output_dir = o.value("dir", std::string());
        if (o.contains("formats")) c.formats = o.at("formats").get<std::vector<std::string>>();
      }
    }
    if (j.contains("ps")) c.ps = j.at("ps").get<std::vector<double>>();
    if (c.ps.empty()) c.ps = {c.p};
    c.region_radius = j.value("regionRadius", c.region_radius);
    if (j.contains("radii")) c.radii = j.at("radii").get<std::vector<double>>();
    if (j.contains("fr_pairs")) c.fr_pairs = j.at("fr_pairs").get<std::vector<std::pair<double, double>>>();
    c.points = j.value("points", c.points);
    if (j.contains("measures")) {
      for (const auto& m : j.at("measures")) {
        if (m.contains("family")) {
          auto fam = builtin_family(m.at("family").get<std::string>(), m);
          for (auto& e : fam) c.measures.push_back(std::move(e));
        } else {
          MeasureSpec mu = measure_from_json(m);
          const std::string id = m.value("id", measure_label(mu));
          c.measures.push_back({id, m.value("group", std::string("custom")), std::nan(""), std::move(mu)});
        }
      }
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  validate(c);
  return c;
}

// --- scenario runners ---------------------------------------------------------

namespace detail {

inline void set_ratios(Cell& c) {
  if (std::isfinite(c.rhs) && c.rhs > 0.0) {
    if (std::isfinite(c.lhs_lower)) c.ratio_low = c.lhs_lower / c.rhs;
    if (std::isfinite(c.lhs_upper)) c.ratio_high = c.lhs_upper / c.rhs;
  }
}

inline Cell base_cell(const ExperimentConfig& cfg, const MeasureEntry& m) {
  Cell c;
  c.scenario = cfg.scenario;
  c.measure = m.id;
  c.family = m.family;
  c.param = m.param;
  c.p = cfg.p;
  c.q = cfg.q;
  c.r = cfg.r;
  return c;
}

/// Lattices are shared across cells that use the same delta.
class LatticeCache {
 public:
  explicit LatticeCache(double region) : region_(region) {}
  const Lattice& get(double delta) {
    auto it = cache_.find(delta);
    if (it == cache_.end()) it = cache_.emplace(delta, generate_lattice(delta, region_, 1)).first;
    return it->second;
  }

 private:
  double region_;
  std::map<double, Lattice> cache_;
};

inline void toeplitz_cells(const ExperimentConfig& cfg, const MeasureEntry& m, std::vector<Cell>& out, LatticeCache& lats) {
  const double kappa = kappa_exponent(cfg.p, cfg.r);
  const Flagged rhs = lambda_lp_norm(sample_berezin(m.spec, cfg.quadrature), kappa);
  std::map<double, Flagged> uppers;
  for (int D : cfg.degrees) {
    const BasisSpec basis = build_basis(1, 0.0, D);
    const TruncatedOperator T = toeplitz_matrix(m.spec, basis);
    const double hs = hs_norm(T);
    for (double delta : cfg.deltas) {
      Cell c = base_cell(cfg, m);
      c.exponent = kappa;
      c.D = D;
      c.delta = delta;
      if (cfg.p == 2.0 && cfg.r == 2.0) {
        c.lhs_lower = hs;
        c.flags.push_back("exact-hilbert");
      } else {
        const Lattice& lat = lats.get(delta);
        const TestFamily fam = kernel_family(lat, cfg.p, basis);
        const DualSampler s = default_sampler(basis, cfg.p, true);
        c.lhs_lower = summing_lower_bound(T, fam, cfg.r, s, cfg.quadrature).lower;
        c.flags.push_back("sampled");
      }
      if (cfg.r >= cfg.p) {
        auto it = uppers.find(delta);
        if (it == uppers.end()) it = uppers.emplace(delta, order_bounded_upper(m.spec, cfg.p, delta, cfg.quadrature).upper).first;
        c.lhs_upper = it->second.or_inf();
      } else {
        c.lhs_upper = kInf;
        c.flags.push_back("no-upper");
      }
      c.rhs = rhs.or_inf();
      c.extras["hs"] = hs;
      if (rhs.infinite) c.flags.push_back("rhs-infinite");
      if (std::isinf(c.lhs_upper) && cfg.r >= cfg.p) c.flags.push_back("upper-infinite");
      const bool upper_inf = std::isinf(c.lhs_upper);
      if (cfg.r >= cfg.p) {
        if (rhs.infinite && upper_inf) c.flags.push_back("both-infinite");
        else if (rhs.infinite != upper_inf) c.flags.push_back("mismatch");
      }
      if (std::isfinite(c.lhs_upper) && c.lhs_lower > c.lhs_upper * (1.0 + 1e-8)) c.flags.push_back("sandwich-violation");
      set_ratios(c);
      out.push_back(std::move(c));
    }
  }
}

inline void carleson_cells(const ExperimentConfig& cfg, const MeasureEntry& m, std::vector<Cell>& out) {
  const Flagged s = s_exponent(cfg.p, cfg.q);
  std::optional<Flagged> crit;
  if (cfg.p > 1.0) crit = lemma31_criterion(m.spec, cfg.p, cfg.quadrature);
  std::map<double, Flagged> rhs;
  for (double delta : cfg.deltas) rhs.emplace(delta, carleson_snorm(m.spec, cfg.p, cfg.q, delta, cfg.quadrature));
  for (int D : cfg.degrees) {
    const double lhs = pi2_embedding_exact(m.spec, build_basis(1, 0.0, D));
    for (double delta : cfg.deltas) {
      Cell c = base_cell(cfg, m);
      c.exponent = s.or_inf();
      c.D = D;
      c.delta = delta;
      c.lhs_lower = lhs;
      c.lhs_upper = lhs;
      c.rhs = rhs.at(delta).or_inf();
      if (crit) c.extras["criterion"] = crit->or_inf();
      if (s.infinite) c.flags.push_back("s-infinite");
      if (std::isinf(c.rhs)) c.flags.push_back("rhs-infinite");
      set_ratios(c);
      out.push_back(std::move(c));
    }
  }
}

inline void lemma24_cells(const ExperimentConfig& cfg, const MeasureEntry& m, std::vector<Cell>& out, LatticeCache& lats) {
  const double rcut = std::tanh(cfg.region_radius);
  const QuadratureScheme region = cfg.quadrature.truncated(rcut);
  const auto berezin_region = sample_berezin(m.spec, region);
  const auto berezin_full = sample_berezin(m.spec, cfg.quadrature);
  for (double delta : cfg.deltas) {
    const Lattice& lat = lats.get(delta);
    const auto* atomic = std::get_if<AtomicMeasure>(&m.spec);
    std::optional<SampledFunction> avg_region, avg_full;
    if (!atomic) {
      avg_region = sample_averaged(m.spec, delta, region);
      avg_full = sample_averaged(m.spec, delta, cfg.quadrature);
    }
    for (double p : cfg.ps) {
      Cell c = base_cell(cfg, m);
      c.p = p;
      c.exponent = p;
      c.delta = delta;
      c.D = 0;
      const Flagged a = lambda_lp_norm(berezin_region, p);
      Flagged b, b_full;
      if (atomic) {
        b = flagged_root(atomic_averaged_integral(*atomic, delta, p, 2.0, cfg.quadrature, cfg.region_radius), p);
        b_full = flagged_root(atomic_averaged_integral(*atomic, delta, p, 2.0, cfg.quadrature), p);
      } else {
        b = lambda_lp_norm(*avg_region, p);
        b_full = lambda_lp_norm(*avg_full, p);
      }
      c.lhs_lower = a.or_inf();
      c.lhs_upper = b.or_inf();
      c.rhs = lattice_seq_norm(m.spec, lat, p, cfg.quadrature);
      c.extras["berezin_full"] = lambda_lp_norm(berezin_full, p).or_inf();
      c.extras["averaged_full"] = b_full.or_inf();
      c.extras["lattice_points"] = static_cast<double>(lat.points.size());
      c.extras["multiplicity"] = lat.multiplicity;
      if (std::isfinite(c.lhs_lower) && std::isfinite(c.lhs_upper) && c.lhs_upper > 0.0)
        c.extras["ratio_berezin_averaged"] = c.lhs_lower / c.lhs_upper;
      set_ratios(c);
      out.push_back(std::move(c));
    }
  }
}

inline void berezin_identity_cells(const ExperimentConfig& cfg, const MeasureEntry& m, std::vector<Cell>& out) {
  std::mt19937_64 gen(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const KernelParams kp{1, 0.0};
  double lo = kInf, hi = 0.0, worst = 0.0;
  for (int k = 0; k < cfg.points; ++k) {
    const double rad = 0.9 * std::sqrt(unif(gen));
    const double th = 2.0 * kPi * unif(gen);
    const BallPoint z(std::polar(rad, th));
    const double kzz = kernel_diag(kp, z);
    auto kz = [&](const BallPoint& w) { return kernel_eval(kp, w, z) / std::sqrt(kzz); };
    cplx lhs;
    if (const auto* a = std::get_if<AtomicMeasure>(&m.spec)) {
      lhs = toeplitz_apply(*a, kz, z, kp);
    } else {
      auto f = [&](const DiskNode& nd) {
        const BallPoint w(nd.z);
        return kz(w) * kernel_eval(kp, z, w) * detail::density_at(m.spec, nd);
      };
      lhs = integrate_ball(f, cfg.quadrature, z.first());
    }
    const double rhs = berezin(m.spec, z) * std::sqrt(kzz);
    const double ratio = lhs.real() / rhs;
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    worst = std::max(worst, std::abs(lhs - rhs) / rhs);
  }
  Cell c = base_cell(cfg, m);
  c.lhs_lower = lo;
  c.lhs_upper = hi;
  c.rhs = 1.0;
  c.extras["max_rel_error"] = worst;
  c.extras["points"] = cfg.points;
  set_ratios(c);
  out.push_back(std::move(c));
}

struct SlopeFit {
  double least_squares;
  double secant;
};

/// Growth exponent a in F ~ (1-|z|^2)^(-a): least-squares slope of log F
/// against log 1/(1-|z|^2), and the secant slope over the last two radii.
inline SlopeFit fit_growth(const std::vector<double>& radii, const std::vector<double>& values) {
  const std::size_t n = radii.size();
  std::vector<double> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    x[i] = -std::log((1.0 - radii[i]) * (1.0 + radii[i]));
    y[i] = std::log(values[i]);
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return {sxy / sxx, (y[n - 1] - y[n - 2]) / (x[n - 1] - x[n - 2])};
}

inline void forelli_rudin_cells(const ExperimentConfig& cfg, std::vector<Cell>& out) {
  const KernelParams kp{1, 0.0};
  for (const auto& [b, c] : cfg.fr_pairs) {
    std::vector<double> vals;
    bool infinite = false;
    for (double r : cfg.radii) {
      const Flagged v = forelli_rudin(b, c, kp, BallPoint(cplx(r, 0.0)), cfg.quadrature);
      infinite = infinite || v.infinite;
      vals.push_back(v.value);
    }
    Cell cell;
    cell.scenario = cfg.scenario;
    cell.measure = "forelli_rudin(b=" + format_short(b) + ",c=" + format_short(c) + ")";
    cell.family = "forelli-rudin";
    cell.p = cfg.p;
    cell.q = cfg.q;
    cell.r = cfg.r;
    cell.rhs = c - 2.0 - b;
    if (infinite) {
      cell.flags.push_back("divergent");
    } else {
      const SlopeFit fit = fit_growth(cfg.radii, vals);
      cell.exponent = fit.secant;
      cell.lhs_lower = fit.least_squares;
      cell.lhs_upper = fit.secant;
      for (std::size_t i = 0; i < vals.size(); ++i) cell.extras["value_at_" + format_short(cfg.radii[i])] = vals[i];
    }
    if (!(cell.rhs > 0.0)) cell.flags.push_back("bounded-regime");
    set_ratios(cell);
    out.push_back(std::move(cell));
  }
}

inline void summarize(ExperimentReport& rep) {
  std::map<std::pair<std::string, std::pair<double, double>>, FamilySummary> groups;
  std::map<std::string, std::vector<const Cell*>> by_measure;
  for (const auto& c : rep.cells) {
    auto key = std::make_pair(c.family, std::make_pair(c.p, c.r));
    auto& g = groups[key];
    g.family = c.family;
    g.p = c.p;
    g.r = c.r;
    if (!std::isnan(c.ratio_low)) g.min_ratio = std::isnan(g.min_ratio) ? c.ratio_low : std::min(g.min_ratio, c.ratio_low);
    const double high = std::isnan(c.ratio_high) ? c.ratio_low : c.ratio_high;
    if (!std::isnan(high)) g.max_ratio = std::isnan(g.max_ratio) ? high : std::max(g.max_ratio, high);
    for (const auto& f : c.flags) {
      if (f == "both-infinite") ++g.both_infinite;
      if (f == "mismatch") ++g.mismatched;
    }
    by_measure[c.measure + "|" + format_double(c.delta) + "|" + format_double(c.p)].push_back(&c);
  }
  for (const auto& [key, cells] : by_measure) {
    if (cells.size() < 2) continue;
    for (std::size_t i = 1; i < cells.size(); ++i) {
      const double a = cells[i - 1]->lhs_lower, b = cells[i]->lhs_lower;
      if (cells[i]->D == cells[i - 1]->D || !std::isfinite(a) || !std::isfinite(b) || b == 0.0) continue;
      auto& g = groups[std::make_pair(cells[i]->family, std::make_pair(cells[i]->p, cells[i]->r))];
      const double d = std::abs(b - a) / std::abs(b);
      g.max_convergence_delta = std::isnan(g.max_convergence_delta) ? d : std::max(g.max_convergence_delta, d);
    }
  }
  for (auto& [key, g] : groups) {
    if (!std::isnan(g.min_ratio) && g.min_ratio > 0.0 && !std::isnan(g.max_ratio)) g.envelope = g.max_ratio / g.min_ratio;
    rep.summary.push_back(g);
  }
}

}  // namespace detail

/// Runs every cell of the scenario; a numeric failure inside a cell is
/// recorded in its flags and the run continues.
inline ExperimentReport run_scenario(const ExperimentConfig& cfg) {
  validate(cfg);
  ExperimentReport rep;
  rep.scenario = cfg.scenario;
  rep.seed = cfg.seed;
  detail::LatticeCache lats(cfg.region_radius);
  if (cfg.scenario == "forelli-rudin-asymptotics") {
    detail::forelli_rudin_cells(cfg, rep.cells);
  } else {
    for (const auto& m : cfg.measures) {
      const std::size_t before = rep.cells.size();
      try {
        if (cfg.scenario == "toeplitz-summing") detail::toeplitz_cells(cfg, m, rep.cells, lats);
        else if (cfg.scenario == "carleson-summing") detail::carleson_cells(cfg, m, rep.cells);
        else if (cfg.scenario == "lemma24-equivalence") detail::lemma24_cells(cfg, m, rep.cells, lats);
        else detail::berezin_identity_cells(cfg, m, rep.cells);
      } catch (const NumericError& e) {
        rep.cells.resize(before);
        Cell c = detail::base_cell(cfg, m);
        c.flags.push_back(std::string("numeric-error: ") + e.what());
        rep.cells.push_back(std::move(c));
        ++rep.numeric_errors;
      }
    }
  }
  detail::summarize(rep);
  return rep;
}

// --- report output ---------------------------------------------------------------

inline json to_json(const Cell& c) {
  json extras = json::object();
  for (const auto& [k, v] : c.extras) extras[k] = real_to_json(v);
  return {{"scenario", c.scenario}, {"measure", c.measure}, {"family", c.family}, {"param", real_to_json(c.param)},
          {"p", c.p}, {"q", c.q}, {"r", c.r}, {"exponent", real_to_json(c.exponent)}, {"D", c.D},
          {"delta", real_to_json(c.delta)}, {"lhsLower", real_to_json(c.lhs_lower)},
          {"lhsUpper", real_to_json(c.lhs_upper)}, {"rhs", real_to_json(c.rhs)},
          {"ratioLow", real_to_json(c.ratio_low)}, {"ratioHigh", real_to_json(c.ratio_high)},
          {"flags", c.flags}, {"extras", extras}};
}

inline Cell cell_from_json(const json& j) {
  Cell c;
  c.scenario = j.at("scenario").get<std::string>();
  c.measure = j.at("measure").get<std::string>();
  c.family = j.at("family").get<std::string>();
  c.param = real_from_json(j.at("param"));
  c.p = j.at("p").get<double>();
  c.q = j.at("q").get<double>();
  c.r = j.at("r").get<double>();
  c.exponent = real_from_json(j.at("exponent"));
  c.D = j.at("D").get<int>();
  c.delta = real_from_json(j.at("delta"));
  c.lhs_lower = real_from_json(j.at("lhsLower"));
  c.lhs_upper = real_from_json(j.at("lhsUpper"));
  c.rhs = real_from_json(j.at("rhs"));
  c.ratio_low = real_from_json(j.at("ratioLow"));
  c.ratio_high = real_from_json(j.at("ratioHigh"));
  c.flags = j.at("flags").get<std::vector<std::string>>();
  for (const auto& [k, v] : j.at("extras").items()) c.extras[k] = real_from_json(v);
  return c;
}

inline json to_json(const ExperimentReport& rep) {
  json cells = json::array();
  for (const auto& c : rep.cells) cells.push_back(to_json(c));
  json summary = json::array();
  for (const auto& s : rep.summary) {
    summary.push_back({{"family", s.family}, {"p", s.p}, {"r", s.r}, {"minRatio", real_to_json(s.min_ratio)},
                       {"maxRatio", real_to_json(s.max_ratio)}, {"envelope", real_to_json(s.envelope)},
                       {"bothInfinite", s.both_infinite}, {"mismatched", s.mismatched},
                       {"maxConvergenceDelta", real_to_json(s.max_convergence_delta)}});
  }
  return {{"scenario", rep.scenario}, {"seed", rep.seed}, {"numericErrors", rep.numeric_errors},
          {"cells", cells}, {"summary", summary}};
}

inline ExperimentReport report_from_json(const json& j) {
  ExperimentReport rep;
  rep.scenario = j.at("scenario").get<std::string>();
  rep.seed = j.at("seed").get<std::uint64_t>();
  rep.numeric_errors = j.at("numericErrors").get<int>();
  for (const auto& c : j.at("cells")) rep.cells.push_back(cell_from_json(c));
  for (const auto& s : j.at("summary")) {
    FamilySummary f;
    f.family = s.at("family").get<std::string>();
    f.p = s.at("p").get<double>();
    f.r = s.at("r").get<double>();
    f.min_ratio = real_from_json(s.at("minRatio"));
    f.max_ratio = real_from_json(s.at("maxRatio"));
    f.envelope = real_from_json(s.at("envelope"));
    f.both_infinite = s.at("bothInfinite").get<int>();
    f.mismatched = s.at("mismatched").get<int>();
    f.max_convergence_delta = real_from_json(s.at("maxConvergenceDelta"));
    rep.summary.push_back(f);
  }
  return rep;
}

inline const char* csv_header() {
  return "scenario,measure,p,q,r,exponent,D,delta,lhs_lower,lhs_upper,rhs,ratio_low,ratio_high,flags";
}

namespace detail {

inline std::string csv_real(double v) { return std::isnan(v) ? std::string() : format_double(v); }

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

inline std::string file_safe(std::string s) {
  for (char& ch : s)
    if (!std::isalnum(static_cast<unsigned char>(ch)) && ch != '.' && ch != '-') ch = '_';
  return s;
}

}  // namespace detail

inline std::string report_csv(const ExperimentReport& rep) {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const auto& c : rep.cells) {
    std::string flags;
    for (std::size_t k = 0; k < c.flags.size(); ++k) flags += (k ? ";" : "") + c.flags[k];
    os << detail::csv_quote(c.scenario) << ',' << detail::csv_quote(c.measure) << ',' << format_double(c.p) << ','
       << format_double(c.q) << ',' << format_double(c.r) << ',' << detail::csv_real(c.exponent) << ',' << c.D << ','
       << detail::csv_real(c.delta) << ',' << detail::csv_real(c.lhs_lower) << ',' << detail::csv_real(c.lhs_upper)
       << ',' << detail::csv_real(c.rhs) << ',' << detail::csv_real(c.ratio_low) << ','
       << detail::csv_real(c.ratio_high) << ',' << detail::csv_quote(flags) << '\n';
  }
  return os.str();
}

/// Two-column series: ratio_low against D per measure, and ratio_low against
/// the family parameter at the largest D per (family, delta).
inline std::map<std::string, std::string> report_plotdata(const ExperimentReport& rep) {
  std::map<std::string, std::vector<std::pair<double, double>>> series;
  std::map<std::string, int> max_d;
  for (const auto& c : rep.cells) max_d[c.family] = std::max(max_d[c.family], c.D);
  for (const auto& c : rep.cells) {
    if (std::isnan(c.ratio_low)) continue;
    const std::string tag = detail::file_safe(c.family) + "__" + detail::file_safe(c.measure) + "__delta" +
                            detail::file_safe(format_short(c.delta)) + "__p" + detail::file_safe(format_short(c.p));
    series["ratio_vs_D__" + tag].push_back({static_cast<double>(c.D), c.ratio_low});
    if (!std::isnan(c.param) && c.D == max_d[c.family]) {
      const std::string ftag = detail::file_safe(c.family) + "__delta" + detail::file_safe(format_short(c.delta)) +
                               "__p" + detail::file_safe(format_short(c.p));
      series["ratio_vs_t__" + ftag].push_back({c.param, c.ratio_low});
    }
  }
  std::map<std::string, std::string> files;
  for (auto& [name, pts] : series) {
    std::stable_sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
    std::ostringstream os;
    for (const auto& [x, y] : pts) os << format_double(x) << ' ' << format_double(y) << '\n';
    files[name + ".dat"] = os.str();
  }
  return files;
}

/// Writes report.json, report.csv or plotdata/*.dat under `dir`; returns the paths.
inline std::vector<std::string> emit_report(const ExperimentReport& rep, const std::string& format, const std::string& dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<std::string> written;
  auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw ConfigError("emit_report: cannot write " + path.string());
    os << text;
    if (!os) throw ConfigError("emit_report: write failed for " + path.string());
    written.push_back(path.string());
  };
  if (format == "json") {
    write(fs::path(dir) / "report.json", to_json(rep).dump(2) + "\n");
  } else if (format == "csv") {
    write(fs::path(dir) / "report.csv", report_csv(rep));
  } else if (format == "plotdata") {
    const fs::path sub = fs::path(dir) / "plotdata";
    fs::create_directories(sub, ec);
    if (ec) throw ConfigError("emit_report: cannot create " + sub.string());
    for (const auto& [name, text] : report_plotdata(rep)) write(sub / name, text);
  } else {
    throw ConfigError("emit_report: unknown format \"" + format + "\"");
  }
  return written;
}

}  // namespace bergman
