// Acceptance run: one PASS/FAIL line per criterion; exit status is the number
// of failed criteria.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bergman/bergman.hpp"

using namespace bergman;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

int failures = 0;

void criterion(int id, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = limit_s <= 0.0 || secs < limit_s;
  const bool pass = o.pass && in_time;
  if (!pass) ++failures;
  std::printf("[%s] %2d %s: %s; %.2f s", pass ? "PASS" : "FAIL", id, name.c_str(), o.detail.c_str(), secs);
  if (limit_s > 0.0) std::printf(" (limit %g s%s)", limit_s, in_time ? "" : ", exceeded");
  std::printf("\n");
  std::fflush(stdout);
}

double oracle_berezin_atomic(const AtomicMeasure& a, cplx z) {
  double s = 0.0;
  const double d = 1.0 - std::norm(z);
  for (std::size_t k = 0; k < a.points.size(); ++k) {
    s += a.masses[k] * d * d / std::pow(std::norm(1.0 - z * std::conj(a.points[k].first())), 2);
  }
  return s;
}

std::vector<MeasureEntry> theorem_family() {
  std::vector<MeasureEntry> fam = builtin_family("radial-powers", {{"ts", {1.0, 2.0, 3.0}}});
  for (auto& m : builtin_family("single-atoms", {{"radii", {0.0, 0.6}}})) fam.push_back(std::move(m));
  for (auto& m : builtin_family("annuli", {{"bands", {{0.3, 0.6}}}})) fam.push_back(std::move(m));
  return fam;
}

bool radial_member(const MeasureEntry& m) { return is_rotation_invariant(m.spec); }

std::string slurp(const std::filesystem::path& p) {
  std::ifstream is(p, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  criterion(1, "Berezin identity T_mu(k_z)(z) = mu~(z) K(z,z)^(1/2)", 5.0, [] {
    std::mt19937_64 gen(20240601);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const KernelParams kp{1, 0.0};
    double worst = 0.0, worst_oracle = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      AtomicMeasure a;
      const int atoms = 1 + static_cast<int>(u(gen) * 12);
      for (int k = 0; k < atoms; ++k) {
        a.points.emplace_back(std::polar(0.97 * std::sqrt(u(gen)), 2.0 * kPi * u(gen)));
        a.masses.push_back(0.05 + 2.0 * u(gen));
      }
      const MeasureSpec mu = a;
      for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 10; ++j) {
          const cplx zc = std::polar(0.9 * (i + 1) / 5.0, 2.0 * kPi * j / 10.0);
          const BallPoint z(zc);
          const double kzz = kernel_diag(kp, z);
          auto kz = [&](const BallPoint& w) { return kernel_eval(kp, w, z) / std::sqrt(kzz); };
          const cplx lhs = toeplitz_apply(a, kz, z, kp);
          const double rhs = berezin(mu, z) * std::sqrt(kzz);
          const double oracle = oracle_berezin_atomic(a, zc) * std::sqrt(kzz);
          worst = std::max(worst, std::abs(lhs - rhs) / rhs);
          worst_oracle = std::max(worst_oracle, std::abs(lhs - oracle) / oracle);
        }
      }
    }
    const double w = std::max(worst, worst_oracle);
    return Outcome{w < 1e-9, "max rel err " + fmt("%.3g", w) + " over 20 measures x 50 points (tol 1e-9)"};
  });

  criterion(2, "fractional raise on kernel truncation matches binomial series", 1.0, [] {
    double worst = 0.0;
    for (double N : {0.5, 1.0, 3.0}) {
      for (double w : {0.3, 0.7}) {
        const HoloPoly f = kernel_truncation(KernelParams{1, 0.0}, BallPoint(cplx(w, 0.0)), 128);
        const HoloPoly g = apply_fractional(FractionalDirection::raise, N, f);
        // coefficients of (1 - z w)^(-(2 + N)) by the ratio recurrence
        double a = 1.0;
        for (int k = 0; k <= 128; ++k) {
          const auto pos = g.position(MultiIndex{k});
          const double got = pos ? g.coeffs[*pos].real() : 0.0;
          const double im = pos ? g.coeffs[*pos].imag() : 0.0;
          worst = std::max(worst, std::hypot(got - a, im) / a);
          a *= (2.0 + N + k) / (k + 1.0) * w;
        }
      }
    }
    return Outcome{worst < 1e-10, "max coefficient rel err " + fmt("%.3g", worst) + " (tol 1e-10)"};
  });

  criterion(3, "pi_2 embedding exactness at D = 400", 10.0, [] {
    const BasisSpec b = build_basis(1, 0.0, 400);
    double worst = 0.0;
    for (double r : {0.0, 0.2, 0.4, 0.6, 0.8}) {
      const MeasureSpec mu = AtomicMeasure{{BallPoint(std::polar(r, 0.7))}, {1.0}};
      const double exact = 1.0 / (1.0 - r * r);
      worst = std::max(worst, std::abs(pi2_embedding_exact(mu, b) - exact) / exact);
    }
    const double v = pi2_embedding_exact(RadialPowerMeasure{1.0, 1.0, 1}, b);
    const bool atoms_ok = worst < 1e-6;
    const bool weighted_ok = std::abs(v - 1.0) < 1e-4;
    return Outcome{atoms_ok && weighted_ok, "atoms max rel err " + fmt("%.3g", worst) + " (tol 1e-6, " +
                                                (atoms_ok ? "ok" : "fail") + "); (1-|z|^2)dv value " +
                                                fmt("%.6g", v) + " vs 1 (tol 1e-4, " +
                                                (weighted_ok ? "ok" : "fail") + ")"};
  });

  criterion(4, "Hilbert-Schmidt envelope at (p, r) = (2, 2)", 120.0, [] {
    ExperimentConfig cfg;
    cfg.scenario = "toeplitz-summing";
    cfg.measures = theorem_family();
    cfg.degrees = {256, 512};
    cfg.deltas = {1.0};
    const ExperimentReport rep = run_scenario(cfg);
    double lo = kInf, hi = 0.0, drift = 0.0;
    std::map<std::string, double> hs256;
    for (const auto& c : rep.cells) {
      if (c.D == 256) {
        lo = std::min(lo, c.ratio_low);
        hi = std::max(hi, c.ratio_low);
        hs256[c.measure] = c.lhs_lower;
      }
    }
    for (const auto& c : rep.cells) {
      if (c.D != 512) continue;
      for (const auto& m : cfg.measures)
        if (m.id == c.measure && radial_member(m))
          drift = std::max(drift, std::abs(c.lhs_lower - hs256[c.measure]) / c.lhs_lower);
    }
    const double env = hi / lo;
    return Outcome{std::isfinite(env) && env <= 10.0 && drift < 0.01,
                   "envelope " + fmt("%.4g", env) + " (<= 10), ratios in [" + fmt("%.4g", lo) + ", " +
                       fmt("%.4g", hi) + "], radial D=256 vs 512 drift " + fmt("%.3g", drift) + " (< 0.01)"};
  });

  criterion(5, "divergence coherence of rhs and order-bounded upper", 60.0, [] {
    ExperimentConfig cfg;
    cfg.scenario = "toeplitz-summing";
    cfg.measures = builtin_family("radial-powers", {{"ts", {0.0, 0.25, 1.0, 2.0, 3.0, 4.0, 5.0}}});
    cfg.degrees = {16};
    cfg.deltas = {1.0};
    const ExperimentReport rep = run_scenario(cfg);
    int wrong = 0, mismatched = 0;
    for (const auto& c : rep.cells) {
      const bool expect_inf = c.param < 0.5;
      const bool rhs_inf = std::isinf(c.rhs), up_inf = std::isinf(c.lhs_upper);
      if (rhs_inf != expect_inf || up_inf != expect_inf) ++wrong;
      for (const auto& f : c.flags) mismatched += f == "mismatch";
    }
    return Outcome{wrong == 0 && mismatched == 0 && rep.cells.size() == 7,
                   std::to_string(wrong) + " cells with the wrong divergence pattern, " + std::to_string(mismatched) +
                       " mismatched (t in {0, 0.25} infinite, t in 1..5 finite)"};
  });

  criterion(6, "three-way lattice equivalence within [1/5, 5]", 180.0, [] {
    ExperimentConfig cfg;
    cfg.scenario = "lemma24-equivalence";
    cfg.measures = theorem_family();
    cfg.ps = {4.0 / 3.0, 2.0, 4.0};
    cfg.deltas = {0.5, 1.0};
    const ExperimentReport rep = run_scenario(cfg);
    double lo = kInf, hi = 0.0, spread = 0.0;
    std::string worst;
    const int errors = rep.numeric_errors;
    const char* names[3] = {"berezin", "averaged", "lattice"};
    for (const auto& c : rep.cells) {
      const double v[3] = {c.lhs_lower, c.lhs_upper, c.rhs};
      for (int i = 0; i < 3; ++i)
        for (int j = i + 1; j < 3; ++j) {
          const double ratio = v[i] / v[j];
          lo = std::min(lo, ratio);
          hi = std::max(hi, ratio);
          if (std::abs(std::log(ratio)) > spread) {
            spread = std::abs(std::log(ratio));
            worst = c.measure + " p=" + fmt("%.4g", c.p) + " delta=" + fmt("%.3g", c.delta) + " " + names[i] + "/" +
                    names[j] + " " + fmt("%.4g", ratio);
          }
        }
    }
    const bool ok = errors == 0 && lo >= 0.2 && hi <= 5.0;
    return Outcome{ok, "pairwise ratios in [" + fmt("%.4g", lo) + ", " + fmt("%.4g", hi) + "] over " +
                           std::to_string(rep.cells.size()) + " cells; worst " + worst};
  });

  criterion(7, "Forelli-Rudin growth exponents within 5%", 30.0, [] {
    ExperimentConfig cfg;
    cfg.scenario = "forelli-rudin-asymptotics";
    const ExperimentReport rep = run_scenario(cfg);
    double worst = 0.0;
    std::string parts;
    for (const auto& c : rep.cells) {
      const double rel = std::abs(c.exponent - c.rhs) / c.rhs;
      worst = std::max(worst, std::isnan(rel) ? kInf : rel);
      parts += " " + c.measure + "=" + fmt("%.4f", c.exponent) + "/" + fmt("%.4g", c.rhs);
    }
    return Outcome{worst < 0.05 && rep.cells.size() == 3, "max rel err " + fmt("%.3g", worst) + " (tol 0.05);" + parts};
  });

  criterion(8, "Khinchine averages at 10^4 draws", 5.0, [] {
    std::vector<cplx> b;
    for (int k = 0; k < 24; ++k) b.push_back(std::polar(1.0 / (1.0 + k), 0.37 * k));
    const KhinchineReport r = khinchine_check(b, 10000, 7);
    const bool l2 = std::abs(r.mean_l2 - r.sum_b2) <= 3.0 * r.se_l2;
    const bool l1 = r.ratio_l1 >= r.l1_lower && r.ratio_l1 <= r.l1_upper;
    const bool l4 = r.ratio_l4 >= r.l4_lower && r.ratio_l4 <= r.l4_upper;
    return Outcome{l2 && l1 && l4, "l2 mean " + fmt("%.6g", r.mean_l2) + " vs " + fmt("%.6g", r.sum_b2) + " (se " +
                                       fmt("%.3g", r.se_l2) + "); l1 ratio " + fmt("%.4f", r.ratio_l1) + " in [" +
                                       fmt("%.4f", r.l1_lower) + ", " + fmt("%.4f", r.l1_upper) + "]; l4 ratio " +
                                       fmt("%.4f", r.ratio_l4) + " in [" + fmt("%.4f", r.l4_lower) + ", " +
                                       fmt("%.4f", r.l4_upper) + "]"};
  });

  criterion(9, "kappa and s selector table", 0.0, [] {
    struct Case {
      double p, r, kappa;
    };
    const std::vector<Case> table{
        {1.5, 3.0, 2.0},         {1.5, 1.0, 2.0},      {2.0, 1.0, 2.0},         {2.0, 2.0, 2.0},
        {2.0, 5.0, 2.0},         {4.0, 1.0, 4.0 / 3},  {4.0, 4.0 / 3, 4.0 / 3}, {4.0, 2.0, 2.0},
        {4.0, 4.0, 4.0},         {4.0, 7.0, 4.0},      {3.0, 1.5, 1.5},         {3.0, 2.5, 2.5},
    };
    int wrong = 0;
    for (const auto& c : table) wrong += kappa_exponent(c.p, c.r) != c.kappa;
    const bool s22 = s_exponent(2.0, 2.0).value == 1.0 && !s_exponent(2.0, 2.0).infinite;
    int s_wrong = 0;
    for (double q : {1.0, 1.5}) s_wrong += std::abs(s_exponent(1.0, q).value - 2.0 / (2.0 - q)) > 1e-15;
    return Outcome{wrong == 0 && s22 && s_wrong == 0, std::to_string(table.size() - wrong) + "/12 kappa cases exact, s(2,2) " +
                                                        (s22 ? "= 1" : "wrong") + ", s(1,q) " +
                                                        std::to_string(2 - s_wrong) + "/2"};
  });

  criterion(10, "lab verify is byte-deterministic", 0.0, [] {
    namespace fs = std::filesystem;
    const fs::path base = fs::temp_directory_path() / "bergman_acceptance_determinism";
    fs::remove_all(base);
    std::vector<std::string> csv;
    for (int run = 0; run < 2; ++run) {
      const fs::path dir = base / ("run" + std::to_string(run));
      const std::string cmd = std::string("\"") + LAB_BINARY + "\" --out \"" + dir.string() +
                              "\" --format csv --seed 11 verify --config \"" + DETERMINISM_CONFIG + "\" 2>/dev/null";
      if (std::system(cmd.c_str()) != 0) return Outcome{false, "lab verify exited with an error"};
      csv.push_back(slurp(dir / "report.csv"));
    }
    const bool same = csv[0] == csv[1] && !csv[0].empty();
    return Outcome{same, std::string(same ? "identical" : "different") + " CSV outputs (" +
                             std::to_string(csv[0].size()) + " bytes)"};
  });

  std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
