#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bergman/bergman.hpp"

namespace {

using bergman::json;

struct Globals {
  std::string out;
  std::string format = "json";
  std::uint64_t seed = 1;
  int threads = 1;
  bool strict = false;
};

json read_json_arg(const std::string& arg) {
  std::string text = arg;
  if (!arg.empty() && arg.front() == '@') {
    std::ifstream is(arg.substr(1));
    if (!is) throw bergman::ConfigError("cannot open " + arg.substr(1));
    std::ostringstream ss;
    ss << is.rdbuf();
    text = ss.str();
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw bergman::ConfigError(std::string("invalid JSON: ") + e.what());
  }
}

std::vector<double> parse_point(const std::vector<double>& xs) {
  if (xs.empty() || xs.size() % 2 != 0) throw bergman::ConfigError("--z takes re im pairs");
  return xs;
}

bergman::BallPoint make_point(const std::vector<double>& xs) {
  std::vector<bergman::cplx> c;
  for (std::size_t k = 0; k < xs.size(); k += 2) c.emplace_back(xs[k], xs[k + 1]);
  return bergman::BallPoint(std::move(c));
}

void write_output(const Globals& g, const std::string& name, const std::string& text) {
  if (g.out.empty()) {
    std::cout << text;
    return;
  }
  std::filesystem::create_directories(g.out);
  const auto path = std::filesystem::path(g.out) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os) throw bergman::ConfigError("cannot write " + path.string());
  os << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Bergman-space Toeplitz and Carleson experiment lab"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--out", g.out, "Output directory (stdout when omitted)");
  app.add_option("--format", g.format, "json, csv or plotdata")->check(CLI::IsMember({"json", "csv", "plotdata"}));
  app.add_option("--seed", g.seed, "Seed for sampled quantities");
  app.add_option("--threads", g.threads, "Worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--strict", g.strict, "Exit with 3 when any cell hits a numeric error");

  std::string measure_arg, quad_arg;
  std::vector<double> zs{0.0, 0.0};
  double delta = 1.0, radius = 2.0, p = 2.0, q = 2.0;
  int degree = 64;
  bool dump = false;

  auto* berezin_cmd = app.add_subcommand("berezin", "Berezin transform of a measure at a point");
  berezin_cmd->add_option("--measure", measure_arg, "MeasureSpec JSON or @file")->required();
  berezin_cmd->add_option("--z", zs, "Point as re im [re im ...]")->expected(2, 64);

  auto* lattice_cmd = app.add_subcommand("lattice", "Generate a delta-lattice of a hyperbolic disc");
  lattice_cmd->add_option("--delta", delta)->check(CLI::PositiveNumber);
  lattice_cmd->add_option("--radius", radius, "Bergman radius of the region")->check(CLI::PositiveNumber);

  auto* toeplitz_cmd = app.add_subcommand("toeplitz", "Truncated Toeplitz matrix norms");
  toeplitz_cmd->add_option("--measure", measure_arg)->required();
  toeplitz_cmd->add_option("--degree", degree)->check(CLI::Range(0, 1024));
  toeplitz_cmd->add_flag("--dump-matrix", dump, "Include the matrix entries");

  auto* carleson_cmd = app.add_subcommand("carleson", "Embedding norm against the Carleson s-norm");
  carleson_cmd->add_option("--measure", measure_arg)->required();
  carleson_cmd->add_option("--p", p);
  carleson_cmd->add_option("--q", q);
  carleson_cmd->add_option("--delta", delta)->check(CLI::PositiveNumber);
  carleson_cmd->add_option("--degree", degree)->check(CLI::Range(0, 1024));

  std::string config_path;
  auto* verify_cmd = app.add_subcommand("verify", "Run a scenario config and emit its report");
  verify_cmd->add_option("--config", config_path)->required()->check(CLI::ExistingFile);

  std::string family_name, family_params = "{}";
  auto* family_cmd = app.add_subcommand("family", "List the measures of a builtin family");
  family_cmd->add_option("--name", family_name)->required();
  family_cmd->add_option("--params", family_params, "Family parameters as JSON or @file");

  for (auto* sub : {berezin_cmd, toeplitz_cmd, carleson_cmd})
    sub->add_option("--quadrature", quad_arg, "QuadratureScheme JSON or @file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    bergman::set_num_threads(g.threads);
    const bergman::QuadratureScheme scheme =
        quad_arg.empty() ? bergman::QuadratureScheme{} : bergman::scheme_from_json(read_json_arg(quad_arg));

    if (*berezin_cmd) {
      const auto mu = bergman::measure_from_json(read_json_arg(measure_arg));
      const auto z = make_point(parse_point(zs));
      const bergman::KernelParams kp{z.dim(), 0.0};
      const double v = bergman::berezin(mu, z, kp, scheme);
      json j = {{"z", bergman::point_to_json(z)}, {"berezin", bergman::real_to_json(v)}};
      write_output(g, "berezin.json", j.dump(2) + "\n");
    } else if (*lattice_cmd) {
      const auto lat = bergman::generate_lattice(delta, radius);
      write_output(g, "lattice.json", bergman::to_json(lat).dump(2) + "\n");
    } else if (*toeplitz_cmd) {
      const auto mu = bergman::measure_from_json(read_json_arg(measure_arg));
      const auto basis = bergman::build_basis(bergman::measure_dim(mu), 0.0, degree);
      const auto T = bergman::toeplitz_matrix(mu, basis);
      json j = {{"D", degree}, {"size", basis.size()}, {"hs", bergman::hs_norm(T)}, {"op", bergman::op_norm(T)}};
      if (dump) {
        json rows = json::array();
        for (Eigen::Index i = 0; i < T.matrix.rows(); ++i) {
          json row = json::array();
          for (Eigen::Index k = 0; k < T.matrix.cols(); ++k) row.push_back({T.matrix(i, k).real(), T.matrix(i, k).imag()});
          rows.push_back(row);
        }
        j["matrix"] = rows;
      }
      write_output(g, "toeplitz.json", j.dump(2) + "\n");
    } else if (*carleson_cmd) {
      const auto mu = bergman::measure_from_json(read_json_arg(measure_arg));
      const double lhs = bergman::pi2_embedding_exact(mu, bergman::build_basis(1, 0.0, degree));
      const auto s = bergman::s_exponent(p, q);
      const auto rhs = bergman::carleson_snorm(mu, p, q, delta, scheme);
      json j = {{"p", p}, {"q", q}, {"delta", delta}, {"D", degree}, {"s", bergman::real_to_json(s.or_inf())},
                {"pi2", lhs}, {"snorm", bergman::real_to_json(rhs.or_inf())}};
      write_output(g, "carleson.json", j.dump(2) + "\n");
    } else if (*verify_cmd) {
      json cfg_json = read_json_arg("@" + config_path);
      auto cfg = bergman::config_from_json(cfg_json);
      if (app.count("--seed") > 0) cfg.seed = g.seed;
      const auto rep = bergman::run_scenario(cfg);
      const std::string dir = !g.out.empty() ? g.out : cfg.output_dir;
      std::vector<std::string> formats = cfg.formats;
      if (app.count("--format") > 0 || formats.empty()) formats = {g.format};
      if (dir.empty()) {
        for (const auto& f : formats) {
          if (f == "json") std::cout << bergman::to_json(rep).dump(2) << "\n";
          else if (f == "csv") std::cout << bergman::report_csv(rep);
          else
            for (const auto& [name, text] : bergman::report_plotdata(rep)) std::cout << "# " << name << "\n" << text;
        }
      } else {
        for (const auto& f : formats)
          for (const auto& path : bergman::emit_report(rep, f, dir)) std::cerr << "wrote " << path << "\n";
      }
      if (g.strict && rep.numeric_errors > 0) {
        std::cerr << rep.numeric_errors << " cell(s) hit numeric errors\n";
        return 3;
      }
    } else if (*family_cmd) {
      json list = json::array();
      for (const auto& m : bergman::builtin_family(family_name, read_json_arg(family_params))) {
        json e = bergman::to_json(m.spec);
        e["id"] = m.id;
        list.push_back(e);
      }
      write_output(g, "family.json", list.dump(2) + "\n");
    }
  } catch (const bergman::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const bergman::NumericError& e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return g.strict ? 3 : 1;
  }
  return 0;
}
