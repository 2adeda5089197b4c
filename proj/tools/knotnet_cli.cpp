#include <cmath>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "knotnet/io.hpp"
#include "knotnet/rng.hpp"

using namespace knotnet;
namespace kio = knotnet::io;

namespace {

const char* kFormats = R"(File formats:
  network   {"n", "output_bias", "units": [{"w": [...], "b", "lambda"}]}
  spline    {"knots": [...], "pieces": [{"a", "b"}]}
  plan      {"kind", "anchor_knots": [x-1, x0] | null, "flipped_knots": [...],
             "bidirectional_knots": [...], "free_weight"}   (knot indices 1-based)
  target    {"arrangement": {"n", "hyperplanes": [{"id", "w", "b"}],
             "regions": [{"signs": "+-..", "witness", "radius"}], "adjacency": [[i, j, id]]},
             "pieces": [{"w": [...], "b"}]}
  report    {"epsilon", "z_max", "z_min", "samples"[, "loss_curve"]}
  data CSV  header x1,...,xn,z then one sample per row
  file:expr.json  {"n": 2, "terms": [{"coef": c, "powers": [p1, p2]}]}
Exit codes: 0 success, 1 invalid input, 2 numeric failure.)";

std::vector<int> parse_counts(const std::string& s) {
  std::vector<int> out;
  std::stringstream ss(s);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      out.push_back(std::stoi(cell));
    } catch (const std::exception&) {
      throw ValidationError("bad grid size '" + cell + "'");
    }
  }
  if (out.empty()) throw ValidationError("empty grid size");
  return out;
}

ScalarFn resolve_fn(const std::string& name, int n) {
  if (name.rfind("file:", 0) == 0) return kio::polynomial_from_json(kio::read_json_file(name.substr(5)), n);
  return builtin_function(name);
}

BasisPlan default_plan(BasisKind kind, const Spline1D& s) {
  BasisPlan p;
  p.kind = kind;
  const int nk = static_cast<int>(s.knots.size());
  if (kind != BasisKind::OneSided && nk < 1) throw ValidationError("two-sided bases need at least one knot");
  switch (kind) {
    case BasisKind::OneSided: break;
    case BasisKind::TwoSidedAdded: p.bidirectional_knots = {1}; break;
    case BasisKind::TwoSidedSubstituted: p.flipped_knots = {1}; break;
    case BasisKind::TwoSidedCompound:
      if (nk < 2) throw ValidationError("compound default plan needs two knots");
      p.flipped_knots = {1};
      p.bidirectional_knots = {2};
      break;
  }
  return p;
}

void emit(const std::string& path, const kio::Json& j) {
  if (path.empty() || path == "-")
    std::cout << kio::dump(j);
  else
    kio::write_text_file(path, kio::dump(j));
}

Vec uniform_point(SplitMix64& rng, int n) {
  Vec x(n);
  for (double& v : x) v = rng.uniform();
  return x;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Constructs, trains and explains two-layer ReLU networks."};
  app.footer(kFormats);
  app.require_subcommand(1);

  std::string spline_path, basis = "one-sided", plan_path, out, report_path, target_path, grid, fn, data_path, net_path,
                           svg_path;
  int n = 2, units = 9, steps = 10000, samples = 10000, lattice = 0;
  double lr = 0.002, step = 0.1;
  std::uint64_t seed = 0;
  bool output_bias = false;
  std::vector<std::string> points;

  auto* compile = app.add_subcommand("compile-spline1d", "Compile a 1D linear spline into a network");
  compile->add_option("--spline", spline_path, "Spline JSON")->required();
  compile->add_option("--basis", basis, "one-sided | added | substituted | compound")->capture_default_str();
  compile->add_option("--plan", plan_path, "Basis plan JSON (default: flip or split knot 1)");
  compile->add_option("--out", out, "Network JSON (stdout when omitted)");

  auto* construct = app.add_subcommand("construct", "Realize a piecewise linear target on an axis grid");
  construct->add_option("--grid", grid, "Cells per axis, M or M1,M2,...")->required();
  construct->add_option("--n", n, "Input dimension")->required();
  construct->add_option("--target", target_path, "Target JSON")->required();
  construct->add_option("--out", out, "Network JSON");

  auto* approximate = app.add_subcommand("approximate", "Grid approximation of a smooth function");
  approximate->add_option("--fn", fn, "poly | poly16 | sinsum | quad | file:expr.json")->required();
  approximate->add_option("--M", grid, "Cells per axis, M or M1,M2,...")->required();
  approximate->add_option("--n", n, "Input dimension")->capture_default_str();
  approximate->add_option("--samples", lattice, "Lattice points per axis for the report (default 101, 21 for n=3)");
  approximate->add_option("--out", out, "Network JSON");
  approximate->add_option("--report", report_path, "Fit report JSON");

  auto* make_data = app.add_subcommand("make-data", "Sample a builtin function on a lattice");
  make_data->add_option("--fn", fn, "poly16 | sinsum | quad | file:expr.json")->required();
  make_data->add_option("--n", n, "Input dimension")->capture_default_str();
  make_data->add_option("--step", step, "Lattice spacing; must divide 1")->capture_default_str();
  make_data->add_option("--out", out, "CSV path (stdout when omitted)");

  auto* train_cmd = app.add_subcommand("train", "Full-batch gradient descent from a seeded uniform init");
  train_cmd->add_option("--data", data_path, "Data CSV")->required();
  train_cmd->add_option("--units", units)->capture_default_str();
  train_cmd->add_option("--lr", lr)->capture_default_str();
  train_cmd->add_option("--steps", steps)->capture_default_str();
  train_cmd->add_option("--seed", seed)->capture_default_str();
  train_cmd->add_flag("--output-bias", output_bias, "Also train an output bias");
  train_cmd->add_option("--out", out, "Network JSON");
  train_cmd->add_option("--report", report_path, "Fit report JSON");

  auto* analyze_cmd = app.add_subcommand("analyze", "Unit taxonomy, strict partial orders and coverage");
  analyze_cmd->add_option("--net", net_path, "Network JSON")->required();
  analyze_cmd->add_option("--report", report_path, "Analysis JSON (stdout when omitted)");
  analyze_cmd->add_option("--svg", svg_path, "Diagram, n <= 2");

  auto* verify = app.add_subcommand("verify", "Compare a network with a spline, target, data set or function");
  verify->add_option("--net", net_path, "Network JSON")->required();
  auto* vt = verify->add_option("--target", target_path, "Spline JSON, target JSON or data CSV");
  auto* vf = verify->add_option("--fn", fn, "Builtin function or file:expr.json");
  vt->excludes(vf);
  verify->add_option("--samples", samples)->capture_default_str();
  verify->add_option("--seed", seed)->capture_default_str();

  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a network at points");
  eval_cmd->add_option("--net", net_path, "Network JSON")->required();
  eval_cmd->add_option("--x", points, "Comma-separated point; repeatable")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*compile) {
      Spline1D s = kio::spline_from_json(kio::read_json_file(spline_path));
      BasisKind kind = basis_kind_from_string(basis);
      BasisPlan plan = plan_path.empty() ? default_plan(kind, s) : kio::plan_from_json(kio::read_json_file(plan_path));
      if (!plan_path.empty() && plan.kind != kind) throw ValidationError("--basis disagrees with the plan's kind");
      ReluNetwork net = kind == BasisKind::OneSided && plan.anchor_knots ? compile_one_sided(s, *plan.anchor_knots)
                                                                         : compile_two_sided(s, plan);
      emit(out, kio::to_json(net));
    } else if (*construct) {
      GridSpec g = make_grid(n, parse_counts(grid));
      PiecewiseLinear target = kio::piecewise_from_json(kio::read_json_file(target_path));
      emit(out, kio::to_json(realize_grid(g, target)));
    } else if (*approximate) {
      GridSpec g = make_grid(n, parse_counts(grid));
      auto [net, rep] = approximate_c1(resolve_fn(fn, n), g, lattice);
      emit(out, kio::to_json(net));
      if (!report_path.empty()) emit(report_path, kio::to_json(rep));
    } else if (*make_data) {
      Dataset d = make_dataset(resolve_fn(fn, n), n, step);
      if (out.empty() || out == "-")
        std::cout << kio::to_csv(d);
      else
        kio::write_text_file(out, kio::to_csv(d));
    } else if (*train_cmd) {
      Dataset d = kio::read_csv(data_path);
      TrainConfig cfg;
      cfg.units = units;
      cfg.lr = lr;
      cfg.steps = steps;
      cfg.seed = seed;
      cfg.output_bias = output_bias;
      try {
        auto [net, rep] = train(d, cfg);
        emit(out, kio::to_json(net));
        if (!report_path.empty()) emit(report_path, kio::to_json(rep));
      } catch (const TrainDiverged& e) {
        if (!report_path.empty()) {
          kio::Json j = kio::to_json(e.partial());
          j["diverged_at_step"] = e.step();
          emit(report_path, j);
        }
        throw;
      }
    } else if (*analyze_cmd) {
      ReluNetwork net = kio::network_from_json(kio::read_json_file(net_path));
      AnalysisReport rep = analyze(net);
      emit(report_path, kio::to_json(rep));
      if (!svg_path.empty()) kio::write_text_file(svg_path, render_svg(net, rep));
    } else if (*verify) {
      ReluNetwork net = kio::network_from_json(kio::read_json_file(net_path));
      Vec z, zhat;
      if (!target_path.empty() && target_path.size() > 4 && target_path.substr(target_path.size() - 4) == ".csv") {
        Dataset d = kio::read_csv(target_path);
        if (d.n != net.n) throw DimensionMismatch("data dimension differs from the network");
        for (std::size_t i = 0; i < d.size(); ++i) {
          z.push_back(d.targets[i]);
          zhat.push_back(eval(net, d.inputs[i]));
        }
      } else {
        std::function<double(const Vec&)> f;
        int dim = net.n;
        if (!target_path.empty()) {
          kio::Json j = kio::read_json_file(target_path);
          if (j.contains("knots")) {
            auto s = std::make_shared<Spline1D>(kio::spline_from_json(j));
            dim = 1;
            f = [s](const Vec& x) { return (*s)(x[0]); };
          } else {
            auto pl = std::make_shared<PiecewiseLinear>(kio::piecewise_from_json(j));
            dim = pl->arrangement.n;
            f = [pl](const Vec& x) { return (*pl)(x); };
          }
        } else if (!fn.empty()) {
          f = resolve_fn(fn, net.n);
        } else {
          throw ValidationError("verify needs --target or --fn");
        }
        if (dim != net.n) throw DimensionMismatch("target dimension differs from the network");
        if (samples < 1) throw ValidationError("--samples must be positive");
        SplitMix64 rng(seed);
        for (int i = 0; i < samples; ++i) {
          Vec x = uniform_point(rng, net.n);
          z.push_back(f(x));
          zhat.push_back(eval(net, x));
        }
      }
      double max_err = 0.0;
      for (std::size_t i = 0; i < z.size(); ++i) max_err = std::fmax(max_err, std::fabs(z[i] - zhat[i]));
      kio::Json j{{"samples", static_cast<int>(z.size())}, {"max_abs_err", max_err}};
      try {
        j["epsilon"] = relative_error(z, zhat);
      } catch (const ConstantTargets&) {
        j["epsilon"] = nullptr;
      }
      std::cout << kio::dump(j);
    } else if (*eval_cmd) {
      ReluNetwork net = kio::network_from_json(kio::read_json_file(net_path));
      for (const auto& p : points) {
        Vec x;
        std::stringstream ss(p);
        std::string cell;
        while (std::getline(ss, cell, ',')) x.push_back(std::stod(cell));
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.17g", eval(net, x));
        std::cout << buf << '\n';
      }
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: bad number: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
