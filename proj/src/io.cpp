#include "knotnet/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "knotnet/errors.hpp"

namespace knotnet::io {

namespace {

void dump_into(std::ostringstream& os, const Json& j, int depth) {
  auto indent = [&](int d) { os << std::string(2 * d, ' '); };
  switch (j.type()) {
    case Json::value_t::number_float: {
      double v = j.get<double>();
      if (!std::isfinite(v)) {
        os << "null";
        break;
      }
      char buf[40];
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf;
      break;
    }
    case Json::value_t::array: {
      bool flat = std::all_of(j.begin(), j.end(), [](const Json& e) { return e.is_primitive(); });
      if (j.empty()) {
        os << "[]";
      } else if (flat) {
        os << '[';
        for (std::size_t i = 0; i < j.size(); ++i) {
          if (i) os << ", ";
          dump_into(os, j[i], depth + 1);
        }
        os << ']';
      } else {
        os << "[\n";
        for (std::size_t i = 0; i < j.size(); ++i) {
          indent(depth + 1);
          dump_into(os, j[i], depth + 1);
          os << (i + 1 < j.size() ? ",\n" : "\n");
        }
        indent(depth);
        os << ']';
      }
      break;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        break;
      }
      os << "{\n";
      std::size_t i = 0;
      for (auto it = j.begin(); it != j.end(); ++it, ++i) {
        indent(depth + 1);
        os << Json(it.key()).dump() << ": ";
        dump_into(os, it.value(), depth + 1);
        os << (i + 1 < j.size() ? ",\n" : "\n");
      }
      indent(depth);
      os << '}';
      break;
    }
    default:
      os << j.dump();
  }
}

template <class T>
T get(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) throw ValidationError(std::string("missing field '") + key + "'");
  try {
    return j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError(std::string("bad field '") + key + "': " + e.what());
  }
}

Json vec(const Vec& v) {
  Json a = Json::array();
  for (double x : v) a.push_back(x);
  return a;
}

SignVector parse_signs(const std::string& s) {
  SignVector out;
  for (char c : s) {
    if (c == '+') out.push_back(1);
    else if (c == '-') out.push_back(-1);
    else if (c == '0') out.push_back(0);
    else throw ValidationError("sign strings use '+', '-' and '0'");
  }
  return out;
}

Json piece(const AffinePiece& p) { return Json{{"w", vec(p.w)}, {"b", p.b}}; }

AffinePiece piece_from(const Json& j, int n) {
  AffinePiece p(get<Vec>(j, "w"), get<double>(j, "b"));
  if (p.dim() != n) throw DimensionMismatch("piece dimension differs from arrangement");
  return p;
}

}  // namespace

std::string dump(const Json& j) {
  std::ostringstream os;
  dump_into(os, j, 0);
  os << '\n';
  return os.str();
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw ValidationError("cannot parse '" + path + "': " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write '" + path + "'");
  out << text;
}

Json to_json(const ReluNetwork& net) {
  Json units = Json::array();
  for (const auto& u : net.units) units.push_back(Json{{"w", vec(u.w)}, {"b", u.b}, {"lambda", u.lambda}});
  return Json{{"n", net.n}, {"output_bias", net.output_bias}, {"units", units}};
}

ReluNetwork network_from_json(const Json& j) {
  ReluNetwork net;
  net.n = get<int>(j, "n");
  net.output_bias = j.contains("output_bias") ? get<double>(j, "output_bias") : 0.0;
  for (const auto& u : get<Json>(j, "units"))
    net.units.push_back({get<Vec>(u, "w"), get<double>(u, "b"), get<double>(u, "lambda")});
  net.validate();
  return net;
}

Json to_json(const Spline1D& s) {
  Json pieces = Json::array();
  for (const auto& p : s.pieces) pieces.push_back(Json{{"a", p.a}, {"b", p.b}});
  return Json{{"knots", vec(s.knots)}, {"pieces", pieces}};
}

Spline1D spline_from_json(const Json& j) {
  Spline1D s;
  s.knots = get<Vec>(j, "knots");
  for (const auto& p : get<Json>(j, "pieces")) s.pieces.push_back({get<double>(p, "a"), get<double>(p, "b")});
  s.validate();
  return s;
}

Json to_json(const BasisPlan& p) {
  Json j{{"kind", to_string(p.kind)}};
  j["anchor_knots"] = p.anchor_knots ? Json{p.anchor_knots->first, p.anchor_knots->second} : Json(nullptr);
  j["flipped_knots"] = p.flipped_knots;
  j["bidirectional_knots"] = p.bidirectional_knots;
  j["free_weight"] = p.free_weight;
  return j;
}

BasisPlan plan_from_json(const Json& j) {
  BasisPlan p;
  p.kind = basis_kind_from_string(get<std::string>(j, "kind"));
  if (j.contains("anchor_knots")) {
    if (j["anchor_knots"].is_null()) {
      p.anchor_knots.reset();
    } else {
      auto a = get<Vec>(j, "anchor_knots");
      if (a.size() != 2) throw ValidationError("anchor_knots needs two values");
      p.anchor_knots = std::make_pair(a[0], a[1]);
    }
  }
  if (j.contains("flipped_knots")) p.flipped_knots = get<std::vector<int>>(j, "flipped_knots");
  if (j.contains("bidirectional_knots")) p.bidirectional_knots = get<std::vector<int>>(j, "bidirectional_knots");
  if (j.contains("free_weight")) p.free_weight = get<double>(j, "free_weight");
  return p;
}

Json to_json(const Arrangement& a) {
  Json hs = Json::array(), rs = Json::array(), adj = Json::array();
  for (const auto& h : a.hyperplanes) hs.push_back(Json{{"id", h.id}, {"w", vec(h.w)}, {"b", h.b}});
  for (const auto& r : a.regions)
    rs.push_back(Json{{"signs", sign_string(r.signs)}, {"witness", vec(r.witness)}, {"radius", r.radius}});
  for (const auto& e : a.adjacency) adj.push_back(Json{e.r1, e.r2, a.hyperplanes[e.hyperplane].id});
  return Json{{"n", a.n}, {"hyperplanes", hs}, {"regions", rs}, {"adjacency", adj}};
}

Arrangement arrangement_from_json(const Json& j) {
  Arrangement a;
  a.n = get<int>(j, "n");
  if (a.n < 1) throw ValidationError("dimension must be positive");
  for (const auto& h : get<Json>(j, "hyperplanes")) {
    Vec w = get<Vec>(h, "w");
    if (static_cast<int>(w.size()) != a.n) throw DimensionMismatch("hyperplane dimension differs from n");
    if (!(norm2(w) > 0.0)) throw ValidationError("hyperplane with zero normal");
    a.hyperplanes.emplace_back(w, get<double>(h, "b"), get<int>(h, "id"));
  }
  for (const auto& r : get<Json>(j, "regions")) {
    Region reg;
    reg.signs = parse_signs(get<std::string>(r, "signs"));
    reg.witness = get<Vec>(r, "witness");
    reg.radius = get<double>(r, "radius");
    if (reg.signs.size() != a.hyperplanes.size()) throw ValidationError("sign vector length differs from hyperplane count");
    if (static_cast<int>(reg.witness.size()) != a.n) throw DimensionMismatch("witness dimension differs from n");
    for (std::size_t k = 0; k < a.hyperplanes.size(); ++k)
      if (static_cast<int>(side_of(a.hyperplanes[k], reg.witness)) != reg.signs[k] || reg.signs[k] == 0)
        throw ValidationError("region witness does not match its sign vector");
    a.regions.push_back(reg);
  }
  a.compute_groups();
  a.rebuild_index();
  a.compute_adjacency();
  return a;
}

Json to_json(const PiecewiseLinear& pl) {
  Json pieces = Json::array();
  for (const auto& p : pl.pieces) pieces.push_back(piece(p));
  return Json{{"arrangement", to_json(pl.arrangement)}, {"pieces", pieces}};
}

PiecewiseLinear piecewise_from_json(const Json& j) {
  PiecewiseLinear pl;
  pl.arrangement = arrangement_from_json(get<Json>(j, "arrangement"));
  for (const auto& p : get<Json>(j, "pieces")) pl.pieces.push_back(piece_from(p, pl.arrangement.n));
  if (pl.pieces.size() != pl.arrangement.regions.size()) throw ValidationError("need one piece per region");
  return pl;
}

Json to_json(const FitReport& r) {
  Json j{{"epsilon", r.epsilon}, {"z_max", r.z_max}, {"z_min", r.z_min}, {"samples", r.samples}};
  if (!r.loss_curve.empty()) j["loss_curve"] = vec(r.loss_curve);
  return j;
}

Json to_json(const AnalysisReport& r) {
  Json labels = Json::array();
  for (const auto& l : r.labels) {
    labels.push_back(Json{{"unit", l.unit},
                          {"class", to_string(l.cls)},
                          {"equivalence_group", l.equivalence_group ? Json(*l.equivalence_group) : Json(nullptr)},
                          {"redundant", l.redundant},
                          {"bidirectional_partner", l.bidirectional_partner ? Json(*l.bidirectional_partner) : Json(nullptr)},
                          {"positive_fraction", l.positive_fraction}});
  }
  Json orders = Json::array();
  for (const auto& o : r.forest.orders)
    orders.push_back(Json{{"chain", o.chain}, {"regions", o.ordered_regions}, {"initial", o.initial_region}});
  Json pieces = Json::array();
  for (std::size_t i = 0; i < r.pieces.pieces.size(); ++i) {
    Json p = piece(r.pieces.pieces[i]);
    p["signs"] = sign_string(r.pieces.arrangement.regions[i].signs);
    pieces.push_back(p);
  }
  return Json{{"labels", labels},
              {"orders", orders},
              {"trees", r.forest.trees},
              {"hub", r.forest.hub},
              {"uncovered", r.forest.uncovered},
              {"coverage", r.coverage.coverage},
              {"continuity", Json{{"max_jump", r.continuity.max_jump}, {"pairs", r.continuity.pairs}}},
              {"effective_units", r.effective_units},
              {"bidirectional_knots", r.bidirectional_knots},
              {"pieces", pieces}};
}

ScalarFn polynomial_from_json(const Json& j, int n) {
  if (j.contains("n") && get<int>(j, "n") != n) throw DimensionMismatch("polynomial dimension differs from --n");
  std::vector<PolyTerm> terms;
  for (const auto& t : get<Json>(j, "terms")) terms.push_back({get<double>(t, "coef"), get<std::vector<int>>(t, "powers")});
  return polynomial(std::move(terms), n);
}

Dataset read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty data file");
  int cols = 1;
  for (char c : line) cols += c == ',';
  if (cols < 2) throw ValidationError("data needs at least one input column and a target column");
  Dataset d;
  d.n = cols - 1;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::stringstream ss(line);
    std::string cell;
    Vec vals;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
      } catch (const std::exception&) {
        throw ValidationError("row " + std::to_string(row) + ": not a number '" + cell + "'");
      }
    }
    if (static_cast<int>(vals.size()) != cols) throw ValidationError("row " + std::to_string(row) + " has the wrong column count");
    d.targets.push_back(vals.back());
    vals.pop_back();
    d.inputs.push_back(vals);
  }
  d.validate();
  return d;
}

std::string to_csv(const Dataset& d) {
  std::ostringstream os;
  for (int i = 0; i < d.n; ++i) os << 'x' << i + 1 << ',';
  os << "z\n";
  char buf[40];
  for (std::size_t s = 0; s < d.size(); ++s) {
    for (double v : d.inputs[s]) {
      std::snprintf(buf, sizeof buf, "%.17g", v);
      os << buf << ',';
    }
    std::snprintf(buf, sizeof buf, "%.17g", d.targets[s]);
    os << buf << '\n';
  }
  return os.str();
}

}  // namespace knotnet::io
