#pragma once

#include <string>

#include "json.hpp"

#include "knotnet/analyzer.hpp"
#include "knotnet/construct.hpp"
#include "knotnet/functions.hpp"
#include "knotnet/metrics.hpp"
#include "knotnet/network.hpp"
#include "knotnet/spline1d.hpp"
#include "knotnet/trainer.hpp"

namespace knotnet::io {

using Json = nlohmann::ordered_json;

// Pretty JSON with doubles at 17 significant digits.
std::string dump(const Json& j);

Json read_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

Json to_json(const ReluNetwork& net);
ReluNetwork network_from_json(const Json& j);

Json to_json(const Spline1D& s);
Spline1D spline_from_json(const Json& j);

Json to_json(const BasisPlan& p);
BasisPlan plan_from_json(const Json& j);

Json to_json(const Arrangement& a);
// Recomputes groups and adjacency and checks witnesses against their sign vectors.
Arrangement arrangement_from_json(const Json& j);

Json to_json(const PiecewiseLinear& pl);
PiecewiseLinear piecewise_from_json(const Json& j);

Json to_json(const FitReport& r);
Json to_json(const AnalysisReport& r);

// {"n": 2, "terms": [{"coef": c, "powers": [p1, p2]}]}
ScalarFn polynomial_from_json(const Json& j, int n);

Dataset read_csv(const std::string& path);
std::string to_csv(const Dataset& d);

}  // namespace knotnet::io
