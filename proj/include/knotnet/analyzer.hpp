#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "knotnet/geometry.hpp"
#include "knotnet/network.hpp"

namespace knotnet {

enum class UnitClass { Inactivated, UniversalGlobal, GlobalForOrder, LocalPositive, LocalNegative, Degenerate };

const char* to_string(UnitClass c);

struct AnalyzerConfig {
  double tau_dead = 0.001;    // l+ volume fraction at or below which a unit never fires
  double tau_global = 0.02;   // l0 volume fraction at or below which a unit fires everywhere
  int mc_samples = 20000;
  std::uint64_t seed = 0xA11CE;
  double match_tol = 1e-6;    // on normalized (w, b)
};

struct UnitLabel {
  int unit = 0;
  UnitClass cls = UnitClass::LocalPositive;
  std::optional<int> equivalence_group;  // lowest unit index of the group, when it has >= 2 members
  bool redundant = false;
  std::optional<int> bidirectional_partner;
  double positive_fraction = 0.0;
};

// Chains use unit indices as hyperplane ids and region indices of extract_pieces(net).
struct OrderForest {
  std::vector<StrictPartialOrder> orders;
  std::vector<std::vector<int>> trees;  // order indices per tree
  int hub = -1;
  std::vector<int> uncovered;
};

struct CoverageReport {
  std::vector<bool> determined;
  double coverage = 0.0;
  int rounds = 0;
};

struct AnalysisReport {
  std::vector<UnitLabel> labels;
  OrderForest forest;
  CoverageReport coverage;
  ContinuityReport continuity;
  PiecewiseLinear pieces;
  int effective_units = 0;
  std::vector<int> bidirectional_knots;  // units that carry a partner of opposite orientation
};

std::vector<UnitLabel> classify_units(const ReluNetwork& net, const AnalyzerConfig& cfg = {});

OrderForest detect_orders(const ReluNetwork& net, const AnalyzerConfig& cfg = {});
OrderForest detect_orders(const ReluNetwork& net, const PiecewiseLinear& pl, const std::vector<UnitLabel>& labels);

CoverageReport coverage_by_continuity(const ReluNetwork& net, const OrderForest& forest);
// Fixpoint of the continuity rules on any arrangement, starting from `seeds`.
CoverageReport continuity_fixpoint(const Arrangement& a, const std::vector<int>& seeds);

AnalysisReport analyze(const ReluNetwork& net, const AnalyzerConfig& cfg = {});

// n <= 2 only; throws ValidationError otherwise.
std::string render_svg(const ReluNetwork& net, const AnalysisReport& report);

}  // namespace knotnet
