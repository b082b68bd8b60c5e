#pragma once

#include <string>

#include <json.hpp>

#include "klab/bounds.hpp"
#include "klab/kesten.hpp"
#include "klab/ld_blocks.hpp"
#include "klab/ld_lab.hpp"
#include "klab/ruin_lab.hpp"
#include "klab/tail_constants.hpp"

namespace klab {

/// Bumped on every change to the report layout.
inline constexpr const char* kReportSchemaVersion = "1.0.0";

/// JSON Schema of the run report.
nlohmann::json report_schema();

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const ConditionReport& r);
nlohmann::json to_json(const KestenProfile& p);
nlohmann::json to_json(const TailConstants& tc);
nlohmann::json to_json(const RatioCurve& c);
nlohmann::json to_json(const BlockDiagnostics& d);
nlohmann::json to_json(const RuinCurve& c);
nlohmann::json to_json(const DominanceReport& r);

/// Shortest round-trip decimal form.
std::string format_number(double v);

std::string ld_ratio_csv(const RatioCurve& c);
std::string ruin_csv(const RuinCurve& c);
std::string bounds_csv(const DominanceReport& r);
/// Columns: quantity, value, se.
std::string profile_csv(const KestenProfile& p);
std::string constants_csv(const KestenProfile& p, const TailConstants& tc);
/// Columns: quantity, value, se, pass.
std::string blocks_csv(const BlockDiagnostics& d);

}  // namespace klab
