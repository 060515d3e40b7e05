#pragma once

#include "optidesign/criteria.hpp"
#include "optidesign/fit.hpp"
#include "optidesign/search.hpp"
#include "optidesign/simulate.hpp"

#include <json.hpp>

namespace optidesign {

nlohmann::json to_json(const FitResult& fit);
nlohmann::json to_json(const ConditionalFit& cf);
nlohmann::json to_json(const CriterionValue& cv);
nlohmann::json to_json(const EfficiencyReport& er);
nlohmann::json to_json(const EllipseDescriptor& e);
nlohmann::json to_json(const DesignOutcome& outcome);
nlohmann::json to_json(const SimulationReport& report, bool include_per_sim = false);
nlohmann::json to_json(const PairedComparison& cmp);

}  // namespace optidesign
