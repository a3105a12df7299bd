#pragma once

// JSON views of the result types; arcs carry 40-significant-digit decimal
// strings so circle points survive interchange.

#include <json.hpp>

#include "lab/blockseq.hpp"
#include "lab/divergence.hpp"
#include "lab/levelset.hpp"

namespace ergolab {

nlohmann::json to_json(const CircleArc& arc);
nlohmann::json to_json(const LevelSet& ls);
nlohmann::json to_json(const DecompositionResult& d);
nlohmann::json to_json(const WitnessResult& w);
nlohmann::json to_json(const CriterionReport& r);
nlohmann::json to_json(const StageReport& r);
nlohmann::json to_json(const WeakScanResult& r);

}  // namespace ergolab
