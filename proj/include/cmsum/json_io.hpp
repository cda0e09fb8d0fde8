#pragma once

#include "cmsum/decomposition.hpp"
#include "cmsum/marginal.hpp"
#include "cmsum/oracle.hpp"

#include <json.hpp>

#include <string>

namespace cmsum {

using json = nlohmann::ordered_json;

//! Parses {"family": ..., parameters...}. Throws InvalidArgument on unknown families or bad fields.
Marginal marginal_from_json(const json& j);
json to_json(const Marginal& m);

json to_json(const CrossingPoint& c);
json to_json(const CrossingSet& s);
json to_json(const VarDecomposition& d);
json to_json(const TVarDecomposition& d);
json to_json(const StopLossDecomposition& d);
json to_json(const SingleCrossingStopLoss& s);
json to_json(const ComonotonicStopLoss& s);
json to_json(const SpreadReport& s);
json to_json(const ApproximationRow& r);
json to_json(const OracleReport& r);

OracleTarget target_from_string(const std::string& s);

//! Two-space indented dump. Doubles are written in shortest round-trip form.
std::string dump(const json& j);

} // namespace cmsum
