#pragma once

#include <memory>

#include <nlohmann/json.hpp>

#include "bifree/bnc.hpp"
#include "bifree/fock.hpp"
#include "bifree/moments.hpp"
#include "bifree/opalgebra.hpp"

namespace bifree {

using json = nlohmann::json;

// {"n": 3, "chi": "llr", "blocks": [[1,3],[2]]}
json to_json(const BncPartition& pi);
BncPartition partition_from_json(const json& j);
// [[1,3],[2]]
Blocks blocks_from_json(const json& j);
json blocks_to_json(const Blocks& b);

// {"d": 2, "re": [[..]], "im": [[..]]}; "im" may be omitted.
json to_json(const BElement& b);
BElement belement_from_json(const json& j);

// {"d": 2, "kraus": [BElement, ...]}
json to_json(const CPMap& eta);
CPMap cpmap_from_json(const json& j);

// [{"chi": "...", "partition": [[..]], "value": BElement}, ...]
json to_json(const PartitionTable& table);
PartitionTable table_from_json(const json& j);

// {"d": int, "left": [CPMap, ...], "right": [CPMap, ...]}
std::shared_ptr<FockModel> fock_model_from_json(const json& j);

}  // namespace bifree
