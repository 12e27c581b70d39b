#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "mwjoin/datagen.hpp"
#include "mwjoin/engine.hpp"
#include "mwjoin/machine.hpp"
#include "mwjoin/perfmodel.hpp"
#include "mwjoin/types.hpp"

namespace mwjoin {

// Relation CSV: header names the two roles ("A,B"), then one uint32,uint32
// row per tuple.
void write_relation_csv(const Relation& rel, std::ostream& out);
void write_relation_csv(const Relation& rel, const std::string& path);
Relation read_relation_csv(std::istream& in, std::string name = "");
Relation read_relation_csv(const std::string& path);

// Aggregate CSV: "a_value,count" header, rows sorted by a_value.
void write_aggregate_csv(const JoinAggregate& agg, std::ostream& out);
void write_aggregate_csv(const JoinAggregate& agg, const std::string& path);

// FNV-1a over a file's bytes, hex-encoded; used to report gen checksums.
std::string file_checksum(const std::string& path);

// JSON bindings (nlohmann ADL).
void to_json(nlohmann::json& j, const DataProfile& p);
void from_json(const nlohmann::json& j, DataProfile& p);
void to_json(nlohmann::json& j, const HashPlan& p);
void from_json(const nlohmann::json& j, HashPlan& p);
void to_json(nlohmann::json& j, const MachineConfig& c);
void from_json(const nlohmann::json& j, MachineConfig& c);
void to_json(nlohmann::json& j, const RunStats& s);
void from_json(const nlohmann::json& j, RunStats& s);
void to_json(nlohmann::json& j, const RuntimeEstimate& e);
void to_json(nlohmann::json& j, const LoopNode& n);

} // namespace mwjoin
