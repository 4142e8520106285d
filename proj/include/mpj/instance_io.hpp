// instance_io.hpp
//
// JSON form of instances and transcripts. Vertices are 1-based on disk:
//   {"n":4,"k":3,"variant":"mpj","i":2,"layers":[[1,3,2,4]],"x":"0101"}
// Layers are listed f_2 first; the hat variant has no "x".
#pragma once

#include "mpj/nof_sim.hpp"

#include <json.hpp>

namespace mpj {

nlohmann::json instance_to_json(const Instance& inst);
/// Throws ValidationError on a malformed document or an invalid instance.
Instance instance_from_json(const nlohmann::json& doc);

Instance read_instance(const std::string& path);
void write_instance(const std::string& path, const Instance& inst);

nlohmann::json transcript_to_json(const Transcript& t, Variant variant);

}  // namespace mpj
