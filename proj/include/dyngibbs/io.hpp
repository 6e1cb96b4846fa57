#pragma once

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "inference.hpp"
#include "mrf.hpp"

namespace dyngibbs
{
using Json = nlohmann::json;

// Log-potentials are numbers or the string "-inf".

MrfInstance instance_from_json(const Json& doc);
Json instance_to_json(const MrfInstance& inst);
//! Parse an instance document; throws parse_error naming the field
MrfInstance parse_instance(std::istream& in);
MrfInstance parse_instance_file(const std::string& path);

UpdateBatch batch_from_json(const Json& doc, int q);
Json batch_to_json(const UpdateBatch& batch);
//! One batch per non-blank line; throws parse_error naming the line
std::vector<UpdateBatch> parse_update_stream(std::istream& in, int q);
std::vector<UpdateBatch> parse_update_stream_file(const std::string& path, int q);

//! Array of {"kind", "a", "b", "tau_b"} objects
std::vector<Query> parse_queries(std::istream& in);
std::vector<Query> parse_queries_file(const std::string& path);

}  // namespace dyngibbs
