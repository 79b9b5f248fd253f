#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "roadseg/cascade.hpp"

namespace roadseg {

/// Text cascade format, version 1. Whitespace-separated tokens, one record per line:
///
///   roadseg-cascade 1
///   roi <w> <h>
///   config <key>=<value> ...            (training configuration echo)
///   stages <N>
///   stage <i> dimension <d> threshold <t> dr <DR_i> fpr <FPR_i> trees <T>
///   tree <alpha> <node count>
///   node <feature> <threshold> <left> <right> <leaf +1|-1>   (feature -1 for leaves)
///   end
///
/// Reals use the shortest decimal form that parses back to the same double,
/// so serialize(deserialize(text)) == text for any text this writer produced.
std::string serialize_cascade(const CascadeModel& model);
CascadeModel deserialize_cascade(std::string_view text);

void save_cascade(const std::filesystem::path& path, const CascadeModel& model);
CascadeModel load_cascade(const std::filesystem::path& path);

}  // namespace roadseg
