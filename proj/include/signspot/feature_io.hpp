#pragma once

#include <string>

#include "signspot/corpus.hpp"

namespace signspot {

// FEAT container: magic "FEAT", u32 version=1, u32 rows, u32 dim, then
// rows*dim float32 little-endian row-major. No padding, no trailer.
FeatureSequence read_feature_file(const std::string& path);
void write_feature_file(const std::string& path, const FeatureSequence& features);

// Header-only validation (existence, magic, version, payload size).
void check_feature_file(const std::string& path);

}  // namespace signspot
