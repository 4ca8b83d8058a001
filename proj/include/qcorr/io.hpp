#pragma once

#include <filesystem>
#include <vector>

#include "qcorr/encoding.hpp"

namespace qcorr::io {

// Loads a numeric array from .csv (one value per cell; N rows x N columns
// row-major for 2D) or .json (flat or nested arrays). Rejects NaN/Inf and
// non-numeric cells with errors naming the file and the violated rule.
// A CSV with a single row or single column (and a flat JSON array) loads as
// 1D; multiple rows must be square and load as 2D.
RawArray load_array(const std::filesystem::path& path);

// All .csv/.json files in the directory, sorted by filename.
std::vector<std::pair<std::string, RawArray>> load_array_directory(
    const std::filesystem::path& dir);

}  // namespace qcorr::io
