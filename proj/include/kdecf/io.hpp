#pragma once

#include "kdecf/bounds.hpp"
#include "kdecf/charfun.hpp"
#include "kdecf/estimator.hpp"
#include "kdecf/risk.hpp"
#include "kdecf/selector.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace kdecf::io {

using nlohmann::json;

/// Shortest decimal representation that round-trips.
std::string num(double v);

/// One numeric column; a non-numeric first line is taken as a header, blank
/// lines and lines starting with '#' are skipped. Throws ConfigError naming
/// the path when the file is unreadable or malformed.
Sample read_sample_csv(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory, then renames.
void write_atomic(const std::filesystem::path& path, std::string_view content);

struct DensitySpec {
    std::string name;
    std::map<std::string, std::vector<double>> params;
};

/// "name" or "name:key=v,key=v1|v2"; list values are separated by '|'.
DensitySpec parse_density_spec(std::string_view text);

std::string grid_csv(const EstimateGrid& g);
json grid_sidecar(const EstimateGrid& g, std::size_t n);

json to_json(const RiskReport& r);
json to_json(const SelectorResult& r);
json to_json(const BoundResult& r);

struct BoundRow {
    BoundResult bound;
    std::optional<double> exact;
};

/// theorem_id,kind,h_n,n,bound,exact,ratio,applicable
std::string bound_table_csv(const std::vector<BoundRow>& rows);

} // namespace kdecf::io
