#pragma once

#include <idest/core.h>
#include <idest/manifolds.h>

#include <json.hpp>

#include <iosfwd>
#include <string>

namespace idest {

/// Shortest decimal string that parses back to the same double; '.' separator
/// regardless of locale.
std::string formatDouble(double v);

/// Locale-independent parse of a whole cell. Returns false on any trailing garbage.
bool parseDouble(std::string_view cell, double& out);

/// One row per point, comma separated. A first row holding any non-numeric
/// cell is taken as a header. Throws DataError on empty input, ragged rows,
/// non-numeric or non-finite cells.
PointCloud readPointCloudCsv(std::istream& in, std::string label = {});
PointCloud readPointCloudCsv(const std::string& path);

/// Writes p columns per row; `header` adds x0..x{p-1}.
void writePointCloudCsv(std::ostream& out, const PointCloud& cloud, bool header = false);

nlohmann::json specToJson(const ManifoldSpec& spec);
ManifoldSpec specFromJson(const nlohmann::json& j);

/// EstimateReport <-> JSON. Doubles round-trip exactly.
nlohmann::json reportToJson(const EstimateReport& report);
EstimateReport reportFromJson(const nlohmann::json& j);

nlohmann::json configToJson(const MethodConfig& cfg);

} // namespace idest
