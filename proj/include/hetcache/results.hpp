#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "hetcache/config.hpp"
#include "hetcache/experiment.hpp"

namespace hetcache {

/// Column names, in output order.
const std::vector<std::string>& result_fields();

/// 12 significant digits, locale independent.
std::string format_csv_number(double v);

std::string results_to_csv(const std::vector<ResultRow>& rows);
/// Array of objects with the CSV keys; missing optionals become null. Full precision.
std::string results_to_json(const std::vector<ResultRow>& rows);
std::vector<ResultRow> results_from_json(const std::string& text);

/// CSV of placement matrices: policy,file,tier,p (file and tier 1-based).
std::string placements_to_csv(const std::vector<std::pair<std::string, PlacementMatrix>>& placements);
std::string placements_to_json(const std::vector<std::pair<std::string, PlacementMatrix>>& placements);

/// Writes to path, or to stdout when path is empty or "-". std::runtime_error on I/O failure.
void write_text(const std::string& text, const std::string& path);
void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path);

}  // namespace hetcache
