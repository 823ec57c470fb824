#pragma once

#include <string>
#include <vector>

#include "vtolsim/csv.hpp"

namespace vtolsim {

/// Node ids present in a log header (from the n{i}_ column prefixes).
std::vector<int> nodesInLog(const CsvTable& table);

/// Validate a node selection against the log; throws naming the valid ids.
std::vector<int> resolveNodeSelection(const CsvTable& table, const std::vector<int>& requested);

/// Two projected views (x-y and x-z) of the leader and follower paths with
/// formation snapshots every 20 s of log time.
std::string renderTrajectorySvg(const CsvTable& table, const std::vector<int>& nodes);

/// Per-axis time series of the columns n{i}_<prefix>_{x,y,z}, one panel per
/// axis; used for the position- and velocity-error figures.
std::string renderSeriesSvg(const CsvTable& table, const std::vector<int>& nodes,
                            const std::string& prefix, const std::string& title,
                            const std::string& unit);

}  // namespace vtolsim
