#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "sbpg/plant/plant.hpp"
#include "sbpg/train/trainer.hpp"

namespace sbpg::train {

/// Column names identify reservoirs and players.
struct TraceLayout {
  std::vector<std::string> reservoirs;  // finite reservoirs
  std::vector<std::string> players;
};

TraceLayout trace_layout(const plant::PlantConfig& config);

void write_trace_header(std::ostream& out, const TraceLayout& layout);
/// Doubles are written in shortest round-trip form, so re-reading the trace
/// reproduces every aggregate bit for bit.
void write_trace_rows(std::ostream& out, const EpisodeMetrics& episode);

/// Parses a trace and re-aggregates its episodes. Throws MetricsFormatError
/// naming the 1-based line of the first malformed row.
std::vector<EpisodeMetrics> read_trace_csv(std::istream& in, TraceLayout* layout = nullptr);

nlohmann::json episode_summary(const EpisodeMetrics& episode);
void write_episode_jsonl(std::ostream& out, const EpisodeMetrics& episode);

}  // namespace sbpg::train
