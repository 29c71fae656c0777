#include "sbpg/train/metrics_io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "sbpg/error.hpp"

namespace sbpg::train {
namespace {

std::string fmt(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

double parse_double(const std::string& s, std::size_t line, const std::string& column) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw MetricsFormatError("line " + std::to_string(line) + ": bad value '" + s +
                             "' in column " + column);
  }
  return v;
}

}  // namespace

TraceLayout trace_layout(const plant::PlantConfig& config) {
  TraceLayout l;
  for (const auto& r : config.reservoirs) {
    if (!r.infinite) l.reservoirs.push_back(r.id);
  }
  for (const auto& a : config.actuators) l.players.push_back(a.id);
  return l;
}

void write_trace_header(std::ostream& out, const TraceLayout& layout) {
  out << "episode,eval,window,time";
  for (const auto& r : layout.reservoirs) out << ",fill_" << r;
  for (const char* prefix : {"action_", "power_", "utility_"}) {
    for (const auto& p : layout.players) out << ',' << prefix << p;
  }
  out << ",potential,requested,delivered,overflow,fallbacks\n";
}

void write_trace_rows(std::ostream& out, const EpisodeMetrics& e) {
  for (const WindowRecord& w : e.trace) {
    out << e.episode << ',' << (e.eval ? 1 : 0) << ',' << w.window << ',' << fmt(w.time);
    for (double v : w.fills) out << ',' << fmt(v);
    for (double v : w.actions) out << ',' << fmt(v);
    for (double v : w.power) out << ',' << fmt(v);
    for (double v : w.utility) out << ',' << fmt(v);
    out << ',' << fmt(w.potential) << ',' << fmt(w.requested) << ',' << fmt(w.delivered) << ','
        << fmt(w.overflow) << ',' << w.fallbacks << '\n';
  }
}

std::vector<EpisodeMetrics> read_trace_csv(std::istream& in, TraceLayout* layout_out) {
  std::string line;
  if (!std::getline(in, line)) throw MetricsFormatError("line 1: empty trace");
  const auto header = split(line);
  if (header.size() < 8 || header[0] != "episode" || header[1] != "eval" ||
      header[2] != "window" || header[3] != "time") {
    throw MetricsFormatError("line 1: unrecognised trace header");
  }
  TraceLayout layout;
  std::size_t c = 4;
  for (; c < header.size() && header[c].rfind("fill_", 0) == 0; ++c) {
    layout.reservoirs.push_back(header[c].substr(5));
  }
  for (; c < header.size() && header[c].rfind("action_", 0) == 0; ++c) {
    layout.players.push_back(header[c].substr(7));
  }
  const std::size_t n = layout.players.size();
  const std::size_t expected = 4 + layout.reservoirs.size() + 3 * n + 5;
  if (n == 0 || header.size() != expected || header[expected - 5] != "potential") {
    throw MetricsFormatError("line 1: inconsistent trace header");
  }

  std::vector<EpisodeMetrics> episodes;
  std::vector<WindowRecord> current;
  int episode = -1;
  bool eval = false;
  auto flush = [&] {
    if (episode >= 0) episodes.push_back(aggregate(episode, eval, std::move(current)));
    current.clear();
  };

  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != expected) {
      throw MetricsFormatError("line " + std::to_string(lineno) + ": expected " +
                               std::to_string(expected) + " columns, found " +
                               std::to_string(cells.size()));
    }
    std::vector<double> v(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) v[k] = parse_double(cells[k], lineno, header[k]);
    const int ep = static_cast<int>(v[0]);
    if (static_cast<double>(ep) != v[0] || ep < 0 || (v[1] != 0.0 && v[1] != 1.0)) {
      throw MetricsFormatError("line " + std::to_string(lineno) + ": bad episode/eval fields");
    }
    if (ep != episode) {
      flush();
      episode = ep;
      eval = v[1] == 1.0;
    }
    WindowRecord w;
    w.window = static_cast<std::size_t>(v[2]);
    w.time = v[3];
    std::size_t k = 4;
    for (std::size_t r = 0; r < layout.reservoirs.size(); ++r) w.fills.push_back(v[k++]);
    for (std::size_t i = 0; i < n; ++i) w.actions.push_back(v[k++]);
    for (std::size_t i = 0; i < n; ++i) w.power.push_back(v[k++]);
    for (std::size_t i = 0; i < n; ++i) w.utility.push_back(v[k++]);
    w.potential = v[k++];
    w.requested = v[k++];
    w.delivered = v[k++];
    w.overflow = v[k++];
    if (v[k] < 0.0 || v[k] != static_cast<double>(static_cast<std::size_t>(v[k]))) {
      throw MetricsFormatError("line " + std::to_string(lineno) + ": bad fallbacks field");
    }
    w.fallbacks = static_cast<std::size_t>(v[k++]);
    current.push_back(std::move(w));
  }
  flush();
  if (layout_out != nullptr) *layout_out = layout;
  return episodes;
}

nlohmann::json episode_summary(const EpisodeMetrics& e) {
  return {{"episode", e.episode},
          {"eval", e.eval},
          {"windows", e.trace.size()},
          {"demand_fulfillment", e.demand_fulfillment},
          {"overflow", e.overflow},
          {"mean_power", e.mean_power},
          {"mean_potential", e.mean_potential},
          {"hessian_fallbacks", e.hessian_fallbacks}};
}

void write_episode_jsonl(std::ostream& out, const EpisodeMetrics& e) {
  out << episode_summary(e).dump() << '\n';
}

}  // namespace sbpg::train
