#pragma once

// Per-node importance within a frame, used to weight group inclusion.

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "ged/error.hpp"
#include "ged/temporal.hpp"

namespace ged {

struct ImportanceMap {
  std::size_t frame_index = 0;
  std::map<NodeId, double> values;

  /// Importance of a node; nodes absent from the frame count as 0.
  double at(NodeId x) const {
    const auto it = values.find(x);
    return it == values.end() ? 0.0 : it->second;
  }

  friend bool operator==(const ImportanceMap&, const ImportanceMap&) = default;
};

/// Number of distinct out-neighbours plus number of distinct in-neighbours.
inline ImportanceMap degree_importance(const SocialNetwork& net) {
  ImportanceMap out;
  for (const auto x : net.nodes) out.values[x] = 0.0;
  for (const auto& [pair, w] : net.edges) {
    out.values[pair.first] += 1.0;
    out.values[pair.second] += 1.0;
  }
  return out;
}

struct SocialPositionOptions {
  double epsilon = 0.9;
  double tolerance = 1e-9;
  std::size_t max_iterations = 200;
};

/// Social position: the fixed point of
///   SP(x) = (1 - eps) + eps * sum_{y -> x} SP(y) * C(y, x)
/// where the commitment C(y, x) is y's share of its outgoing interaction
/// weight directed at x. Gauss-Seidel sweeps in ascending node order,
/// starting from SP = 1. Nodes without outgoing edges pass nothing on.
inline ImportanceMap social_position(const SocialNetwork& net, const SocialPositionOptions& opt = {}) {
  if (!(opt.epsilon >= 0.0 && opt.epsilon < 1.0))
    throw Error(ErrorCode::InvalidParameter, "social position epsilon must lie in [0, 1)");
  const std::vector<NodeId> nodes(net.nodes.begin(), net.nodes.end());
  const auto index = [&](NodeId id) {
    return static_cast<std::size_t>(std::lower_bound(nodes.begin(), nodes.end(), id) - nodes.begin());
  };

  std::vector<double> out_weight(nodes.size(), 0.0);
  for (const auto& [pair, w] : net.edges) out_weight[index(pair.first)] += w;

  struct Inbound {
    std::size_t from;
    double commitment;
  };
  std::vector<std::vector<Inbound>> inbound(nodes.size());
  for (const auto& [pair, w] : net.edges) {
    const auto y = index(pair.first);
    inbound[index(pair.second)].push_back({y, w / out_weight[y]});
  }

  std::vector<double> sp(nodes.size(), 1.0);
  double residual = 0.0;
  std::size_t iter = 0;
  do {
    residual = 0.0;
    for (std::size_t x = 0; x < nodes.size(); ++x) {
      double acc = 0.0;
      for (const auto& in : inbound[x]) acc += sp[in.from] * in.commitment;
      const double next = (1.0 - opt.epsilon) + opt.epsilon * acc;
      residual = std::max(residual, std::abs(next - sp[x]));
      sp[x] = next;
    }
    ++iter;
  } while (residual > opt.tolerance && iter < opt.max_iterations);

  if (residual > opt.tolerance)
    throw NonConvergenceError("social position did not converge in " + std::to_string(iter) +
                                  " iterations (residual " + detail::format_double(residual) + ")",
                              residual);

  ImportanceMap out;
  for (std::size_t i = 0; i < nodes.size(); ++i) out.values[nodes[i]] = sp[i];
  return out;
}

enum class ImportanceMeasure { Degree, SocialPosition };

inline ImportanceMap compute_importance(const Timeframe& frame, ImportanceMeasure measure,
                                        const SocialPositionOptions& opt = {}) {
  auto map = measure == ImportanceMeasure::Degree ? degree_importance(frame.snapshot)
                                                  : social_position(frame.snapshot, opt);
  map.frame_index = frame.index;
  return map;
}

inline std::vector<ImportanceMap> compute_importance(const TemporalSocialNetwork& tsn, ImportanceMeasure measure,
                                                     const SocialPositionOptions& opt = {}) {
  std::vector<ImportanceMap> out;
  out.reserve(tsn.frames.size());
  for (const auto& f : tsn.frames) out.push_back(compute_importance(f, measure, opt));
  return out;
}

inline void write_importance(std::ostream& out, const std::vector<ImportanceMap>& maps) {
  out << "# frame_index,node,value\n";
  for (const auto& m : maps)
    for (const auto& [node, v] : m.values) out << m.frame_index << ',' << node << ',' << detail::format_double(v) << '\n';
}

/// Reads `frame_index,node,value` lines into one map per frame 1..frame_count.
inline std::vector<ImportanceMap> read_importance(std::istream& in, std::size_t frame_count) {
  std::vector<ImportanceMap> out(frame_count);
  for (std::size_t i = 0; i < frame_count; ++i) out[i].frame_index = i + 1;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto fields = detail::split(text, ',');
    const auto frame = fields.size() == 3 ? detail::parse_int<std::size_t>(fields[0]) : std::nullopt;
    const auto node = fields.size() == 3 ? detail::parse_int<NodeId>(fields[1]) : std::nullopt;
    const auto value = fields.size() == 3 ? detail::parse_double(fields[2]) : std::nullopt;
    if (!frame || !node || !value || *value < 0.0 || !std::isfinite(*value))
      throw Error(ErrorCode::Parse, "importance file line " + std::to_string(line_no));
    if (*frame < 1 || *frame > frame_count)
      throw Error(ErrorCode::FrameMismatch, "importance file line " + std::to_string(line_no) + " references frame " +
                                                std::to_string(*frame));
    out[*frame - 1].values[*node] = *value;
  }
  return out;
}

}  // namespace ged
