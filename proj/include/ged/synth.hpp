#pragma once

// Synthetic interaction logs with planted, scripted group histories.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "ged/error.hpp"
#include "ged/ged.hpp"
#include "ged/temporal.hpp"

namespace ged {

struct PlantedGroup {
  std::vector<NodeId> members;  // sorted, unique
  std::optional<double> density;  // overrides the script default
};

/// Scripted evolution. `frames[f]` lists the groups planted in frame f+1.
/// Ground-truth events refer to planted groups by their position in that list.
struct ScenarioScript {
  std::size_t frame_count = 0;
  std::int64_t frame_length_days = 30;
  std::size_t k = 5;
  Day start = day_from_civil(2010, 1, 1);
  NodeId node_count = 0;  // nodes 1..node_count join the noise universe
  double density = 1.0;   // share of non-backbone intra-group pairs that interact
  double noise = 0.0;     // probability that a non-group pair interacts in a frame
  std::map<std::size_t, double> frame_noise;  // per-frame override, keyed by 1-based frame
  std::vector<std::vector<PlantedGroup>> frames;
  std::vector<EvolutionEvent> ground_truth;

  std::vector<PlantedGroup>& frame(std::size_t index) {
    if (frames.size() < frame_count) frames.resize(frame_count);
    return frames.at(index - 1);
  }

  /// Throws InfeasibleScript when a planted group cannot hold a k-clique or
  /// the script is otherwise inconsistent.
  void validate() const {
    const auto fail = [](const std::string& msg) { return Error(ErrorCode::InfeasibleScript, msg); };
    if (frame_count == 0) throw fail("script has no frames");
    if (frame_length_days < 1) throw fail("frame length must be positive");
    if (k < 3) throw fail("k must be at least 3");
    if (frames.size() > frame_count) throw fail("groups planted beyond the last frame");
    for (std::size_t f = 0; f < frames.size(); ++f) {
      for (std::size_t g = 0; g < frames[f].size(); ++g) {
        const auto& m = frames[f][g].members;
        if (m.size() < k)
          throw fail("frame " + std::to_string(f + 1) + " group " + std::to_string(g) + " has " +
                     std::to_string(m.size()) + " members, fewer than k = " + std::to_string(k));
        if (!std::is_sorted(m.begin(), m.end()) || std::adjacent_find(m.begin(), m.end()) != m.end())
          throw fail("frame " + std::to_string(f + 1) + " group " + std::to_string(g) + " members not a set");
      }
    }
    const auto groups_in = [&](std::size_t frame) { return frame <= frames.size() ? frames[frame - 1].size() : 0; };
    for (const auto& e : ground_truth) {
      if (e.from_frame < 1 || e.to_frame != e.from_frame + 1 || e.to_frame > frame_count)
        throw fail("ground truth references frames outside the script");
      if ((e.from_group && *e.from_group >= groups_in(e.from_frame)) || (e.to_group && *e.to_group >= groups_in(e.to_frame)))
        throw fail("ground truth references an unplanted group");
      if ((e.event == EventType::Forming) != !e.from_group || (e.event == EventType::Dissolving) != !e.to_group)
        throw fail("ground truth event has the wrong group fields for its type");
    }
  }
};

struct SyntheticLog {
  TemporalEventLog log;
  std::vector<EvolutionEvent> ground_truth;
};

namespace detail {

// Planted structure depends only on the script, never on the noise seed.
inline std::mt19937_64 planted_rng(std::size_t frame, std::size_t group) {
  std::seed_seq seq{std::uint64_t{0x5eed}, static_cast<std::uint64_t>(frame), static_cast<std::uint64_t>(group)};
  return std::mt19937_64(seq);
}

}  // namespace detail

/// Emits a log in which every planted group of a frame is covered by a chain
/// of k-cliques over consecutive members (so clique percolation recovers the
/// whole member set), plus a `density` share of the remaining intra-group
/// pairs. Planted pairs interact in both directions. Noise pairs are drawn
/// among pairs that share no planted group in that frame.
inline SyntheticLog generate(const ScenarioScript& script, std::uint64_t seed) {
  script.validate();
  std::set<NodeId> universe;
  for (NodeId v = 1; v <= script.node_count; ++v) universe.insert(v);
  for (const auto& frame : script.frames)
    for (const auto& g : frame) universe.insert(g.members.begin(), g.members.end());
  const std::vector<NodeId> nodes(universe.begin(), universe.end());

  std::mt19937_64 noise_rng(seed);
  std::vector<InteractionRecord> records;
  const auto L = script.frame_length_days;

  for (std::size_t f = 1; f <= script.frame_count; ++f) {
    const Day window_start = script.start + static_cast<std::int64_t>(f - 1) * L;
    static const std::vector<PlantedGroup> none;
    const auto& planted = f <= script.frames.size() ? script.frames[f - 1] : none;

    std::map<NodeId, std::vector<std::size_t>> membership;
    for (std::size_t g = 0; g < planted.size(); ++g) {
      const auto& m = planted[g].members;
      for (const auto v : m) membership[v].push_back(g);

      auto rng = detail::planted_rng(f, g);
      std::uniform_int_distribution<std::int64_t> day(0, L - 1);
      std::uniform_real_distribution<double> coin(0.0, 1.0);
      const double density = planted[g].density.value_or(script.density);
      const std::size_t n = m.size();
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
          // j - i < k: inside some window of k consecutive members
          const bool backbone = j - i < script.k;
          const double draw = coin(rng);
          if (!backbone && draw >= density) continue;
          records.push_back({m[i], m[j], window_start + day(rng), {}});
          records.push_back({m[j], m[i], window_start + day(rng), {}});
        }
      }
    }

    const auto it = script.frame_noise.find(f);
    const double noise = it != script.frame_noise.end() ? it->second : script.noise;
    if (noise <= 0.0) continue;
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    std::uniform_int_distribution<std::int64_t> day(0, L - 1);
    const auto shares_group = [&](NodeId x, NodeId y) {
      const auto a = membership.find(x), b = membership.find(y);
      if (a == membership.end() || b == membership.end()) return false;
      return std::find_first_of(a->second.begin(), a->second.end(), b->second.begin(), b->second.end()) !=
             a->second.end();
    };
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      for (std::size_t j = i + 1; j < nodes.size(); ++j) {
        if (coin(noise_rng) >= noise || shares_group(nodes[i], nodes[j])) continue;
        const bool forward = (noise_rng() & 1u) == 0;
        records.push_back({forward ? nodes[i] : nodes[j], forward ? nodes[j] : nodes[i], window_start + day(noise_rng), {}});
      }
    }
  }
  if (records.empty()) throw Error(ErrorCode::InfeasibleScript, "script produces no interactions");

  const Day span_end = script.start + static_cast<std::int64_t>(script.frame_count) * L - 1;
  auto truth = script.ground_truth;
  std::sort(truth.begin(), truth.end(), event_order);
  return {TemporalEventLog(std::move(records), script.start, span_end), std::move(truth)};
}

namespace detail {

inline std::vector<NodeId> id_range(NodeId first, NodeId last) {
  std::vector<NodeId> out;
  for (NodeId v = first; v <= last; ++v) out.push_back(v);
  return out;
}

inline std::vector<NodeId> merge_sets(std::initializer_list<std::vector<NodeId>> parts) {
  std::vector<NodeId> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline EvolutionEvent truth(std::size_t from_frame, std::optional<std::size_t> from, std::optional<std::size_t> to,
                            EventType type) {
  return {from_frame, from_frame + 1, from, to, type, 0.0, 0.0};
}

}  // namespace detail

/// Eight 30-day frames replaying a single group's life: it forms in T2,
/// grows in T3, splits in two in T4, the bigger part loses a member in T5,
/// both parts carry on into T6 where a third group appears, all three merge
/// in T7 and the merged group is gone in T8. Side events the story implies
/// (the smaller part continuing into T5, the third group forming) are part
/// of the ground truth.
inline ScenarioScript figure1_scenario(std::size_t k = 5) {
  if (k < 3) throw Error(ErrorCode::InfeasibleScript, "k must be at least 3");
  using detail::id_range;
  using detail::truth;
  const NodeId n = k;
  ScenarioScript s;
  s.frame_count = 8;
  s.frame_length_days = 30;
  s.k = k;
  const auto group = id_range(1, n + 1);             // k + 1 members
  const auto grown = id_range(1, 2 * n + 1);         // 2k + 1
  const auto part_a = id_range(1, n + 1);            // k + 1
  const auto part_b = id_range(n + 2, 2 * n + 1);    // k
  const auto part_a_shrunk = id_range(1, n);         // k
  const auto third = id_range(2 * n + 2, 3 * n + 1); // k
  const auto merged = detail::merge_sets({part_a_shrunk, part_b, third});

  s.frame(2).push_back({group, {}});
  s.frame(3).push_back({grown, {}});
  s.frame(4) = {{part_a, {}}, {part_b, {}}};
  s.frame(5) = {{part_a_shrunk, {}}, {part_b, {}}};
  s.frame(6) = {{part_a_shrunk, {}}, {part_b, {}}, {third, {}}};
  s.frame(7).push_back({merged, {}});
  s.frame(8);

  s.ground_truth = {
      truth(1, std::nullopt, 0, EventType::Forming),
      truth(2, 0, 0, EventType::Growing),
      truth(3, 0, 0, EventType::Splitting),
      truth(3, 0, 1, EventType::Splitting),
      truth(4, 0, 0, EventType::Shrinking),
      truth(4, 1, 1, EventType::Continuing),
      truth(5, std::nullopt, 2, EventType::Forming),
      truth(5, 0, 0, EventType::Continuing),
      truth(5, 1, 1, EventType::Continuing),
      truth(6, 0, 0, EventType::Merging),
      truth(6, 1, 0, EventType::Merging),
      truth(6, 2, 0, EventType::Merging),
      truth(7, 0, std::nullopt, EventType::Dissolving),
  };
  return s;
}

/// One group of `size` members that forms in T2 and persists through T4
/// (frame 1 is empty so that the forming event is observable).
inline ScenarioScript stable_scenario(std::size_t size = 6, std::size_t k = 5) {
  using detail::truth;
  ScenarioScript s;
  s.frame_count = 4;
  s.k = k;
  for (std::size_t f = 2; f <= 4; ++f) s.frame(f).push_back({detail::id_range(1, size), {}});
  s.frame(1);
  s.ground_truth = {truth(1, std::nullopt, 0, EventType::Forming), truth(2, 0, 0, EventType::Continuing),
                    truth(3, 0, 0, EventType::Continuing)};
  return s;
}

/// Every frame plants `groups_per_frame` groups on nodes never used before,
/// so membership turns over completely between frames.
inline ScenarioScript churn_scenario(std::size_t frame_count, std::size_t groups_per_frame, std::size_t group_size,
                                     std::size_t k = 5, std::int64_t frame_days = 30) {
  using detail::truth;
  ScenarioScript s;
  s.frame_count = frame_count;
  s.frame_length_days = frame_days;
  s.k = k;
  NodeId next = 1;
  for (std::size_t f = 1; f <= frame_count; ++f) {
    for (std::size_t g = 0; g < groups_per_frame; ++g) {
      s.frame(f).push_back({detail::id_range(next, next + group_size - 1), {}});
      next += group_size;
    }
  }
  for (std::size_t f = 1; f < frame_count; ++f) {
    for (std::size_t g = 0; g < groups_per_frame; ++g) {
      s.ground_truth.push_back(truth(f, g, std::nullopt, EventType::Dissolving));
      s.ground_truth.push_back(truth(f, std::nullopt, g, EventType::Forming));
    }
  }
  return s;
}

struct RandomScenarioParams {
  NodeId node_count = 200;
  std::size_t frame_count = 6;
  std::int64_t frame_days = 30;
  std::size_t k = 5;
  std::size_t initial_groups = 8;
  std::size_t max_group_size = 12;
  double density = 0.6;
  double noise = 0.0;
};

/// Randomly evolving population of disjoint groups: each frame every group
/// may persist, grow, shrink, split, merge with a neighbour or vanish, and
/// new groups form from idle nodes. No ground truth is attached.
inline ScenarioScript random_scenario(const RandomScenarioParams& p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  ScenarioScript s;
  s.frame_count = p.frame_count;
  s.frame_length_days = p.frame_days;
  s.k = p.k;
  s.node_count = p.node_count;
  s.density = p.density;
  s.noise = p.noise;

  std::vector<NodeId> idle;
  for (NodeId v = 1; v <= p.node_count; ++v) idle.push_back(v);
  const auto take = [&](std::size_t n, std::vector<NodeId>& into) {
    for (std::size_t i = 0; i < n && !idle.empty(); ++i) {
      const auto pick = std::uniform_int_distribution<std::size_t>(0, idle.size() - 1)(rng);
      into.push_back(idle[pick]);
      idle[pick] = idle.back();
      idle.pop_back();
    }
  };
  const auto release = [&](std::vector<NodeId>& from, std::size_t n) {
    std::shuffle(from.begin(), from.end(), rng);
    for (std::size_t i = 0; i < n && !from.empty(); ++i) {
      idle.push_back(from.back());
      from.pop_back();
    }
  };
  const auto size_between = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, std::max(lo, hi))(rng);
  };

  std::vector<std::vector<NodeId>> groups;
  for (std::size_t g = 0; g < p.initial_groups; ++g) {
    std::vector<NodeId> m;
    take(size_between(p.k, p.max_group_size), m);
    if (m.size() >= p.k) groups.push_back(std::move(m));
  }
  for (std::size_t f = 1; f <= p.frame_count; ++f) {
    if (f > 1) {
      std::vector<std::vector<NodeId>> next;
      for (std::size_t g = 0; g < groups.size(); ++g) {
        auto m = groups[g];
        const double r = coin(rng);
        if (r < 0.35) {
          next.push_back(std::move(m));
        } else if (r < 0.5) {
          take(size_between(1, 3), m);
          next.push_back(std::move(m));
        } else if (r < 0.65) {
          if (m.size() > p.k) release(m, size_between(1, m.size() - p.k));
          next.push_back(std::move(m));
        } else if (r < 0.75 && m.size() >= 2 * p.k) {
          std::shuffle(m.begin(), m.end(), rng);
          std::vector<NodeId> other(m.begin() + static_cast<std::ptrdiff_t>(m.size() / 2), m.end());
          m.resize(m.size() / 2);
          next.push_back(std::move(m));
          next.push_back(std::move(other));
        } else if (r < 0.85 && g + 1 < groups.size()) {
          m.insert(m.end(), groups[g + 1].begin(), groups[g + 1].end());
          ++g;
          next.push_back(std::move(m));
        } else {
          idle.insert(idle.end(), m.begin(), m.end());
        }
      }
      while (next.size() < p.initial_groups / 2 || coin(rng) < 0.3) {
        std::vector<NodeId> m;
        take(size_between(p.k, p.max_group_size), m);
        if (m.size() < p.k) {
          idle.insert(idle.end(), m.begin(), m.end());
          break;
        }
        next.push_back(std::move(m));
      }
      groups = std::move(next);
    }
    for (auto& m : groups) {
      auto sorted = m;
      std::sort(sorted.begin(), sorted.end());
      s.frame(f).push_back({std::move(sorted), {}});
    }
  }
  s.frame(p.frame_count);
  return s;
}

// ---------------------------------------------------------------------------
// Script documents

namespace detail {

inline std::vector<NodeId> parse_member_list(std::string_view text) {
  std::vector<NodeId> out;
  for (const auto part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string_view::npos) {
      const auto v = parse_int<NodeId>(part);
      if (!v) throw Error(ErrorCode::Parse, "bad member '" + std::string(part) + "'");
      out.push_back(*v);
    } else {
      const auto lo = parse_int<NodeId>(trim(part.substr(0, dash)));
      const auto hi = parse_int<NodeId>(trim(part.substr(dash + 1)));
      if (!lo || !hi || *hi < *lo) throw Error(ErrorCode::Parse, "bad member range '" + std::string(part) + "'");
      for (NodeId v = *lo; v <= *hi; ++v) out.push_back(v);
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

inline std::string format_member_list(const std::vector<NodeId>& m) {
  std::string out;
  for (std::size_t i = 0; i < m.size();) {
    std::size_t j = i;
    while (j + 1 < m.size() && m[j + 1] == m[j] + 1) ++j;
    if (!out.empty()) out += ',';
    out += std::to_string(m[i]);
    if (j > i) out += '-' + std::to_string(m[j]);
    i = j + 1;
  }
  return out;
}

inline std::vector<std::string_view> words(std::string_view s) {
  std::vector<std::string_view> out;
  for (const auto w : split(s, ' '))
    if (!w.empty()) out.push_back(w);
  return out;
}

// `FROM TO FROM_GROUP TO_GROUP EVENT`, '-' for an absent group
inline EvolutionEvent parse_truth_line(std::string_view text) {
  const auto w = words(text);
  const auto fail = [&] { return Error(ErrorCode::Parse, "bad truth line '" + std::string(text) + "'"); };
  if (w.size() != 5) throw fail();
  const auto from = parse_int<std::size_t>(w[0]);
  const auto to = parse_int<std::size_t>(w[1]);
  const auto type = parse_event_type(w[4]);
  if (!from || !to || !type) throw fail();
  const auto group = [&](std::string_view g) -> std::optional<std::size_t> {
    if (g == "-") return std::nullopt;
    const auto v = parse_int<std::size_t>(g);
    if (!v) throw fail();
    return v;
  };
  return {*from, *to, group(w[2]), group(w[3]), *type, 0.0, 0.0};
}

inline std::string format_truth(const EvolutionEvent& e) {
  const auto group = [](const std::optional<std::size_t>& g) {
    if (!g) return std::string("-");
    return *g == SIZE_MAX ? std::string("?") : std::to_string(*g);
  };
  return std::to_string(e.from_frame) + ' ' + std::to_string(e.to_frame) + ' ' + group(e.from_group) + ' ' +
         group(e.to_group) + ' ' + std::string(to_string(e.event));
}

}  // namespace detail

/// Reads a ground-truth document: one `FROM TO FROM_GROUP TO_GROUP EVENT`
/// per line, optionally prefixed with `truth:`.
inline std::vector<EvolutionEvent> read_truth(std::istream& in) {
  std::vector<EvolutionEvent> out;
  std::string line;
  while (std::getline(in, line)) {
    auto text = detail::trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = detail::trim(text.substr(0, hash));
    if (text.empty()) continue;
    if (text.starts_with("truth:")) text = detail::trim(text.substr(6));
    out.push_back(detail::parse_truth_line(text));
  }
  std::sort(out.begin(), out.end(), event_order);
  return out;
}

/// Reads a scenario document:
///
///   frames: 8
///   frame_days: 30
///   k: 5
///   start: 2010-01-01
///   nodes: 0
///   density: 1
///   noise: 0
///   noise 3: 0.01
///   group 2: 1-6
///   group 4: 1-6,9 density=0.5
///   truth: 1 2 - 0 forming
///
/// Groups are numbered 0.. per frame in order of appearance.
inline ScenarioScript parse_script(std::istream& in) {
  ScenarioScript s;
  std::vector<std::pair<std::size_t, PlantedGroup>> groups;
  std::map<std::size_t, double> frame_noise;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto text = detail::trim(line);
    if (const auto hash = text.find('#'); hash != std::string_view::npos) text = detail::trim(text.substr(0, hash));
    if (text.empty()) continue;
    const auto colon = text.find(':');
    const auto fail = [&](const std::string& why) {
      return Error(ErrorCode::Parse, "script line " + std::to_string(line_no) + ": " + why);
    };
    if (colon == std::string_view::npos) throw fail("expected 'key: value'");
    const auto key = detail::words(text.substr(0, colon));
    const auto value = detail::trim(text.substr(colon + 1));
    if (key.empty()) throw fail("missing key");
    const auto number = [&]() {
      const auto v = detail::parse_double(value);
      if (!v) throw fail("expected a number");
      return *v;
    };
    const auto integer = [&]() {
      const auto v = detail::parse_int<std::int64_t>(value);
      if (!v || *v < 0) throw fail("expected a non-negative integer");
      return *v;
    };
    if (key.size() == 1 && key[0] == "frames") s.frame_count = static_cast<std::size_t>(integer());
    else if (key.size() == 1 && key[0] == "frame_days") s.frame_length_days = integer();
    else if (key.size() == 1 && key[0] == "k") s.k = static_cast<std::size_t>(integer());
    else if (key.size() == 1 && key[0] == "nodes") s.node_count = static_cast<NodeId>(integer());
    else if (key.size() == 1 && key[0] == "density") s.density = number();
    else if (key.size() == 1 && key[0] == "noise") s.noise = number();
    else if (key.size() == 1 && key[0] == "start") {
      const auto d = parse_timestamp(value, TimestampFormat::IsoDate);
      if (!d) throw fail("bad start date");
      s.start = *d;
    } else if (key.size() == 2 && (key[0] == "group" || key[0] == "noise")) {
      const auto frame = detail::parse_int<std::size_t>(key[1]);
      if (!frame || *frame < 1) throw fail("bad frame index");
      if (key[0] == "noise") {
        frame_noise[*frame] = number();
        continue;
      }
      auto w = detail::words(value);
      if (w.empty()) throw fail("empty group");
      PlantedGroup g;
      g.members = detail::parse_member_list(w[0]);
      for (std::size_t i = 1; i < w.size(); ++i) {
        if (!w[i].starts_with("density=")) throw fail("unknown group option");
        const auto d = detail::parse_double(w[i].substr(8));
        if (!d) throw fail("bad density");
        g.density = *d;
      }
      groups.emplace_back(*frame, std::move(g));
    } else if (key.size() == 1 && key[0] == "truth") {
      s.ground_truth.push_back(detail::parse_truth_line(value));
    } else {
      throw fail("unknown key");
    }
  }
  s.frame_noise = std::move(frame_noise);
  for (auto& [frame, g] : groups) {
    if (frame > s.frame_count) throw Error(ErrorCode::InfeasibleScript, "group planted in frame beyond 'frames'");
    s.frame(frame).push_back(std::move(g));
  }
  if (s.frame_count > 0) s.frame(s.frame_count);
  s.validate();
  return s;
}

inline void write_script(std::ostream& out, const ScenarioScript& s) {
  out << "frames: " << s.frame_count << '\n'
      << "frame_days: " << s.frame_length_days << '\n'
      << "k: " << s.k << '\n'
      << "start: " << to_iso(s.start) << '\n'
      << "nodes: " << s.node_count << '\n'
      << "density: " << detail::format_double(s.density) << '\n'
      << "noise: " << detail::format_double(s.noise) << '\n';
  for (const auto& [f, r] : s.frame_noise) out << "noise " << f << ": " << detail::format_double(r) << '\n';
  for (std::size_t f = 0; f < s.frames.size(); ++f) {
    for (const auto& g : s.frames[f]) {
      out << "group " << f + 1 << ": " << detail::format_member_list(g.members);
      if (g.density) out << " density=" << detail::format_double(*g.density);
      out << '\n';
    }
  }
  for (const auto& e : s.ground_truth) out << "truth: " << detail::format_truth(e) << '\n';
}

}  // namespace ged
