#pragma once

// Group evolution discovery: inclusion measure, event rule table and
// evolution chains.

#include <algorithm>
#include <array>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <tuple>
#include <vector>

#include <nlohmann/json.hpp>

#include "ged/cpm.hpp"
#include "ged/error.hpp"
#include "ged/importance.hpp"
#include "ged/temporal.hpp"

namespace ged {

enum class EventType { Forming, Dissolving, Continuing, Shrinking, Growing, Splitting, Merging };

inline constexpr std::array<EventType, 7> kAllEventTypes = {
    EventType::Forming,  EventType::Dissolving, EventType::Shrinking, EventType::Growing,
    EventType::Continuing, EventType::Splitting, EventType::Merging,
};

constexpr std::string_view to_string(EventType e) {
  switch (e) {
    case EventType::Forming: return "forming";
    case EventType::Dissolving: return "dissolving";
    case EventType::Continuing: return "continuing";
    case EventType::Shrinking: return "shrinking";
    case EventType::Growing: return "growing";
    case EventType::Splitting: return "splitting";
    case EventType::Merging: return "merging";
  }
  return "?";
}

inline std::optional<EventType> parse_event_type(std::string_view s) {
  for (const auto e : kAllEventTypes)
    if (to_string(e) == s) return e;
  return std::nullopt;
}

struct GedParams {
  double alpha = 0.5;
  double beta = 0.5;
  double form_dissolve_threshold = 0.10;
  double match_threshold = 0.10;

  /// Human-readable notes for thresholds outside the recommended [0.5, 1].
  std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    if (alpha < 0.5 || alpha > 1.0) out.push_back("alpha " + detail::format_double(alpha) + " outside [0.5, 1]");
    if (beta < 0.5 || beta > 1.0) out.push_back("beta " + detail::format_double(beta) + " outside [0.5, 1]");
    return out;
  }
};

/// Inclusion of G1 in G2: the share of G1's members found in G2 times the
/// share of G1's total member importance those members carry. Both member
/// lists must be sorted. When G1's total importance is zero the quality
/// factor falls back to the member share.
inline double inclusion(std::span<const NodeId> g1, std::span<const NodeId> g2, const ImportanceMap& ni) {
  if (g1.empty()) throw Error(ErrorCode::EmptyGroup, "inclusion of an empty group");
  std::size_t shared = 0;
  double shared_importance = 0.0;
  double total_importance = 0.0;
  auto j = g2.begin();
  for (const auto x : g1) {
    const double v = ni.at(x);
    total_importance += v;
    while (j != g2.end() && *j < x) ++j;
    if (j != g2.end() && *j == x) {
      ++shared;
      shared_importance += v;
    }
  }
  const double quantity = static_cast<double>(shared) / static_cast<double>(g1.size());
  const double quality = total_importance > 0.0 ? shared_importance / total_importance : quantity;
  return quantity * quality;
}

inline double inclusion(const Group& g1, const Group& g2, const ImportanceMap& ni) {
  return inclusion(std::span<const NodeId>(g1.members), std::span<const NodeId>(g2.members), ni);
}

/// Number of candidates H with max(I(G,H), I(H,G)) >= match_threshold.
/// `ni_group` is the importance of G's frame, `ni_candidates` that of the
/// candidates' frame.
inline std::size_t count_matches(const Group& g, std::span<const Group> candidates, const ImportanceMap& ni_group,
                                 const ImportanceMap& ni_candidates, const GedParams& params) {
  std::size_t n = 0;
  for (const auto& h : candidates)
    if (std::max(inclusion(g, h, ni_group), inclusion(h, g, ni_candidates)) >= params.match_threshold) ++n;
  return n;
}

/// Rule table for a pair G1 in T_i, G2 in T_{i+1}. Clause pairs with the
/// same inclusion/size condition are told apart by match counts: a single
/// match means shrinking/growing, several mean splitting/merging. When sizes
/// are equal and only one inclusion passes, the passing direction decides:
/// I(G2,G1) >= beta reads as G1 shedding members (shrinking/splitting),
/// I(G1,G2) >= alpha as G1 being absorbed (growing/merging).
inline std::optional<EventType> classify_pair(std::size_t size1, std::size_t size2, double inc_fwd, double inc_bwd,
                                              std::size_t fwd_matches, std::size_t bwd_matches,
                                              const GedParams& params) {
  const bool fwd = inc_fwd >= params.alpha;
  const bool bwd = inc_bwd >= params.beta;
  if (fwd && bwd) {
    if (size1 == size2) return EventType::Continuing;
    return size1 > size2 ? EventType::Shrinking : EventType::Growing;
  }
  if (!fwd && bwd) {
    if (size1 >= size2) return fwd_matches > 1 ? EventType::Splitting : EventType::Shrinking;
    return bwd_matches > 1 ? EventType::Merging : EventType::Growing;
  }
  if (fwd && !bwd) {
    if (size1 <= size2) return bwd_matches > 1 ? EventType::Merging : EventType::Growing;
    return fwd_matches > 1 ? EventType::Splitting : EventType::Shrinking;
  }
  return std::nullopt;
}

inline std::optional<EventType> classify_pair(const Group& g1, const Group& g2, double inc_fwd, double inc_bwd,
                                              std::size_t fwd_matches, std::size_t bwd_matches,
                                              const GedParams& params) {
  return classify_pair(g1.size(), g2.size(), inc_fwd, inc_bwd, fwd_matches, bwd_matches, params);
}

/// A classified transition between consecutive frames. For forming and
/// dissolving events the inclusion fields hold the largest inclusion seen
/// against any group of the other frame.
struct EvolutionEvent {
  std::size_t from_frame = 0;
  std::size_t to_frame = 0;
  std::optional<std::size_t> from_group;
  std::optional<std::size_t> to_group;
  EventType event = EventType::Continuing;
  double inclusion_fwd = 0.0;
  double inclusion_bwd = 0.0;

  friend bool operator==(const EvolutionEvent&, const EvolutionEvent&) = default;
};

inline bool event_order(const EvolutionEvent& a, const EvolutionEvent& b) {
  return std::tie(a.from_frame, a.from_group, a.to_group) < std::tie(b.from_frame, b.from_group, b.to_group);
}

/// A related pair (non-empty overlap) that no rule classified.
struct UnclassifiedPair {
  std::size_t from_frame = 0;
  std::size_t from_group = 0;
  std::size_t to_group = 0;
  double inclusion_fwd = 0.0;
  double inclusion_bwd = 0.0;

  friend bool operator==(const UnclassifiedPair&, const UnclassifiedPair&) = default;
};

namespace detail {

// Both inclusion directions for every group pair of two consecutive frames.
struct PairInclusions {
  std::vector<std::vector<double>> fwd;  // fwd[a][b] = I(G_a, H_b)
  std::vector<std::vector<double>> bwd;  // bwd[a][b] = I(H_b, G_a)

  PairInclusions(std::span<const Group> from, std::span<const Group> to, const ImportanceMap& ni_from,
                 const ImportanceMap& ni_to)
      : fwd(from.size(), std::vector<double>(to.size())), bwd(from.size(), std::vector<double>(to.size())) {
    for (std::size_t a = 0; a < from.size(); ++a) {
      for (std::size_t b = 0; b < to.size(); ++b) {
        fwd[a][b] = inclusion(from[a], to[b], ni_from);
        bwd[a][b] = inclusion(to[b], from[a], ni_to);
      }
    }
  }
};

inline std::vector<EvolutionEvent> forming_dissolving(std::span<const Group> from, std::span<const Group> to,
                                                      const PairInclusions& inc, std::size_t from_frame,
                                                      const GedParams& params, std::vector<bool>& dissolving,
                                                      std::vector<bool>& forming) {
  const double th = params.form_dissolve_threshold;
  std::vector<EvolutionEvent> out;
  dissolving.assign(from.size(), false);
  forming.assign(to.size(), false);
  for (std::size_t b = 0; b < to.size(); ++b) {
    double max_fwd = 0.0, max_bwd = 0.0;
    bool all_below = true;
    for (std::size_t a = 0; a < from.size(); ++a) {
      max_fwd = std::max(max_fwd, inc.fwd[a][b]);
      max_bwd = std::max(max_bwd, inc.bwd[a][b]);
      if (inc.fwd[a][b] >= th || inc.bwd[a][b] >= th) all_below = false;
    }
    if (all_below) {
      forming[b] = true;
      out.push_back({from_frame, from_frame + 1, std::nullopt, to[b].group_id, EventType::Forming, max_fwd, max_bwd});
    }
  }
  for (std::size_t a = 0; a < from.size(); ++a) {
    double max_fwd = 0.0, max_bwd = 0.0;
    bool all_below = true;
    for (std::size_t b = 0; b < to.size(); ++b) {
      max_fwd = std::max(max_fwd, inc.fwd[a][b]);
      max_bwd = std::max(max_bwd, inc.bwd[a][b]);
      if (inc.fwd[a][b] >= th || inc.bwd[a][b] >= th) all_below = false;
    }
    if (all_below) {
      dissolving[a] = true;
      out.push_back(
          {from_frame, from_frame + 1, from[a].group_id, std::nullopt, EventType::Dissolving, max_fwd, max_bwd});
    }
  }
  return out;
}

}  // namespace detail

/// Forming and dissolving events between two consecutive frames. A group
/// dissolves when both inclusions against every next-frame group stay below
/// the threshold (strictly); forming is the mirror image.
inline std::vector<EvolutionEvent> detect_forming_dissolving(std::span<const Group> groups_i,
                                                             std::span<const Group> groups_next,
                                                             const ImportanceMap& ni_i, const ImportanceMap& ni_next,
                                                             std::size_t from_frame, const GedParams& params) {
  const detail::PairInclusions inc(groups_i, groups_next, ni_i, ni_next);
  std::vector<bool> dissolving, forming;
  auto out = detail::forming_dissolving(groups_i, groups_next, inc, from_frame, params, dissolving, forming);
  std::sort(out.begin(), out.end(), event_order);
  return out;
}

struct GedResult {
  std::vector<EvolutionEvent> events;
  std::vector<UnclassifiedPair> unclassified;
};

/// Events between frames i and i+1 (1-based from_frame = i).
inline GedResult ged_frame_pair(std::span<const Group> from, std::span<const Group> to, const ImportanceMap& ni_from,
                                const ImportanceMap& ni_to, std::size_t from_frame, const GedParams& params) {
  GedResult result;
  const detail::PairInclusions inc(from, to, ni_from, ni_to);
  std::vector<bool> dissolving, forming;
  result.events = detail::forming_dissolving(from, to, inc, from_frame, params, dissolving, forming);

  std::vector<std::size_t> fwd_matches(from.size(), 0), bwd_matches(to.size(), 0);
  for (std::size_t a = 0; a < from.size(); ++a) {
    for (std::size_t b = 0; b < to.size(); ++b) {
      if (std::max(inc.fwd[a][b], inc.bwd[a][b]) >= params.match_threshold) {
        ++fwd_matches[a];
        ++bwd_matches[b];
      }
    }
  }
  for (std::size_t a = 0; a < from.size(); ++a) {
    if (dissolving[a]) continue;
    for (std::size_t b = 0; b < to.size(); ++b) {
      if (forming[b]) continue;
      const auto event = classify_pair(from[a], to[b], inc.fwd[a][b], inc.bwd[a][b], fwd_matches[a], bwd_matches[b],
                                       params);
      if (event) {
        result.events.push_back({from_frame, from_frame + 1, from[a].group_id, to[b].group_id, *event,
                                 inc.fwd[a][b], inc.bwd[a][b]});
      } else if (inc.fwd[a][b] > 0.0 || inc.bwd[a][b] > 0.0) {
        result.unclassified.push_back({from_frame, from[a].group_id, to[b].group_id, inc.fwd[a][b], inc.bwd[a][b]});
      }
    }
  }
  std::sort(result.events.begin(), result.events.end(), event_order);
  return result;
}

/// Runs the full method over every consecutive frame pair. `groups` and
/// `importance` hold one entry per frame, in frame order.
inline GedResult ged_run(std::size_t frame_count, const std::vector<std::vector<Group>>& groups,
                         const std::vector<ImportanceMap>& importance, const GedParams& params) {
  if (groups.size() != frame_count || importance.size() != frame_count)
    throw Error(ErrorCode::FrameMismatch, "expected groups and importance for " + std::to_string(frame_count) +
                                              " frames, got " + std::to_string(groups.size()) + " and " +
                                              std::to_string(importance.size()));
  for (std::size_t f = 0; f < frame_count; ++f) {
    if (importance[f].frame_index != f + 1)
      throw Error(ErrorCode::FrameMismatch, "importance map " + std::to_string(f) + " is for frame " +
                                                std::to_string(importance[f].frame_index));
    for (const auto& g : groups[f])
      if (g.frame_index != f + 1)
        throw Error(ErrorCode::FrameMismatch, "group " + std::to_string(g.group_id) + " listed under frame " +
                                                  std::to_string(f + 1) + " claims frame " +
                                                  std::to_string(g.frame_index));
  }
  GedResult result;
  for (std::size_t f = 0; f + 1 < frame_count; ++f) {
    auto pair = ged_frame_pair(groups[f], groups[f + 1], importance[f], importance[f + 1], f + 1, params);
    result.events.insert(result.events.end(), pair.events.begin(), pair.events.end());
    result.unclassified.insert(result.unclassified.end(), pair.unclassified.begin(), pair.unclassified.end());
  }
  return result;
}

inline GedResult ged_run(const TemporalSocialNetwork& tsn, const std::vector<std::vector<Group>>& groups,
                         const std::vector<ImportanceMap>& importance, const GedParams& params) {
  return ged_run(tsn.size(), groups, importance, params);
}

// ---------------------------------------------------------------------------
// Evolution chains

struct ChainStep {
  std::size_t frame = 0;
  std::optional<std::size_t> group;      // absent for the dissolving step
  std::optional<EventType> event;        // absent for the first step of a chain

  friend bool operator==(const ChainStep&, const ChainStep&) = default;
};

enum class ChainEnd { Open, Dissolved, Merged };

/// History of one group along consecutive frames. Chains forked by a split
/// share their lineage id and prefix. A chain that merged into a group owned
/// by another lineage ends with `end == Merged` and records that lineage.
struct EvolutionChain {
  std::size_t lineage_id = 0;
  std::vector<ChainStep> steps;
  ChainEnd end = ChainEnd::Open;
  std::optional<std::size_t> merged_into;

  friend bool operator==(const EvolutionChain&, const EvolutionChain&) = default;
};

/// Folds a sorted event list into chains. When a group has several incoming
/// pair events, the predecessor with the largest forward inclusion (ties to
/// the smaller group id) carries its lineage on; the other chains end there.
inline std::vector<EvolutionChain> build_chains(std::vector<EvolutionEvent> events) {
  std::sort(events.begin(), events.end(), event_order);
  std::vector<EvolutionChain> chains;
  std::map<std::pair<std::size_t, std::size_t>, std::size_t> live;  // (frame, group) -> chain
  std::size_t next_lineage = 0;

  const auto chain_at = [&](std::size_t frame, std::size_t group) {
    if (const auto it = live.find({frame, group}); it != live.end()) return it->second;
    chains.push_back({next_lineage++, {{frame, group, std::nullopt}}, ChainEnd::Open, std::nullopt});
    live[{frame, group}] = chains.size() - 1;
    return chains.size() - 1;
  };

  auto it = events.begin();
  while (it != events.end()) {
    const auto frame = it->from_frame;
    const auto end = std::find_if(it, events.end(), [&](const auto& e) { return e.from_frame != frame; });
    const std::span<const EvolutionEvent> batch(&*it, static_cast<std::size_t>(end - it));

    // primary predecessor of every target group
    std::map<std::size_t, const EvolutionEvent*> primary;
    for (const auto& e : batch) {
      if (!e.from_group || !e.to_group) continue;
      auto& p = primary[*e.to_group];
      if (!p || e.inclusion_fwd > p->inclusion_fwd ||
          (e.inclusion_fwd == p->inclusion_fwd && *e.from_group < *p->from_group))
        p = &e;
    }

    std::vector<std::pair<std::size_t, std::size_t>> pending_merges;  // chain, target group
    for (const auto& e : batch) {
      if (e.event == EventType::Forming) {
        chains.push_back({next_lineage++, {{frame + 1, e.to_group, EventType::Forming}}, ChainEnd::Open, std::nullopt});
        live[{frame + 1, *e.to_group}] = chains.size() - 1;
      }
    }
    auto e = batch.begin();
    while (e != batch.end()) {
      if (!e->from_group) {
        ++e;
        continue;
      }
      const auto source = *e->from_group;
      const auto group_end = std::find_if(e, batch.end(), [&](const auto& x) { return x.from_group != source; });
      const auto base = chain_at(frame, source);
      const auto prefix = chains[base].steps;

      std::vector<const EvolutionEvent*> outgoing;
      for (auto x = e; x != group_end; ++x) outgoing.push_back(&*x);
      std::stable_partition(outgoing.begin(), outgoing.end(), [&](const EvolutionEvent* x) {
        return x->to_group && primary[*x->to_group] == x;
      });

      bool first = true;
      for (const auto* x : outgoing) {
        std::size_t c = base;
        if (!first) {
          chains.push_back({chains[base].lineage_id, prefix, ChainEnd::Open, std::nullopt});
          c = chains.size() - 1;
        }
        first = false;
        chains[c].steps.push_back({frame + 1, x->to_group, x->event});
        if (x->event == EventType::Dissolving) {
          chains[c].end = ChainEnd::Dissolved;
        } else if (primary[*x->to_group] == x) {
          live[{frame + 1, *x->to_group}] = c;
        } else {
          chains[c].end = ChainEnd::Merged;
          pending_merges.emplace_back(c, *x->to_group);
        }
      }
      e = group_end;
    }
    for (const auto& [c, target] : pending_merges) chains[c].merged_into = chains[live.at({frame + 1, target})].lineage_id;
    it = end;
  }
  return chains;
}

// ---------------------------------------------------------------------------
// Serialization

namespace detail {
inline std::string optional_id(const std::optional<std::size_t>& v) { return v ? std::to_string(*v) : std::string{}; }
}  // namespace detail

inline void write_events(std::ostream& out, std::span<const EvolutionEvent> events) {
  out << "# from_frame,to_frame,from_group,to_group,event,inclusion_fwd,inclusion_bwd\n";
  for (const auto& e : events)
    out << e.from_frame << ',' << e.to_frame << ',' << detail::optional_id(e.from_group) << ','
        << detail::optional_id(e.to_group) << ',' << to_string(e.event) << ',' << detail::format_double(e.inclusion_fwd)
        << ',' << detail::format_double(e.inclusion_bwd) << '\n';
}

inline std::vector<EvolutionEvent> read_events(std::istream& in) {
  std::vector<EvolutionEvent> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto f = detail::split(text, ',');
    const auto fail = [&] { return Error(ErrorCode::Parse, "events file line " + std::to_string(line_no)); };
    if (f.size() != 7) throw fail();
    EvolutionEvent e;
    const auto from = detail::parse_int<std::size_t>(f[0]);
    const auto to = detail::parse_int<std::size_t>(f[1]);
    const auto type = parse_event_type(f[4]);
    const auto fwd = detail::parse_double(f[5]);
    const auto bwd = detail::parse_double(f[6]);
    if (!from || !to || !type || !fwd || !bwd) throw fail();
    e.from_frame = *from;
    e.to_frame = *to;
    if (!f[2].empty()) e.from_group = detail::parse_int<std::size_t>(f[2]);
    if (!f[3].empty()) e.to_group = detail::parse_int<std::size_t>(f[3]);
    if ((!f[2].empty() && !e.from_group) || (!f[3].empty() && !e.to_group)) throw fail();
    e.event = *type;
    e.inclusion_fwd = *fwd;
    e.inclusion_bwd = *bwd;
    out.push_back(e);
  }
  return out;
}

inline nlohmann::json to_json(const EvolutionEvent& e) {
  nlohmann::json j;
  j["from_frame"] = e.from_frame;
  j["to_frame"] = e.to_frame;
  j["from_group"] = e.from_group ? nlohmann::json(*e.from_group) : nlohmann::json(nullptr);
  j["to_group"] = e.to_group ? nlohmann::json(*e.to_group) : nlohmann::json(nullptr);
  j["event"] = std::string(to_string(e.event));
  j["inclusion_fwd"] = e.inclusion_fwd;
  j["inclusion_bwd"] = e.inclusion_bwd;
  return j;
}

inline nlohmann::json to_json(std::span<const EvolutionEvent> events) {
  auto arr = nlohmann::json::array();
  for (const auto& e : events) arr.push_back(to_json(e));
  return arr;
}

/// One chain per line: `lineage_id,frame:group:event;...,end` where a missing
/// group or event is written as '-' and `end` is open, dissolved or
/// merged:<lineage>.
inline void write_chains(std::ostream& out, std::span<const EvolutionChain> chains) {
  out << "# lineage_id,steps,end\n";
  for (const auto& c : chains) {
    out << c.lineage_id << ',';
    for (std::size_t i = 0; i < c.steps.size(); ++i) {
      const auto& s = c.steps[i];
      out << (i ? ";" : "") << s.frame << ':' << (s.group ? std::to_string(*s.group) : "-") << ':'
          << (s.event ? to_string(*s.event) : std::string_view("-"));
    }
    out << ',';
    switch (c.end) {
      case ChainEnd::Open: out << "open"; break;
      case ChainEnd::Dissolved: out << "dissolved"; break;
      case ChainEnd::Merged: out << "merged:" << detail::optional_id(c.merged_into); break;
    }
    out << '\n';
  }
}

inline void write_unclassified(std::ostream& out, std::span<const UnclassifiedPair> pairs) {
  out << "# from_frame,to_frame,from_group,to_group,inclusion_fwd,inclusion_bwd\n";
  for (const auto& p : pairs)
    out << p.from_frame << ',' << p.from_frame + 1 << ',' << p.from_group << ',' << p.to_group << ','
        << detail::format_double(p.inclusion_fwd) << ',' << detail::format_double(p.inclusion_bwd) << '\n';
}

}  // namespace ged
