#pragma once

// Pipeline orchestration: window/threshold sweeps, event-count reports and
// scenario verification.

#include <array>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ged/cpm.hpp"
#include "ged/error.hpp"
#include "ged/ged.hpp"
#include "ged/importance.hpp"
#include "ged/synth.hpp"
#include "ged/temporal.hpp"

namespace ged {

using EventCounts = std::array<std::size_t, kAllEventTypes.size()>;

constexpr std::size_t count_index(EventType e) {
  for (std::size_t i = 0; i < kAllEventTypes.size(); ++i)
    if (kAllEventTypes[i] == e) return i;
  return 0;
}

inline EventCounts count_events(std::span<const EvolutionEvent> events) {
  EventCounts c{};
  for (const auto& e : events) ++c[count_index(e.event)];
  return c;
}

inline std::size_t total(const EventCounts& c) {
  std::size_t t = 0;
  for (const auto n : c) t += n;
  return t;
}

/// Threshold in [0, 1] as a percentage label: 0.7 -> "70".
inline std::string percent_label(double fraction) {
  const double pct = fraction * 100.0;
  if (std::abs(pct - std::round(pct)) < 1e-9) return std::to_string(static_cast<long long>(std::round(pct)));
  return detail::format_double(std::round(pct * 1e6) / 1e6);
}

inline std::string threshold_tag(double alpha, double beta) {
  return "a" + percent_label(alpha) + "_b" + percent_label(beta);
}

struct RunConfig {
  std::filesystem::path input;
  LogFormat format;
  std::vector<WindowSpec> windows;
  std::size_t k = 5;
  ImportanceMeasure importance = ImportanceMeasure::SocialPosition;
  SocialPositionOptions social_position;
  std::vector<double> alphas{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  std::vector<double> betas{0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
  double form_dissolve_threshold = 0.10;
  double match_threshold = 0.10;
  // (alpha, beta) shown in the report's per-type columns; defaults to
  // 0.7/0.7 when the grid contains it, else the first grid point
  std::optional<std::pair<double, double>> report_at;
  std::filesystem::path out_dir;
  bool write_frames = false;
  std::optional<std::filesystem::path> groups_file;      // replaces the CPM detector
  std::optional<std::filesystem::path> importance_file;  // replaces the computed measure

  void validate() const {
    const auto fail = [](const std::string& m) { return Error(ErrorCode::InvalidParameter, m); };
    if (windows.empty()) throw Error(ErrorCode::InvalidWindowSpec, "no window specification");
    if (alphas.empty() || betas.empty()) throw fail("alpha and beta lists must be non-empty");
    for (const auto v : alphas)
      if (!(v >= 0.0 && v <= 1.0)) throw fail("alpha values must lie in [0, 1]");
    for (const auto v : betas)
      if (!(v >= 0.0 && v <= 1.0)) throw fail("beta values must lie in [0, 1]");
    if ((groups_file || importance_file) && windows.size() != 1)
      throw fail("external groups or importance files need exactly one window specification");
    for (const auto& w : windows) w.validate();
  }

  std::pair<double, double> report_point() const {
    if (report_at) return *report_at;
    const auto has = [](const std::vector<double>& v, double x) {
      return std::any_of(v.begin(), v.end(), [&](double y) { return std::abs(x - y) < 1e-12; });
    };
    if (has(alphas, 0.7) && has(betas, 0.7)) return {0.7, 0.7};
    return {alphas.front(), betas.front()};
  }

  GedParams params(double alpha, double beta) const {
    return {alpha, beta, form_dissolve_threshold, match_threshold};
  }
};

/// Result of one (alpha, beta) point for one window spec.
struct SweepPoint {
  double alpha = 0.0;
  double beta = 0.0;
  GedResult ged;
  std::vector<EvolutionChain> chains;
  EventCounts counts{};
};

struct WindowRun {
  WindowSpec spec;
  TemporalSocialNetwork tsn;
  std::vector<std::vector<Group>> groups;
  std::vector<ImportanceMap> importance;
  std::vector<SweepPoint> sweep;  // alphas outer, betas inner
};

/// One report row: a window spec with its event counts.
struct ReportRow {
  WindowSpec spec;
  std::size_t timeframes = 0;
  std::size_t groups = 0;
  double avg_group_size = 0.0;  // full precision; rounded only when displayed
  double alpha = 0.0;
  double beta = 0.0;
  EventCounts counts{};
  std::size_t total = 0;
  std::size_t sweep_total = 0;  // events summed over every (alpha, beta) point
};

struct EventCountReport {
  std::vector<ReportRow> rows;
};

struct ExperimentResult {
  std::vector<WindowRun> runs;
  EventCountReport report;
};

/// Slices, detects, weighs and classifies `log` for every window spec and
/// every (alpha, beta) pair of the config. Pure: nothing is written.
inline ExperimentResult run_experiment(const TemporalEventLog& log, const RunConfig& config) {
  config.validate();
  ExperimentResult result;
  const auto [report_alpha, report_beta] = config.report_point();
  for (const auto& spec : config.windows) {
    WindowRun run;
    run.spec = spec;
    try {
      run.tsn = slice(log, spec);
      if (config.groups_file) {
        std::ifstream in(*config.groups_file);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + config.groups_file->string());
        run.groups = bucket_groups(read_groups(in), run.tsn.size());
      } else {
        run.groups = detect_groups(run.tsn, cpm_detector(config.k));
      }
      if (config.importance_file) {
        std::ifstream in(*config.importance_file);
        if (!in) throw Error(ErrorCode::Io, "cannot open " + config.importance_file->string());
        run.importance = read_importance(in, run.tsn.size());
      } else {
        run.importance = compute_importance(run.tsn, config.importance, config.social_position);
      }
    } catch (const NonConvergenceError& e) {
      throw NonConvergenceError(spec.tag() + ": " + e.what(), e.residual());
    } catch (const Error& e) {
      throw Error(e.code(), spec.tag() + ": " + e.what());
    }

    ReportRow row;
    row.spec = spec;
    row.timeframes = run.tsn.size();
    std::size_t members = 0;
    for (const auto& frame : run.groups) {
      row.groups += frame.size();
      for (const auto& g : frame) members += g.size();
    }
    row.avg_group_size = row.groups ? static_cast<double>(members) / static_cast<double>(row.groups) : 0.0;
    row.alpha = report_alpha;
    row.beta = report_beta;

    for (const auto alpha : config.alphas) {
      for (const auto beta : config.betas) {
        SweepPoint point{alpha, beta, ged_run(run.tsn, run.groups, run.importance, config.params(alpha, beta)), {}, {}};
        point.chains = build_chains(point.ged.events);
        point.counts = count_events(point.ged.events);
        row.sweep_total += total(point.counts);
        if (std::abs(alpha - report_alpha) < 1e-12 && std::abs(beta - report_beta) < 1e-12) {
          row.counts = point.counts;
          row.total = total(point.counts);
        }
        run.sweep.push_back(std::move(point));
      }
    }
    result.report.rows.push_back(row);
    result.runs.push_back(std::move(run));
  }
  return result;
}

inline std::string size_label(const ReportRow& row) {
  if (row.spec.scheme == WindowScheme::Increasing)
    return std::to_string(row.spec.offset_days) + "-" +
           std::to_string(row.spec.offset_days * static_cast<std::int64_t>(row.timeframes));
  return std::to_string(row.spec.size_days);
}

/// Event columns follow kAllEventTypes; average group size rounded to an integer.
inline void write_report_csv(std::ostream& out, const EventCountReport& report) {
  out << "timeframe_type,size,offset,timeframes,groups,avg_group_size,alpha,beta";
  for (const auto e : kAllEventTypes) out << ',' << to_string(e);
  out << ",total,sweep_total\n";
  for (const auto& r : report.rows) {
    out << to_string(r.spec.scheme) << ',' << size_label(r) << ',' << r.spec.offset_days << ',' << r.timeframes << ','
        << r.groups << ',' << static_cast<long long>(std::llround(r.avg_group_size)) << ',' << percent_label(r.alpha)
        << ',' << percent_label(r.beta);
    for (const auto c : r.counts) out << ',' << c;
    out << ',' << r.total << ',' << r.sweep_total << '\n';
  }
}

inline nlohmann::json to_json(const EventCountReport& report) {
  auto rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    nlohmann::json j;
    j["timeframe_type"] = std::string(to_string(r.spec.scheme));
    j["size"] = size_label(r);
    j["offset"] = r.spec.offset_days;
    j["timeframes"] = r.timeframes;
    j["groups"] = r.groups;
    j["avg_group_size"] = r.avg_group_size;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    nlohmann::json counts;
    for (const auto e : kAllEventTypes) counts[std::string(to_string(e))] = r.counts[count_index(e)];
    j["counts"] = counts;
    j["total"] = r.total;
    j["sweep_total"] = r.sweep_total;
    rows.push_back(j);
  }
  return {{"rows", rows}};
}

/// Event counts for every (window, alpha, beta) point: the data behind the
/// per-configuration bar charts.
inline void write_grid_csv(std::ostream& out, const ExperimentResult& result) {
  out << "window,alpha,beta";
  for (const auto e : kAllEventTypes) out << ',' << to_string(e);
  out << ",total\n";
  for (const auto& run : result.runs) {
    for (const auto& p : run.sweep) {
      out << run.spec.tag() << ',' << percent_label(p.alpha) << ',' << percent_label(p.beta);
      for (const auto c : p.counts) out << ',' << c;
      out << ',' << total(p.counts) << '\n';
    }
  }
}

/// Per frame transition counts for one sweep point.
inline void write_series_csv(std::ostream& out, const SweepPoint& point, std::size_t frame_count) {
  out << "from_frame,to_frame";
  for (const auto e : kAllEventTypes) out << ',' << to_string(e);
  out << ",total\n";
  std::vector<EventCounts> per(frame_count > 0 ? frame_count - 1 : 0, EventCounts{});
  for (const auto& e : point.ged.events) ++per.at(e.from_frame - 1)[count_index(e.event)];
  for (std::size_t f = 0; f < per.size(); ++f) {
    out << f + 1 << ',' << f + 2;
    for (const auto c : per[f]) out << ',' << c;
    out << ',' << total(per[f]) << '\n';
  }
}

namespace detail {

template <typename Fn>
void write_file(const std::filesystem::path& path, Fn&& fn) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  fn(out);
  if (!out) throw Error(ErrorCode::Io, "failed writing " + path.string());
}

}  // namespace detail

/// Output layout:
///   report.csv, report.json, grid.csv
///   <window tag>/frames.csv, groups.csv, importance.csv[, frames/frame_NNN.csv]
///   <window tag>/a<alpha>_b<beta>/events.csv, events.json, chains.csv,
///                                 unclassified.csv, series.csv
inline void write_experiment(const ExperimentResult& result, const RunConfig& config) {
  namespace fs = std::filesystem;
  const auto& root = config.out_dir;
  fs::create_directories(root);
  detail::write_file(root / "report.csv", [&](std::ostream& o) { write_report_csv(o, result.report); });
  detail::write_file(root / "report.json", [&](std::ostream& o) { o << to_json(result.report).dump(2) << '\n'; });
  detail::write_file(root / "grid.csv", [&](std::ostream& o) { write_grid_csv(o, result); });
  for (const auto& run : result.runs) {
    const auto dir = root / run.spec.tag();
    fs::create_directories(dir);
    detail::write_file(dir / "frames.csv", [&](std::ostream& o) { write_frame_manifest(o, run.tsn); });
    detail::write_file(dir / "groups.csv", [&](std::ostream& o) { write_groups(o, run.groups); });
    detail::write_file(dir / "importance.csv", [&](std::ostream& o) { write_importance(o, run.importance); });
    if (config.write_frames) {
      fs::create_directories(dir / "frames");
      for (const auto& f : run.tsn.frames) {
        char name[32];
        std::snprintf(name, sizeof name, "frame_%03zu.csv", f.index);
        detail::write_file(dir / "frames" / name, [&](std::ostream& o) { write_edge_list(o, f.snapshot); });
      }
    }
    for (const auto& p : run.sweep) {
      const auto sub = dir / threshold_tag(p.alpha, p.beta);
      fs::create_directories(sub);
      detail::write_file(sub / "events.csv", [&](std::ostream& o) { write_events(o, p.ged.events); });
      detail::write_file(sub / "events.json", [&](std::ostream& o) { o << to_json(p.ged.events).dump(2) << '\n'; });
      detail::write_file(sub / "chains.csv", [&](std::ostream& o) { write_chains(o, p.chains); });
      detail::write_file(sub / "unclassified.csv", [&](std::ostream& o) { write_unclassified(o, p.ged.unclassified); });
      detail::write_file(sub / "series.csv", [&](std::ostream& o) { write_series_csv(o, p, run.tsn.size()); });
    }
  }
}

inline TemporalEventLog load_log(const std::filesystem::path& path, const LogFormat& format) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  return parse_event_log(in, format);
}

/// Reads `config.input`, runs the sweep and writes every artifact.
inline ExperimentResult run_experiment(const RunConfig& config) {
  const auto log = load_log(config.input, config.format);
  auto result = run_experiment(log, config);
  if (!config.out_dir.empty()) write_experiment(result, config);
  return result;
}

// ---------------------------------------------------------------------------
// Scenario verification

struct VerifyOptions {
  double alpha = 0.5;
  double beta = 0.5;
  std::uint64_t seed = 1;
  ImportanceMeasure importance = ImportanceMeasure::SocialPosition;
  SocialPositionOptions social_position;
  double form_dissolve_threshold = 0.10;
  double match_threshold = 0.10;
  std::optional<std::vector<EvolutionEvent>> truth;  // replaces the script's ground truth
};

struct TypeScore {
  std::size_t detected = 0;
  std::size_t expected = 0;
  std::size_t matched = 0;

  double precision() const { return detected ? static_cast<double>(matched) / static_cast<double>(detected) : 1.0; }
  double recall() const { return expected ? static_cast<double>(matched) / static_cast<double>(expected) : 1.0; }
};

struct VerifyResult {
  bool exact = false;
  std::vector<EvolutionEvent> expected;  // planted group ids
  std::vector<EvolutionEvent> detected;  // translated to planted group ids
  std::vector<EvolutionEvent> missing;
  std::vector<EvolutionEvent> unexpected;
  std::array<TypeScore, kAllEventTypes.size()> scores{};
  std::size_t frames = 0;
  std::vector<std::size_t> groups_per_frame;
  std::vector<EvolutionChain> chains;  // in detected group ids
};

namespace detail {

inline auto event_key(const EvolutionEvent& e) {
  return std::make_tuple(e.from_frame, e.to_frame, e.from_group, e.to_group, e.event);
}

inline bool key_less(const EvolutionEvent& a, const EvolutionEvent& b) { return event_key(a) < event_key(b); }

// Detected group -> planted group of the same frame with the largest overlap
// (ties to the lower planted index); absent when nothing overlaps.
inline std::vector<std::vector<std::optional<std::size_t>>> map_to_planted(
    const std::vector<std::vector<Group>>& detected, const ScenarioScript& script) {
  std::vector<std::vector<std::optional<std::size_t>>> out(detected.size());
  for (std::size_t f = 0; f < detected.size(); ++f) {
    for (const auto& g : detected[f]) {
      std::optional<std::size_t> best;
      std::size_t best_overlap = 0;
      if (f < script.frames.size()) {
        for (std::size_t p = 0; p < script.frames[f].size(); ++p) {
          const auto& m = script.frames[f][p].members;
          std::size_t overlap = 0;
          for (const auto v : g.members) overlap += std::binary_search(m.begin(), m.end(), v) ? 1 : 0;
          if (overlap > best_overlap) {
            best_overlap = overlap;
            best = p;
          }
        }
      }
      if (out[f].size() <= g.group_id) out[f].resize(g.group_id + 1);
      out[f][g.group_id] = best;
    }
  }
  return out;
}

}  // namespace detail

/// Generates the scenario's log, runs slicing (disjoint, one window per
/// scripted frame), clique percolation, importance and event discovery, and
/// compares the events with the ground truth after mapping each detected
/// group onto the planted group it overlaps most.
inline VerifyResult verify_scenario(const ScenarioScript& script, const VerifyOptions& opt = {}) {
  const auto synthetic = generate(script, opt.seed);
  const WindowSpec spec{WindowScheme::Disjoint, script.frame_length_days, script.frame_length_days, false};
  const auto tsn = slice(synthetic.log, spec);
  const auto groups = detect_groups(tsn, cpm_detector(script.k));
  const auto importance = compute_importance(tsn, opt.importance, opt.social_position);
  const GedParams params{opt.alpha, opt.beta, opt.form_dissolve_threshold, opt.match_threshold};
  const auto ged = ged_run(tsn, groups, importance, params);

  VerifyResult r;
  r.frames = tsn.size();
  for (const auto& f : groups) r.groups_per_frame.push_back(f.size());
  r.chains = build_chains(ged.events);

  const auto mapping = detail::map_to_planted(groups, script);
  const auto translate = [&](std::size_t frame, const std::optional<std::size_t>& id) -> std::optional<std::size_t> {
    if (!id) return std::nullopt;
    const auto& m = mapping.at(frame - 1);
    // unmapped detected groups get an id no planted group can have
    return *id < m.size() && m[*id] ? *m[*id] : SIZE_MAX;
  };
  for (const auto& e : ged.events) {
    auto t = e;
    t.from_group = translate(e.from_frame, e.from_group);
    t.to_group = translate(e.to_frame, e.to_group);
    r.detected.push_back(t);
  }
  r.expected = opt.truth ? *opt.truth : synthetic.ground_truth;
  std::sort(r.detected.begin(), r.detected.end(), detail::key_less);
  std::sort(r.expected.begin(), r.expected.end(), detail::key_less);
  std::set_difference(r.expected.begin(), r.expected.end(), r.detected.begin(), r.detected.end(),
                      std::back_inserter(r.missing), detail::key_less);
  std::set_difference(r.detected.begin(), r.detected.end(), r.expected.begin(), r.expected.end(),
                      std::back_inserter(r.unexpected), detail::key_less);
  std::vector<EvolutionEvent> matched;
  std::set_intersection(r.detected.begin(), r.detected.end(), r.expected.begin(), r.expected.end(),
                        std::back_inserter(matched), detail::key_less);
  for (const auto& e : r.detected) ++r.scores[count_index(e.event)].detected;
  for (const auto& e : r.expected) ++r.scores[count_index(e.event)].expected;
  for (const auto& e : matched) ++r.scores[count_index(e.event)].matched;
  r.exact = r.missing.empty() && r.unexpected.empty();
  return r;
}

inline void write_verify_report(std::ostream& out, const VerifyResult& r) {
  out << "verdict: " << (r.exact ? "pass" : "fail") << '\n';
  out << "frames: " << r.frames << '\n';
  out << "groups per frame:";
  for (const auto n : r.groups_per_frame) out << ' ' << n;
  out << '\n';
  out << "event,detected,expected,matched,precision,recall\n";
  for (const auto e : kAllEventTypes) {
    const auto& s = r.scores[count_index(e)];
    out << to_string(e) << ',' << s.detected << ',' << s.expected << ',' << s.matched << ','
        << detail::format_double(s.precision()) << ',' << detail::format_double(s.recall()) << '\n';
  }
  for (const auto& e : r.missing) out << "missing: " << detail::format_truth(e) << '\n';
  for (const auto& e : r.unexpected) out << "unexpected: " << detail::format_truth(e) << '\n';
}

}  // namespace ged
