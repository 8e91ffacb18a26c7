// Command-line front end for the group evolution toolkit.
//
//   ged run LOG [--window-type T --size S --offset O | --window T:S:O ...]
//               [--k 5] [--importance social-position|degree] [--epsilon 0.9]
//               [--alpha 50,60,...] [--beta ...] [--threshold 10] [--out DIR]
//   ged slice LOG --window-type T --size S --offset O --out DIR
//   ged generate SCRIPT|--figure1 [--seed N] --out LOG
//   ged verify SCRIPT|--figure1 [--truth FILE] [--alpha 50] [--beta 50]
//   ged figure1 [--k 5]
//
// Exit codes: 0 success, 1 input error, 2 verification failure,
// 3 non-convergence.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "ged/harness.hpp"

namespace {

constexpr int kExitInput = 1;
constexpr int kExitVerify = 2;
constexpr int kExitNonConvergence = 3;

// "50,60,70" or "70%" to fractions
std::vector<double> parse_percent_list(const std::string& text) {
  std::vector<double> out;
  for (auto part : ged::detail::split(text, ',')) {
    if (part.ends_with('%')) part.remove_suffix(1);
    const auto v = ged::detail::parse_double(part);
    if (!v || *v < 0.0 || *v > 100.0)
      throw ged::Error(ged::ErrorCode::Parse, "expected percentages in [0, 100], got '" + text + "'");
    out.push_back(*v / 100.0);
  }
  return out;
}

ged::WindowSpec make_window(const std::string& type, std::int64_t size, std::int64_t offset, bool keep_partial) {
  const auto scheme = ged::parse_window_scheme(type);
  if (!scheme) throw ged::Error(ged::ErrorCode::InvalidWindowSpec, "unknown window type '" + type + "'");
  ged::WindowSpec spec{*scheme, size, offset, keep_partial};
  if (*scheme == ged::WindowScheme::Increasing) spec.size_days = offset;
  if (*scheme == ged::WindowScheme::Disjoint && size == 0) spec.size_days = offset;
  if (*scheme == ged::WindowScheme::Disjoint && offset == 0) spec.offset_days = size;
  spec.validate();
  return spec;
}

// TYPE:SIZE:OFFSET, e.g. overlapping:90:30 or increasing::30
ged::WindowSpec parse_window(const std::string& text, bool keep_partial) {
  const auto parts = ged::detail::split(text, ':');
  if (parts.size() != 3) throw ged::Error(ged::ErrorCode::InvalidWindowSpec, "expected TYPE:SIZE:OFFSET, got " + text);
  const auto size = parts[1].empty() ? std::optional<std::int64_t>(0) : ged::detail::parse_int<std::int64_t>(parts[1]);
  const auto offset = ged::detail::parse_int<std::int64_t>(parts[2]);
  if (!size || !offset) throw ged::Error(ged::ErrorCode::InvalidWindowSpec, "bad window " + text);
  return make_window(std::string(parts[0]), *size, *offset, keep_partial);
}

ged::TimestampFormat parse_ts_format(const std::string& s) {
  if (s == "iso") return ged::TimestampFormat::IsoDate;
  if (s == "epoch") return ged::TimestampFormat::EpochSeconds;
  return ged::TimestampFormat::Auto;
}

std::optional<ged::Day> parse_day_flag(const std::string& s) {
  if (s.empty()) return std::nullopt;
  const auto d = ged::parse_timestamp(s);
  if (!d) throw ged::Error(ged::ErrorCode::UnparseableTimestamp, "'" + s + "'");
  return d;
}

ged::ScenarioScript load_script(const std::string& path, bool figure1, std::size_t k) {
  if (figure1) return ged::figure1_scenario(k);
  std::ifstream in(path);
  if (!in) throw ged::Error(ged::ErrorCode::Io, "cannot open " + path);
  return ged::parse_script(in);
}

struct LogFlags {
  std::string delimiter = ",";
  std::string timestamps = "auto";
  std::string span_start;
  std::string span_end;

  void add(CLI::App* app) {
    app->add_option("--delimiter", delimiter, "Field delimiter")->capture_default_str();
    app->add_option("--timestamps", timestamps, "Timestamp format")
        ->check(CLI::IsMember({"auto", "iso", "epoch"}))
        ->capture_default_str();
    app->add_option("--span-start", span_start, "First day of the span (YYYY-MM-DD)");
    app->add_option("--span-end", span_end, "Last day of the span (YYYY-MM-DD)");
  }

  ged::LogFormat format() const {
    if (delimiter.size() != 1) throw ged::Error(ged::ErrorCode::Parse, "delimiter must be one character");
    return {delimiter[0], parse_ts_format(timestamps), parse_day_flag(span_start), parse_day_flag(span_end)};
  }
};

struct WindowFlags {
  std::string type;
  std::int64_t size = 0;
  std::int64_t offset = 0;
  std::vector<std::string> windows;
  bool keep_partial = false;

  void add(CLI::App* app) {
    app->add_option("--window-type", type, "disjoint | overlapping | increasing")
        ->check(CLI::IsMember({"disjoint", "overlapping", "increasing"}));
    app->add_option("--size", size, "Window size in days");
    app->add_option("--offset", offset, "Window offset in days");
    app->add_option("--window", windows, "Additional window as TYPE:SIZE:OFFSET (repeatable)");
    app->add_flag("--keep-partial", keep_partial, "Keep trailing partial windows");
  }

  std::vector<ged::WindowSpec> specs() const {
    std::vector<ged::WindowSpec> out;
    if (!type.empty()) out.push_back(make_window(type, size, offset, keep_partial));
    for (const auto& w : windows) out.push_back(parse_window(w, keep_partial));
    if (out.empty()) throw ged::Error(ged::ErrorCode::InvalidWindowSpec, "give --window-type or --window");
    return out;
  }
};

ged::ImportanceMeasure parse_measure(const std::string& s) {
  return s == "degree" ? ged::ImportanceMeasure::Degree : ged::ImportanceMeasure::SocialPosition;
}

void print_warnings(const std::vector<double>& alphas, const std::vector<double>& betas) {
  for (const auto a : alphas)
    for (const auto& w : ged::GedParams{a, 0.5}.warnings()) std::cerr << "warning: " << w << '\n';
  for (const auto b : betas)
    for (const auto& w : ged::GedParams{0.5, b}.warnings()) std::cerr << "warning: " << w << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Group evolution discovery in temporal social networks"};
  app.require_subcommand(1);

  // run
  auto* run = app.add_subcommand("run", "Slice a log, detect groups and classify evolution events");
  std::string run_input;
  LogFlags run_log;
  WindowFlags run_windows;
  std::size_t k = 5;
  std::string measure = "social-position";
  ged::SocialPositionOptions sp;
  std::string alphas = "50,60,70,80,90,100";
  std::string betas = "50,60,70,80,90,100";
  std::string report_at;
  double threshold = 10.0;
  double match_threshold = -1.0;
  std::string out_dir = "ged_out";
  bool write_frames = false;
  std::string groups_file, importance_file;
  run->add_option("input", run_input, "Interaction log")->required()->check(CLI::ExistingFile);
  run_log.add(run);
  run_windows.add(run);
  run->add_option("--k", k, "Clique size for clique percolation")->capture_default_str();
  run->add_option("--importance", measure, "Node importance measure")
      ->check(CLI::IsMember({"social-position", "degree"}))
      ->capture_default_str();
  run->add_option("--epsilon", sp.epsilon, "Social position damping")->capture_default_str();
  run->add_option("--max-iter", sp.max_iterations, "Social position iteration cap")->capture_default_str();
  run->add_option("--alpha", alphas, "Alpha percentages, comma separated")->capture_default_str();
  run->add_option("--beta", betas, "Beta percentages, comma separated")->capture_default_str();
  run->add_option("--report-at", report_at, "ALPHA,BETA percentages shown in the report row");
  run->add_option("--threshold", threshold, "Forming/dissolving threshold in percent")->capture_default_str();
  run->add_option("--match-threshold", match_threshold, "Match threshold in percent (defaults to --threshold)");
  run->add_option("--out", out_dir, "Output directory")->capture_default_str();
  run->add_flag("--write-frames", write_frames, "Also write every frame's edge list");
  run->add_option("--groups", groups_file, "Use an external groups file instead of clique percolation");
  run->add_option("--importance-file", importance_file, "Use an external importance file");

  // slice
  auto* slice_cmd = app.add_subcommand("slice", "Cut a log into timeframe edge lists");
  std::string slice_input;
  LogFlags slice_log;
  WindowFlags slice_windows;
  std::string slice_out = "frames";
  slice_cmd->add_option("input", slice_input, "Interaction log")->required()->check(CLI::ExistingFile);
  slice_log.add(slice_cmd);
  slice_windows.add(slice_cmd);
  slice_cmd->add_option("--out", slice_out, "Output directory")->capture_default_str();

  // generate
  auto* gen = app.add_subcommand("generate", "Generate a synthetic log from a scenario script");
  std::string gen_script, gen_out;
  bool gen_figure1 = false;
  std::size_t gen_k = 5;
  std::uint64_t gen_seed = 1;
  gen->add_option("script", gen_script, "Scenario script");
  gen->add_flag("--figure1", gen_figure1, "Use the built-in single-group history scenario");
  gen->add_option("--k", gen_k, "Clique size for --figure1")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Noise seed")->capture_default_str();
  gen->add_option("--out", gen_out, "Output log (stdout when omitted)");

  // verify
  auto* verify = app.add_subcommand("verify", "Check event discovery against a scenario's ground truth");
  std::string ver_script, ver_truth;
  bool ver_figure1 = false;
  std::size_t ver_k = 5;
  ged::VerifyOptions vopt;
  std::string ver_alpha = "50", ver_beta = "50", ver_measure = "social-position";
  verify->add_option("script", ver_script, "Scenario script");
  verify->add_flag("--figure1", ver_figure1, "Use the built-in single-group history scenario");
  verify->add_option("--k", ver_k, "Clique size for --figure1")->capture_default_str();
  verify->add_option("--truth", ver_truth, "Ground-truth file replacing the script's truth lines");
  verify->add_option("--alpha", ver_alpha, "Alpha percentage")->capture_default_str();
  verify->add_option("--beta", ver_beta, "Beta percentage")->capture_default_str();
  verify->add_option("--seed", vopt.seed, "Noise seed")->capture_default_str();
  verify->add_option("--importance", ver_measure, "Node importance measure")
      ->check(CLI::IsMember({"social-position", "degree"}))
      ->capture_default_str();

  // figure1
  auto* fig = app.add_subcommand("figure1", "Print the built-in single-group history scenario script");
  std::size_t fig_k = 5;
  fig->add_option("--k", fig_k, "Clique size")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  try {
    if (*run) {
      ged::RunConfig config;
      config.input = run_input;
      config.format = run_log.format();
      config.windows = run_windows.specs();
      config.k = k;
      config.importance = parse_measure(measure);
      config.social_position = sp;
      config.alphas = parse_percent_list(alphas);
      config.betas = parse_percent_list(betas);
      if (!report_at.empty()) {
        const auto v = parse_percent_list(report_at);
        if (v.size() != 2) throw ged::Error(ged::ErrorCode::Parse, "--report-at needs ALPHA,BETA");
        config.report_at = std::pair{v[0], v[1]};
      }
      config.form_dissolve_threshold = parse_percent_list(std::to_string(threshold)).at(0);
      config.match_threshold =
          match_threshold < 0 ? config.form_dissolve_threshold : parse_percent_list(std::to_string(match_threshold)).at(0);
      config.out_dir = out_dir;
      config.write_frames = write_frames;
      if (!groups_file.empty()) config.groups_file = groups_file;
      if (!importance_file.empty()) config.importance_file = importance_file;
      print_warnings(config.alphas, config.betas);
      const auto result = ged::run_experiment(config);
      ged::write_report_csv(std::cout, result.report);
      return 0;
    }
    if (*slice_cmd) {
      const auto log = ged::load_log(slice_input, slice_log.format());
      if (log.rejected_count() > 0) std::cerr << "rejected " << log.rejected_count() << " lines\n";
      for (const auto& spec : slice_windows.specs()) {
        const auto tsn = ged::slice(log, spec);
        const std::filesystem::path dir = std::filesystem::path(slice_out) / spec.tag();
        std::filesystem::create_directories(dir);
        ged::detail::write_file(dir / "frames.csv", [&](std::ostream& o) { ged::write_frame_manifest(o, tsn); });
        for (const auto& f : tsn.frames) {
          char name[32];
          std::snprintf(name, sizeof name, "frame_%03zu.csv", f.index);
          ged::detail::write_file(dir / name, [&](std::ostream& o) { ged::write_edge_list(o, f.snapshot); });
        }
        std::cout << spec.tag() << ": " << tsn.size() << " frames\n";
      }
      return 0;
    }
    if (*gen) {
      if (gen_script.empty() && !gen_figure1) throw ged::Error(ged::ErrorCode::Parse, "give a script or --figure1");
      const auto synthetic = ged::generate(load_script(gen_script, gen_figure1, gen_k), gen_seed);
      if (gen_out.empty()) {
        ged::write_event_log(std::cout, synthetic.log);
      } else {
        ged::detail::write_file(gen_out, [&](std::ostream& o) { ged::write_event_log(o, synthetic.log); });
      }
      return 0;
    }
    if (*verify) {
      if (ver_script.empty() && !ver_figure1) throw ged::Error(ged::ErrorCode::Parse, "give a script or --figure1");
      const auto script = load_script(ver_script, ver_figure1, ver_k);
      vopt.alpha = parse_percent_list(ver_alpha).at(0);
      vopt.beta = parse_percent_list(ver_beta).at(0);
      vopt.importance = parse_measure(ver_measure);
      if (!ver_truth.empty()) {
        std::ifstream in(ver_truth);
        if (!in) throw ged::Error(ged::ErrorCode::Io, "cannot open " + ver_truth);
        vopt.truth = ged::read_truth(in);
      }
      const auto result = ged::verify_scenario(script, vopt);
      ged::write_verify_report(std::cout, result);
      return result.exact ? 0 : kExitVerify;
    }
    if (*fig) {
      ged::write_script(std::cout, ged::figure1_scenario(fig_k));
      return 0;
    }
  } catch (const ged::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNonConvergence;
  } catch (const ged::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  }
  return 0;
}
