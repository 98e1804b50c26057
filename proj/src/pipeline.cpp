#include "retnet/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <regex>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "retnet/influence.hpp"
#include "retnet/parallel.hpp"
#include "retnet/stats.hpp"

namespace retnet {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

std::ofstream open_out(const fs::path& p) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  return out;
}

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const PipelineError&) {
    throw;
  } catch (const std::exception& e) {
    throw PipelineError(name, e.what());
  }
}

std::string partition_file(int t) { return fmt::format("partition_t{:03}.csv", t); }

json config_json(const PipelineConfig& cfg) {
  return {
      {"inputs", cfg.inputs},
      {"format", cfg.format == Format::Jsonl ? "jsonl" : "csv"},
      {"strict", cfg.strict},
      {"window_weeks", cfg.window.window_weeks},
      {"slide_weeks", cfg.window.slide_weeks},
      {"half_life_weeks", cfg.window.half_life_weeks},
      {"stream_start", cfg.window.stream_start ? json(*cfg.window.stream_start) : json(nullptr)},
      {"stream_end", cfg.window.stream_end ? json(*cfg.window.stream_end) : json(nullptr)},
      {"trials", cfg.ensemble.trials},
      {"threshold", cfg.ensemble.threshold},
      {"base_seed", cfg.ensemble.base_seed},
      {"k", cfg.selection.k},
      {"top_n", cfg.top_n},
      {"edge_threshold", cfg.edge_threshold},
      {"confidence", cfg.confidence},
      {"labels", cfg.labels_path ? json(*cfg.labels_path) : json(nullptr)},
      {"export_edges", cfg.export_edges},
  };
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

std::string canonical_config(const PipelineConfig& cfg) { return config_json(cfg).dump(); }

ParseResult load_inputs(const std::vector<std::string>& inputs, Format format, bool strict) {
  if (inputs.empty()) throw std::invalid_argument("no input files");
  ParseResult merged;
  std::vector<EventStream> parts;
  for (const auto& path : inputs) {
    auto r = parse_events_file(path, {format, strict});
    merged.report.lines += r.report.lines;
    merged.report.parsed += r.report.parsed;
    for (const auto& [reason, n] : r.report.skipped) merged.report.skipped[reason] += n;
    parts.push_back(std::move(r.stream));
  }
  merged.stream = merge_streams(std::move(parts));
  return merged;
}

void write_windows(const fs::path& dir, const SnapshotSeries& series, bool with_edges) {
  auto out = open_out(dir / "windows.csv");
  out << "t,window_begin,window_end,nodes,edges,retweets,mass,originals,unacceptable,unacceptable_fraction,"
         "retweeted_originals,retweeted_unacceptable_fraction\n";
  if (with_edges) fs::create_directories(dir / "edges");
  for (const auto& g : series.networks) {
    NodeTally sum;
    for (const auto& t : g.tallies) {
      sum.originals_posted += t.originals_posted;
      sum.unacceptable_posted += t.unacceptable_posted;
      sum.retweeted_originals += t.retweeted_originals;
      sum.unacceptable_retweeted_originals += t.unacceptable_retweeted_originals;
    }
    auto frac = [](std::size_t a, std::size_t b) {
      return b ? fmt::format("{:.4f}", static_cast<double>(a) / static_cast<double>(b)) : std::string();
    };
    out << fmt::format("{},{},{},{},{},{},{:.9f},{},{},{},{},{}\n", g.t, g.window_begin, g.window_end, g.nodes.size(),
                       g.edges.size(), g.retweet_events, g.total_weight(), sum.originals_posted,
                       sum.unacceptable_posted, frac(sum.unacceptable_posted, sum.originals_posted),
                       sum.retweeted_originals,
                       frac(sum.unacceptable_retweeted_originals, sum.retweeted_originals));
    if (with_edges) {
      auto edges = open_out(dir / "edges" / fmt::format("edges_t{:03}.csv", g.t));
      write_edge_list(edges, g);
    }
  }
}

std::vector<Partition> detect_communities(const SnapshotSeries& series, const EnsembleConfig& cfg) {
  std::vector<Partition> partitions(series.networks.size());
  parallel_for(series.networks.size(), [&](std::size_t i) {
    partitions[i] = ensemble_louvain(project_undirected(series.networks[i]), cfg);
    partitions[i].set_t(series.networks[i].t);
  });
  return partitions;
}

void write_partitions(const fs::path& dir, const std::vector<Partition>& partitions) {
  fs::create_directories(dir / "partitions");
  for (const auto& p : partitions) {
    auto out = open_out(dir / "partitions" / partition_file(p.t()));
    write_partition(out, p);
  }
}

std::vector<Partition> read_partitions(const fs::path& dir) {
  const fs::path root = fs::exists(dir / "partitions") ? dir / "partitions" : dir;
  static const std::regex name(R"(partition_t(\d+)\.csv)");
  std::vector<std::pair<int, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(root)) {
    std::smatch m;
    const auto fname = entry.path().filename().string();
    if (std::regex_match(fname, m, name)) files.emplace_back(std::stoi(m[1].str()), entry.path());
  }
  if (files.empty()) throw std::runtime_error("no partition_t*.csv files in " + root.string());
  std::sort(files.begin(), files.end());
  std::vector<Partition> out;
  for (const auto& [t, path] : files) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    out.push_back(read_partition(in, t));
  }
  return out;
}

Selection write_selection(const fs::path& dir, const std::vector<Partition>& partitions, const SelectionConfig& cfg) {
  {
    auto out = open_out(dir / "similarity.csv");
    write_adjacent_similarity(out, partitions);
  }
  auto sel = select_timepoints(partitions, cfg);
  json list = json::array();
  for (auto i : sel.indices) list.push_back(partitions[i].t());
  auto out = open_out(dir / "selected.json");
  out << list.dump() << '\n';
  return sel;
}

std::vector<std::size_t> read_selection(const fs::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + file.string());
  return json::parse(in).get<std::vector<std::size_t>>();
}

void write_reports(const fs::path& dir, const EventStream& stream, const SnapshotSeries& series,
                   const std::vector<Partition>& partitions, const std::vector<std::size_t>& selected,
                   const PipelineConfig& cfg) {
  if (partitions.size() != series.networks.size()) {
    throw std::invalid_argument(fmt::format("{} partitions for {} windows", partitions.size(), series.networks.size()));
  }
  CommunityLabels labels;
  if (cfg.labels_path) {
    std::ifstream in(*cfg.labels_path);
    if (!in) throw std::runtime_error("cannot open labels file " + *cfg.labels_path);
    labels = read_labels(in);
  }

  const ReportOptions opts{cfg.top_n, 5};
  const std::size_t count = series.networks.size();
  std::vector<std::vector<UserInfluence>> users(count);
  std::vector<CommunityReport> reports(count);
  parallel_for(count, [&](std::size_t i) {
    const auto& g = series.networks[i];
    users[i] = user_influence(stream, g.window_begin, g.window_end);
    reports[i] = community_hate_shares(g, partitions[i], opts, users[i]);
  });

  {
    auto out = open_out(dir / "communities.csv");
    out << "t,nodes,communities,modularity\n";
    for (std::size_t i = 0; i < count; ++i) {
      const auto& p = partitions[i];
      out << fmt::format("{},{},{},{:.6f}\n", p.t(), p.size(), p.community_count(),
                         modularity(project_undirected(series.networks[i]), p));
    }
  }
  {
    auto out = open_out(dir / "shares.csv");
    write_shares_csv(out, reports);
  }

  std::vector<Timepoint> timepoints;
  std::vector<CommunityReport> selected_reports;
  auto influence_out = open_out(dir / "influence.csv");
  auto users_out = open_out(dir / "users.csv");
  auto gini_out = open_out(dir / "gini.csv");
  influence_out << "t,from_community,to_community,W,I_component\n";
  users_out << "t,user_id,community,hindex,originals,unacceptable,unacceptable_fraction\n";
  gini_out << "t,community,members,gini\n";
  for (auto t : selected) {
    if (t >= count) throw std::out_of_range(fmt::format("selected timepoint {} beyond {} windows", t, count));
    const auto& g = series.networks[t];
    const auto& p = partitions[t];
    Timepoint tp{static_cast<int>(t), community_influence(g, p), reports[t]};
    write_influence_matrix(influence_out, tp.t, tp.influence, false);

    std::vector<std::vector<double>> hvals(static_cast<std::size_t>(p.community_count()));
    for (const auto& u : users[t]) {
      const auto c = p.community_of(u.user);
      if (!c) continue;
      hvals[static_cast<std::size_t>(*c)].push_back(static_cast<double>(u.hindex));
      users_out << fmt::format("{},{},{},{},{},{},{}\n", t, u.user, *c, u.hindex, u.originals_posted,
                               u.unacceptable_posted,
                               u.unacceptable_fraction ? fmt::format("{:.4f}", *u.unacceptable_fraction) : "");
    }
    for (std::size_t c = 0; c < std::min(cfg.top_n, hvals.size()); ++c) {
      std::string value;
      if (std::any_of(hvals[c].begin(), hvals[c].end(), [](double v) { return v > 0.0; })) {
        value = fmt::format("{:.4f}", gini(hvals[c]));
      }
      gini_out << fmt::format("{},{},{},{}\n", t, c, p.community_size(static_cast<int>(c)), value);
    }
    selected_reports.push_back(reports[t]);
    timepoints.push_back(std::move(tp));
  }

  const auto meta = meta_network(timepoints, cfg.top_n, cfg.edge_threshold, labels);
  {
    auto out = open_out(dir / "meta_network.dot");
    write_dot(out, meta);
  }
  {
    auto out = open_out(dir / "meta_network.json");
    write_json(out, meta);
  }
  {
    auto out = open_out(dir / "comparison.csv");
    write_comparison_csv(out, compare_communities(selected_reports, labels));
  }

  const auto table = retweet_contingency(stream);
  json odds = {{"n11_retweeted_acceptable", table.n11},
               {"n10_retweeted_unacceptable", table.n10},
               {"n01_not_retweeted_acceptable", table.n01},
               {"n00_not_retweeted_unacceptable", table.n00},
               {"confidence", cfg.confidence}};
  try {
    const auto r = log_odds_ratio(table, cfg.confidence);
    odds["log_odds_ratio"] = r.log_or;
    odds["standard_error"] = r.se;
    odds["ci_halfwidth"] = r.ci_halfwidth;
    odds["odds_ratio"] = r.odds_ratio;
    odds["odds_ratio_lower"] = r.or_lower;
    odds["odds_ratio_upper"] = r.or_upper;
  } catch (const std::domain_error& e) {
    odds["undefined"] = e.what();
  }
  auto out = open_out(dir / "odds_ratio.json");
  out << odds.dump(2) << '\n';
}

RunSummary run_pipeline(const PipelineConfig& cfg) {
  stage("config", [&] {
    cfg.window.validate();
    cfg.ensemble.validate();
    if (cfg.out.empty()) throw std::invalid_argument("output directory required");
    if (fs::exists(cfg.out) && !fs::is_empty(cfg.out) && !fs::exists(cfg.out / "manifest.json")) {
      throw std::invalid_argument("output directory " + cfg.out.string() + " exists and is not a previous run");
    }
    return 0;
  });

  const fs::path staging = cfg.out.string() + ".partial";
  fs::remove_all(staging);
  fs::create_directories(staging);
  try {
    RunSummary summary;
    const auto parsed = stage("ingest", [&] { return load_inputs(cfg.inputs, cfg.format, cfg.strict); });
    summary.events = parsed.stream.events.size();

    const auto series = stage("snapshot", [&] {
      auto s = snapshot_series(parsed.stream, cfg.window);
      write_windows(staging, s, cfg.export_edges);
      return s;
    });
    summary.windows = series.networks.size();

    const auto partitions = stage("communities", [&] {
      auto p = detect_communities(series, cfg.ensemble);
      write_partitions(staging, p);
      return p;
    });

    const auto selection = stage("select", [&] {
      if (partitions.size() < 2) {
        Selection only;
        only.indices = {0};
        auto out = open_out(staging / "selected.json");
        out << "[0]\n";
        return only;
      }
      return write_selection(staging, partitions, cfg.selection);
    });
    summary.selected = selection.indices;

    stage("report", [&] {
      write_reports(staging, parsed.stream, series, partitions, selection.indices, cfg);
      return 0;
    });

    summary.config_hash = fnv1a_hex(canonical_config(cfg));
    stage("manifest", [&] {
      const auto validation = validate_stream(parsed.stream);
      json skipped = json::object();
      for (const auto& [reason, n] : parsed.report.skipped) skipped[reason] = n;
      json labels = json::object();
      for (const auto& [l, n] : validation.label_counts) labels[std::string(to_string(l))] = n;
      json manifest = {
          {"config", config_json(cfg)},
          {"config_hash", summary.config_hash},
          {"seeds", {{"base_seed", cfg.ensemble.base_seed}, {"trials", cfg.ensemble.trials}}},
          {"stream", {{"start", parsed.stream.start}, {"end", parsed.stream.end}}},
          {"parse_report", {{"lines", parsed.report.lines}, {"parsed", parsed.report.parsed}, {"skipped", skipped}}},
          {"counts",
           {{"events", validation.events},
            {"originals", validation.originals},
            {"retweets", validation.retweets},
            {"self_retweets", validation.self_retweets},
            {"duplicate_ids", validation.duplicate_ids.size()},
            {"dangling_originals", validation.dangling_originals},
            {"labels", labels},
            {"windows", summary.windows},
            {"clipped", series.clipped},
            {"selected", summary.selected},
            {"eliminations", selection.eliminations}}},
      };
      auto out = open_out(staging / "manifest.json");
      out << manifest.dump(2) << '\n';
      return 0;
    });

    fs::remove_all(cfg.out);
    fs::rename(staging, cfg.out);
    return summary;
  } catch (...) {
    std::error_code ec;
    fs::remove_all(staging, ec);
    throw;
  }
}

}  // namespace retnet
