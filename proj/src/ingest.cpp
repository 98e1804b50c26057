#include "retnet/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

namespace retnet {

namespace {

using json = nlohmann::json;

constexpr std::array<std::string_view, 7> kCsvColumns = {
    "tweet_id", "author_id", "timestamp", "label", "original_tweet_id", "original_author_id", "user_type"};

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

// Thrown per line; caught by the line loop and turned into a skip.
struct LineError {
  std::string reason;
  std::string detail;
};

std::string required_string(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) throw LineError{"missing_field", key};
  if (it->is_string()) return it->get<std::string>();
  if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
  throw LineError{"malformed", std::string("bad type for ") + key};
}

TweetEvent event_from_json(const json& obj) {
  if (!obj.is_object()) throw LineError{"malformed", "not an object"};
  TweetEvent ev;
  ev.tweet_id = required_string(obj, "tweet_id");
  ev.author_id = required_string(obj, "author_id");

  auto ts = obj.find("timestamp");
  if (ts == obj.end()) ts = obj.find("ts");
  if (ts == obj.end()) throw LineError{"missing_field", "timestamp"};
  if (!ts->is_number_integer()) throw LineError{"malformed", "timestamp is not an integer"};
  ev.timestamp = ts->get<Timestamp>();

  auto label = parse_label(required_string(obj, "label"));
  if (!label) throw LineError{"unknown_label", obj.at("label").dump()};
  ev.label = *label;

  if (auto rt = obj.find("retweet_of"); rt != obj.end() && !rt->is_null()) {
    RetweetOf ref;
    if (rt->is_object()) {
      ref.original_tweet_id = required_string(*rt, "original_tweet_id");
      ref.original_author_id = required_string(*rt, "original_author_id");
    } else if (rt->is_array() && rt->size() == 2 && (*rt)[0].is_string() && (*rt)[1].is_string()) {
      ref.original_tweet_id = (*rt)[0].get<std::string>();
      ref.original_author_id = (*rt)[1].get<std::string>();
    } else {
      throw LineError{"malformed", "retweet_of"};
    }
    ev.retweet_of = std::move(ref);
  }
  if (auto ut = obj.find("user_type"); ut != obj.end() && ut->is_string() && !ut->get<std::string>().empty()) {
    ev.user_type = ut->get<std::string>();
  }
  return ev;
}

// Minimal RFC 4180 field splitter: quoted fields with doubled quotes.
std::vector<std::string> split_csv(std::string_view line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  if (quoted) throw LineError{"malformed", "unterminated quote"};
  fields.push_back(std::move(cur));
  return fields;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

TweetEvent event_from_csv(std::string_view line) {
  auto f = split_csv(line);
  if (f.size() != kCsvColumns.size()) throw LineError{"malformed", "wrong column count"};
  TweetEvent ev;
  if (f[0].empty()) throw LineError{"missing_field", "tweet_id"};
  if (f[1].empty()) throw LineError{"missing_field", "author_id"};
  ev.tweet_id = f[0];
  ev.author_id = f[1];
  try {
    std::size_t pos = 0;
    ev.timestamp = std::stoll(f[2], &pos);
    if (pos != f[2].size()) throw LineError{"malformed", "timestamp"};
  } catch (const std::logic_error&) {
    throw LineError{"malformed", "timestamp"};
  }
  auto label = parse_label(f[3]);
  if (!label) throw LineError{"unknown_label", f[3]};
  ev.label = *label;
  if (f[4].empty() != f[5].empty()) throw LineError{"malformed", "partial retweet provenance"};
  if (!f[4].empty()) ev.retweet_of = RetweetOf{f[4], f[5]};
  if (!f[6].empty()) ev.user_type = f[6];
  return ev;
}

bool is_blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

void finalize(EventStream& s) {
  std::stable_sort(s.events.begin(), s.events.end(),
                   [](const TweetEvent& a, const TweetEvent& b) { return a.timestamp < b.timestamp; });
  if (s.events.empty()) {
    s.start = s.end = 0;
  } else {
    s.start = s.events.front().timestamp;
    s.end = s.events.back().timestamp;
  }
}

}  // namespace

std::string_view to_string(HateLabel l) {
  switch (l) {
    case HateLabel::Acceptable: return "Acceptable";
    case HateLabel::Inappropriate: return "Inappropriate";
    case HateLabel::Offensive: return "Offensive";
    case HateLabel::Violent: return "Violent";
  }
  return "Acceptable";
}

std::optional<HateLabel> parse_label(std::string_view s) {
  const auto key = lower(s);
  for (auto l : kAllLabels) {
    if (key == lower(to_string(l))) return l;
  }
  return std::nullopt;
}

Format parse_format(std::string_view s) {
  const auto key = lower(s);
  if (key == "jsonl") return Format::Jsonl;
  if (key == "csv") return Format::Csv;
  throw std::invalid_argument("unknown format: " + std::string(s));
}

std::size_t ParseReport::total_skipped() const {
  std::size_t n = 0;
  for (const auto& [reason, count] : skipped) n += count;
  return n;
}

ParseResult parse_events(std::istream& in, const ParseOptions& opts) {
  ParseResult result;
  std::string line;
  std::size_t lineno = 0;
  bool header_seen = opts.format != Format::Csv;

  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (is_blank(line)) continue;

    if (!header_seen) {
      std::vector<std::string> cols;
      try {
        cols = split_csv(line);
      } catch (const LineError&) {
      }
      bool ok = cols.size() == kCsvColumns.size();
      for (std::size_t i = 0; ok && i < cols.size(); ++i) ok = lower(cols[i]) == kCsvColumns[i];
      if (!ok) throw ParseError("line 1: CSV header must be " + std::string("tweet_id,author_id,timestamp,label,"
                                                                          "original_tweet_id,original_author_id,user_type"));
      header_seen = true;
      continue;
    }

    ++result.report.lines;
    try {
      if (opts.format == Format::Jsonl) {
        json obj;
        try {
          obj = json::parse(line);
        } catch (const json::parse_error& e) {
          throw LineError{"malformed", e.what()};
        }
        result.stream.events.push_back(event_from_json(obj));
      } else {
        result.stream.events.push_back(event_from_csv(line));
      }
      ++result.report.parsed;
    } catch (const LineError& e) {
      if (opts.strict) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.reason + ": " + e.detail);
      }
      ++result.report.skipped[e.reason];
    }
  }
  if (in.bad()) throw ParseError("read error");
  if (!header_seen) throw ParseError("CSV input has no header row");

  finalize(result.stream);
  return result;
}

ParseResult parse_events_file(const std::string& path, const ParseOptions& opts) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  return parse_events(in, opts);
}

EventStream merge_streams(std::vector<EventStream> parts) {
  EventStream merged;
  for (auto& p : parts) {
    merged.events.insert(merged.events.end(), std::make_move_iterator(p.events.begin()),
                         std::make_move_iterator(p.events.end()));
  }
  finalize(merged);
  return merged;
}

void write_events(std::ostream& out, const EventStream& s, Format format) {
  if (format == Format::Csv) {
    for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
    out << '\n';
    for (const auto& ev : s.events) {
      out << csv_escape(ev.tweet_id) << ',' << csv_escape(ev.author_id) << ',' << ev.timestamp << ','
          << to_string(ev.label) << ',';
      if (ev.retweet_of) {
        out << csv_escape(ev.retweet_of->original_tweet_id) << ',' << csv_escape(ev.retweet_of->original_author_id);
      } else {
        out << ',';
      }
      out << ',' << csv_escape(ev.user_type.value_or("")) << '\n';
    }
    return;
  }
  for (const auto& ev : s.events) {
    json obj = json::object();
    obj["tweet_id"] = ev.tweet_id;
    obj["author_id"] = ev.author_id;
    obj["timestamp"] = ev.timestamp;
    obj["label"] = std::string(to_string(ev.label));
    if (ev.retweet_of) {
      obj["retweet_of"] = {{"original_tweet_id", ev.retweet_of->original_tweet_id},
                           {"original_author_id", ev.retweet_of->original_author_id}};
    }
    if (ev.user_type) obj["user_type"] = *ev.user_type;
    out << obj.dump() << '\n';
  }
}

std::size_t ValidationReport::unacceptable() const {
  std::size_t n = 0;
  for (const auto& [label, count] : label_counts) {
    if (is_unacceptable(label)) n += count;
  }
  return n;
}

ValidationReport validate_stream(const EventStream& s) {
  ValidationReport r;
  r.events = s.events.size();
  for (auto l : kAllLabels) r.label_counts[l] = 0;

  std::unordered_set<std::string> ids;
  std::set<std::string> dups;
  for (const auto& ev : s.events) {
    if (!ids.insert(ev.tweet_id).second) dups.insert(ev.tweet_id);
    ++r.label_counts[ev.label];
    if (ev.is_retweet()) {
      ++r.retweets;
      if (ev.is_self_retweet()) ++r.self_retweets;
    } else {
      ++r.originals;
    }
  }
  for (const auto& ev : s.events) {
    if (ev.is_retweet() && !ids.contains(ev.retweet_of->original_tweet_id)) ++r.dangling_originals;
  }
  r.duplicate_ids.assign(dups.begin(), dups.end());
  return r;
}

}  // namespace retnet
