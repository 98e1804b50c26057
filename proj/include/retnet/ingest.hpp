#pragma once

#include <array>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace retnet {

using Timestamp = std::int64_t;  // UTC epoch seconds

inline constexpr Timestamp kSecondsPerWeek = 7 * 24 * 3600;

class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Detailed hate-speech categories, ordered by severity.
enum class HateLabel : std::uint8_t { Acceptable = 0, Inappropriate, Offensive, Violent };

inline constexpr std::array<HateLabel, 4> kAllLabels = {
    HateLabel::Acceptable, HateLabel::Inappropriate, HateLabel::Offensive, HateLabel::Violent};

// Binary view: everything except Acceptable is unacceptable.
constexpr bool is_unacceptable(HateLabel l) { return l != HateLabel::Acceptable; }

std::string_view to_string(HateLabel l);

// Case-insensitive; nullopt for unknown strings.
std::optional<HateLabel> parse_label(std::string_view s);

struct RetweetOf {
  std::string original_tweet_id;
  std::string original_author_id;

  friend bool operator==(const RetweetOf&, const RetweetOf&) = default;
};

struct TweetEvent {
  std::string tweet_id;
  std::string author_id;
  Timestamp timestamp = 0;
  HateLabel label = HateLabel::Acceptable;
  std::optional<RetweetOf> retweet_of;  // absent for original tweets
  std::optional<std::string> user_type;

  bool is_retweet() const { return retweet_of.has_value(); }
  bool is_self_retweet() const {
    return retweet_of && retweet_of->original_author_id == author_id;
  }

  friend bool operator==(const TweetEvent&, const TweetEvent&) = default;
};

struct EventStream {
  std::vector<TweetEvent> events;  // non-decreasing timestamps
  Timestamp start = 0;
  Timestamp end = 0;
};

enum class Format { Jsonl, Csv };

Format parse_format(std::string_view s);

struct ParseOptions {
  Format format = Format::Jsonl;
  bool strict = false;  // malformed line or unknown label becomes fatal
};

struct ParseReport {
  std::size_t lines = 0;
  std::size_t parsed = 0;
  std::map<std::string, std::size_t> skipped;  // reason -> count

  std::size_t total_skipped() const;
};

struct ParseResult {
  EventStream stream;
  ParseReport report;
};

// Parses line-delimited records. Events are stably sorted by timestamp and
// stream bounds are set to the min/max event timestamps.
ParseResult parse_events(std::istream& in, const ParseOptions& opts);
ParseResult parse_events_file(const std::string& path, const ParseOptions& opts);

// Concatenates several streams; order-stable by timestamp.
EventStream merge_streams(std::vector<EventStream> parts);

void write_events(std::ostream& out, const EventStream& s, Format format);

struct ValidationReport {
  std::size_t events = 0;
  std::size_t originals = 0;
  std::size_t retweets = 0;
  std::size_t self_retweets = 0;
  std::vector<std::string> duplicate_ids;  // each listed once, sorted
  std::size_t dangling_originals = 0;      // retweets whose original is not in the stream
  std::map<HateLabel, std::size_t> label_counts;

  std::size_t unacceptable() const;
};

ValidationReport validate_stream(const EventStream& s);

}  // namespace retnet
