#include "retnet/synthgen.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "retnet/random.hpp"

namespace retnet {

void SynthConfig::validate() const {
  if (blocks.empty()) throw std::invalid_argument("at least one block required");
  for (const auto& b : blocks) {
    if (!(b.hate_rate >= 0.0 && b.hate_rate <= 1.0)) throw std::invalid_argument("hate_rate must be in [0, 1]");
  }
  if (!(p_out >= 0.0 && p_in > p_out && p_in <= 1.0)) throw std::invalid_argument("need 0 <= p_out < p_in <= 1");
  if (weeks <= 0) throw std::invalid_argument("weeks must be positive");
  if (originals_per_week <= 0) throw std::invalid_argument("originals_per_week must be positive");
  std::size_t users = 0;
  for (const auto& b : blocks) users += b.user_count;
  for (const auto& d : drift) {
    if (d.user >= users || d.to_block >= blocks.size() || d.week < 0) {
      throw std::invalid_argument("drift step out of range");
    }
  }
}

Partition SynthResult::truth(int week) const {
  const auto& blocks = membership.at(static_cast<std::size_t>(week));
  std::vector<std::int64_t> labels(blocks.begin(), blocks.end());
  return Partition::from_labels(users, labels, week);
}

SynthResult generate_stream(const SynthConfig& cfg) {
  cfg.validate();
  Rng rng(cfg.seed);

  SynthResult r;
  std::vector<std::size_t> block_of;
  for (std::size_t b = 0; b < cfg.blocks.size(); ++b) {
    r.hate_rates.push_back(cfg.blocks[b].hate_rate);
    for (std::size_t i = 0; i < cfg.blocks[b].user_count; ++i) block_of.push_back(b);
  }
  const std::size_t n = block_of.size();
  const int width = static_cast<int>(std::to_string(n).size());
  for (std::size_t u = 0; u < n; ++u) r.users.push_back(fmt::format("u{:0{}}", u, width));

  auto drift = cfg.drift;
  std::stable_sort(drift.begin(), drift.end(), [](const auto& a, const auto& b) { return a.week < b.week; });
  auto next_drift = drift.begin();

  constexpr std::array<HateLabel, 3> kBad = {HateLabel::Inappropriate, HateLabel::Offensive, HateLabel::Violent};
  const auto per_user = static_cast<std::size_t>(cfg.originals_per_week);
  std::size_t tweet_seq = 0;
  auto next_id = [&] { return fmt::format("t{:09}", tweet_seq++); };

  auto& events = r.stream.events;
  for (int week = 0; week < cfg.weeks; ++week) {
    for (; next_drift != drift.end() && next_drift->week <= week; ++next_drift) {
      block_of[next_drift->user] = next_drift->to_block;
    }
    r.membership.push_back(block_of);
    const Timestamp week_start = cfg.start + Timestamp{week} * kSecondsPerWeek;

    // Originals of this week: index u * per_user + k.
    std::vector<std::size_t> posted;  // event index
    posted.reserve(n * per_user);
    for (std::size_t u = 0; u < n; ++u) {
      const double rate = cfg.blocks[block_of[u]].hate_rate;
      for (std::size_t k = 0; k < per_user; ++k) {
        TweetEvent ev;
        ev.tweet_id = next_id();
        ev.author_id = r.users[u];
        ev.timestamp = week_start + static_cast<Timestamp>(rng.below(kSecondsPerWeek));
        ev.label = rng.bernoulli(rate) ? kBad[rng.below(kBad.size())] : HateLabel::Acceptable;
        posted.push_back(events.size());
        events.push_back(std::move(ev));
      }
    }

    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (a == b) continue;
        const double p = block_of[a] == block_of[b] ? cfg.p_in : cfg.p_out;
        if (!rng.bernoulli(p)) continue;
        const auto& original = events[posted[a * per_user + rng.below(per_user)]];
        const Timestamp remaining = week_start + kSecondsPerWeek - original.timestamp;
        TweetEvent ev;
        ev.tweet_id = next_id();
        ev.author_id = r.users[b];
        ev.timestamp = original.timestamp + static_cast<Timestamp>(rng.below(static_cast<std::uint64_t>(remaining)));
        ev.label = original.label;
        ev.retweet_of = RetweetOf{original.tweet_id, original.author_id};
        events.push_back(std::move(ev));
      }
    }
  }

  std::stable_sort(events.begin(), events.end(), [](const TweetEvent& x, const TweetEvent& y) {
    return x.timestamp < y.timestamp;
  });
  r.stream.start = cfg.start;
  r.stream.end = events.empty() ? cfg.start : events.back().timestamp;
  return r;
}

void write_truth(std::ostream& out, const SynthResult& r) {
  out << "user_id,week,block\n";
  for (std::size_t w = 0; w < r.membership.size(); ++w) {
    for (std::size_t u = 0; u < r.users.size(); ++u) {
      out << r.users[u] << ',' << w << ',' << r.membership[w][u] << '\n';
    }
  }
}

}  // namespace retnet
