#pragma once

#include <cstdint>
#include <vector>

#include "cfmaps/continued_fraction.hpp"
#include "cfmaps/errors.hpp"

namespace cfmaps {

/// Binary string 0_{n1} 1_{n2} 0_{n3} ... of x = [0; n1, n2, ...].
struct SternBrocotString {
  struct Run {
    int symbol = 0;  // 0 or 1
    std::uint64_t length = 1;
    friend bool operator==(const Run&, const Run&) = default;
  };
  enum class Ending {
    infinite_run,  // an endless run of the next symbol follows (rational x)
    periodic,      // the last `period_runs` runs repeat forever
    open,          // unknown continuation (truncated x)
  };

  std::vector<Run> runs;
  Ending ending = Ending::infinite_run;
  std::size_t period_runs = 0;

  friend bool operator==(const SternBrocotString&, const SternBrocotString&) = default;
};

inline SternBrocotString to_binary_string(const ContinuedFraction& x) {
  SternBrocotString s;
  int symbol = 0;
  for (auto d : x.head()) {
    s.runs.push_back({symbol, d});
    symbol ^= 1;
  }
  switch (x.tail()) {
    case Tail::terminated:
      s.ending = SternBrocotString::Ending::infinite_run;
      break;
    case Tail::truncated:
      s.ending = SternBrocotString::Ending::open;
      break;
    case Tail::periodic:
      for (auto d : x.period()) {
        s.runs.push_back({symbol, d});
        symbol ^= 1;
      }
      s.ending = SternBrocotString::Ending::periodic;
      s.period_runs = x.period().size();
      break;
  }
  return s;
}

inline ContinuedFraction from_binary_string(const SternBrocotString& s) {
  std::vector<ContinuedFraction::value_type> lengths;
  lengths.reserve(s.runs.size());
  int expected = 0;
  for (const auto& run : s.runs) {
    if (run.symbol != expected) throw std::domain_error("Stern-Brocot runs must alternate starting with 0");
    if (run.length == 0) throw std::domain_error("Stern-Brocot runs must be non-empty");
    lengths.push_back(run.length);
    expected ^= 1;
  }
  switch (s.ending) {
    case SternBrocotString::Ending::infinite_run:
      return ContinuedFraction::finite(std::move(lengths));
    case SternBrocotString::Ending::open:
      return ContinuedFraction::truncated(std::move(lengths));
    case SternBrocotString::Ending::periodic: {
      if (s.period_runs == 0 || s.period_runs > lengths.size())
        throw std::domain_error("periodic Stern-Brocot string needs 1..runs.size() repeating runs");
      std::vector<ContinuedFraction::value_type> head(lengths.begin(), lengths.end() - static_cast<std::ptrdiff_t>(s.period_runs));
      std::vector<ContinuedFraction::value_type> period(lengths.end() - static_cast<std::ptrdiff_t>(s.period_runs), lengths.end());
      return ContinuedFraction::periodic(std::move(head), std::move(period));
    }
  }
  return {};
}

}  // namespace cfmaps
