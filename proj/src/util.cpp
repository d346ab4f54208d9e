#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "cxg/error.hpp"
#include "cxg/month.hpp"
#include "cxg/rng.hpp"
#include "cxg/text.hpp"

namespace cxg {

std::string_view errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::io: return "io";
    case Errc::config: return "config";
    case Errc::empty_corpus: return "empty-corpus";
    case Errc::empty_plan: return "empty-plan";
    case Errc::tagset_violation: return "tagset-violation";
    case Errc::undefined_association: return "undefined-association";
    case Errc::precondition: return "precondition";
    case Errc::shape: return "shape";
    case Errc::training: return "training";
    case Errc::evaluation: return "evaluation";
    case Errc::insufficient_data: return "insufficient-data";
    case Errc::reference: return "reference";
    case Errc::degenerate_field: return "degenerate-field";
    case Errc::undefined_statistic: return "undefined-statistic";
    case Errc::format: return "format";
  }
  return "unknown";
}

void fail(Errc code, const std::string& what) {
  throw Error(code, fmt::format("{}: {}", errc_name(code), what));
}

// splitmix64 finalizer
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::size_t Rng::below(std::size_t n) {
  // Rejection sampling over the top multiple of n.
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return static_cast<std::size_t>(r % bound);
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t Rng::categorical(std::span<const double> weights) {
  double total = 0.0;
  for (double w : weights) total += w;
  double u = uniform() * total;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (u < weights[i]) return i;
    u -= weights[i];
  }
  // Rounding left u at the top edge; return the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  return 0;
}

Month Month::parse(std::string_view text) {
  auto digits = [&](std::size_t from, std::size_t n) {
    int v = 0;
    for (std::size_t i = from; i < from + n; ++i) {
      if (!std::isdigit(static_cast<unsigned char>(text[i]))) {
        fail(Errc::format, fmt::format("month '{}' is not YYYY-MM", text));
      }
      v = v * 10 + (text[i] - '0');
    }
    return v;
  };
  if (text.size() != 7 || text[4] != '-') {
    fail(Errc::format, fmt::format("month '{}' is not YYYY-MM", text));
  }
  const int year = digits(0, 4);
  const int month = digits(5, 2);
  if (month < 1 || month > 12) fail(Errc::format, fmt::format("month '{}' out of range", text));
  return Month(year, month);
}

std::string Month::str() const { return fmt::format("{:04d}-{:02d}", year(), month()); }

MonthRange MonthRange::parse(std::string_view first, std::string_view last) {
  MonthRange r{Month::parse(first), Month::parse(last)};
  if (r.last < r.first) {
    fail(Errc::config, fmt::format("month range {}..{} is reversed", first, last));
  }
  return r;
}

std::vector<std::string> tokenize(std::string_view text) {
  static constexpr std::string_view kTerminal = ".,!?;:\"'";
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j]))) ++j;
    if (j == i) break;
    std::string word;
    word.reserve(j - i);
    for (std::size_t k = i; k < j; ++k) {
      word.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[k]))));
    }
    std::size_t cut = word.size();
    while (cut > 0 && kTerminal.find(word[cut - 1]) != std::string_view::npos) --cut;
    if (cut > 0) out.push_back(word.substr(0, cut));
    for (std::size_t k = cut; k < word.size(); ++k) out.emplace_back(1, word[k]);
    i = j;
  }
  return out;
}

std::uint64_t fnv1a(std::string_view bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) { return fmt::format("{:016x}", value); }

}  // namespace cxg
