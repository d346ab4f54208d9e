#pragma once

#include <compare>
#include <string>
#include <string_view>

namespace cxg {

// Calendar month at UTC month granularity, serialized as "YYYY-MM".
class Month {
 public:
  constexpr Month() = default;
  constexpr Month(int year, int month) : index_(year * 12 + (month - 1)) {}

  static Month parse(std::string_view text);
  static constexpr Month from_index(int index) {
    Month m;
    m.index_ = index;
    return m;
  }

  constexpr int year() const { return index_ / 12; }
  constexpr int month() const { return index_ % 12 + 1; }
  constexpr int index() const { return index_; }
  std::string str() const;

  constexpr Month operator+(int months) const { return from_index(index_ + months); }
  constexpr int operator-(Month other) const { return index_ - other.index_; }
  constexpr auto operator<=>(const Month&) const = default;

 private:
  int index_ = 0;
};

// Closed month interval [first, last].
struct MonthRange {
  Month first;
  Month last;

  static MonthRange parse(std::string_view first, std::string_view last);
  bool contains(Month m) const { return first <= m && m <= last; }
  bool overlaps(const MonthRange& other) const {
    return first <= other.last && other.first <= last;
  }
  int size() const { return last - first + 1; }
  bool operator==(const MonthRange&) const = default;
};

}  // namespace cxg
