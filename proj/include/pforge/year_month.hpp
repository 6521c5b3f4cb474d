#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace pforge {

// Calendar month. Stored as a month serial (year * 12 + month - 1) so
// differences are plain integer subtraction.
class YearMonth {
 public:
  constexpr YearMonth() = default;

  static constexpr YearMonth from_serial(int serial) {
    YearMonth ym;
    ym.serial_ = serial;
    return ym;
  }
  static constexpr YearMonth of(int year, int month) {
    return from_serial(year * 12 + (month - 1));
  }

  // Accepts exactly "YYYY-MM" with month 01..12.
  static std::optional<YearMonth> parse(std::string_view text);

  constexpr int serial() const { return serial_; }
  constexpr int year() const { return serial_ >= 0 ? serial_ / 12 : (serial_ - 11) / 12; }
  constexpr int month() const { return serial_ - year() * 12 + 1; }

  constexpr YearMonth plus_months(int months) const { return from_serial(serial_ + months); }

  std::string to_string() const;

  friend constexpr auto operator<=>(YearMonth, YearMonth) = default;

 private:
  int serial_ = 0;
};

// Signed number of months from `from` to `to`.
constexpr int months_between(YearMonth from, YearMonth to) { return to.serial() - from.serial(); }

}  // namespace pforge
