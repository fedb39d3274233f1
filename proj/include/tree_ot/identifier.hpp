#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>

namespace tree_ot {

/// A (site, operation number) pair. Names requests, word elements and the
/// edges created by Add.
struct Stamp {
  std::uint32_t site = 0;
  std::uint32_t opnb = 0;

  friend constexpr auto operator<=>(const Stamp&, const Stamp&) = default;

  std::string to_string() const {
    return std::to_string(site) + ";" + std::to_string(opnb);
  }
};

using RequestId = Stamp;

inline std::optional<Stamp> parse_stamp(std::string_view text) {
  auto sep = text.find(';');
  if (sep == std::string_view::npos || sep == 0 || sep + 1 == text.size()) return std::nullopt;
  auto parse_nat = [](std::string_view digits) -> std::optional<std::uint32_t> {
    if (digits.empty() || digits.size() > 9) return std::nullopt;
    std::uint32_t value = 0;
    for (char c : digits) {
      if (c < '0' || c > '9') return std::nullopt;
      value = value * 10 + static_cast<std::uint32_t>(c - '0');
    }
    return value;
  };
  auto site = parse_nat(text.substr(0, sep));
  auto opnb = parse_nat(text.substr(sep + 1));
  if (!site || !opnb) return std::nullopt;
  return Stamp{*site, *opnb};
}

/// Edge identity: one of the two reserved roots or a generated (site, opnb).
/// Ordered Data < Mem < Gen, Gen values lexicographically.
class Identifier {
 public:
  enum class Kind : std::uint8_t { kData, kMem, kGen };

  constexpr Identifier() = default;

  static constexpr Identifier data() { return Identifier(Kind::kData, {}); }
  static constexpr Identifier mem() { return Identifier(Kind::kMem, {}); }
  static constexpr Identifier gen(std::uint32_t site, std::uint32_t opnb) {
    return Identifier(Kind::kGen, Stamp{site, opnb});
  }
  static constexpr Identifier gen(Stamp stamp) { return Identifier(Kind::kGen, stamp); }

  constexpr Kind kind() const { return kind_; }
  constexpr bool is_reserved() const { return kind_ != Kind::kGen; }
  constexpr bool is_gen() const { return kind_ == Kind::kGen; }
  /// Only meaningful for Gen identifiers.
  constexpr Stamp stamp() const { return stamp_; }

  friend constexpr auto operator<=>(const Identifier&, const Identifier&) = default;

  std::string to_string() const {
    switch (kind_) {
      case Kind::kData: return "data";
      case Kind::kMem: return "mem";
      case Kind::kGen: break;
    }
    return stamp_.to_string();
  }

 private:
  constexpr Identifier(Kind kind, Stamp stamp) : kind_(kind), stamp_(stamp) {}

  Kind kind_ = Kind::kData;
  Stamp stamp_{};
};

inline std::optional<Identifier> parse_identifier(std::string_view text) {
  if (text == "data") return Identifier::data();
  if (text == "mem") return Identifier::mem();
  if (auto stamp = parse_stamp(text)) return Identifier::gen(*stamp);
  return std::nullopt;
}

/// Edge label. Fresh edges carry NoValue; the two reserved root edges carry
/// the bottom label, which no operation can produce.
class Label {
 public:
  enum class Kind : std::uint8_t { kNoValue, kBottom, kText };

  Label() = default;

  static Label no_value() { return Label(Kind::kNoValue, {}); }
  static Label bottom() { return Label(Kind::kBottom, {}); }
  static Label text(std::string value) { return Label(Kind::kText, std::move(value)); }

  Kind kind() const { return kind_; }
  bool is_text() const { return kind_ == Kind::kText; }
  const std::string& value() const { return text_; }

  friend auto operator<=>(const Label&, const Label&) = default;
  friend bool operator==(const Label&, const Label&) = default;

  /// `#` for NoValue, `^` for bottom, quoted and escaped text otherwise.
  std::string to_string() const {
    switch (kind_) {
      case Kind::kNoValue: return "#";
      case Kind::kBottom: return "^";
      case Kind::kText: break;
    }
    std::string out = "\"";
    for (char c : text_) {
      if (c == '"' || c == '\\') out.push_back('\\');
      out.push_back(c);
    }
    out.push_back('"');
    return out;
  }

 private:
  Label(Kind kind, std::string text) : kind_(kind), text_(std::move(text)) {}

  Kind kind_ = Kind::kNoValue;
  std::string text_;
};

}  // namespace tree_ot
