#pragma once

#include <algorithm>
#include <cmath>
#include <compare>
#include <concepts>
#include <cstdint>
#include <initializer_list>
#include <limits>
#include <optional>
#include <string>
#include <type_traits>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "evonet/error.hpp"
#include "evonet/pcg32.hpp"
#include "evonet/text.hpp"

namespace evonet {

enum class ValueType { Bool, Int, Real, Text };

inline const char* to_string(ValueType t) noexcept {
  switch (t) {
    case ValueType::Bool: return "bool";
    case ValueType::Int: return "int";
    case ValueType::Real: return "double";
    case ValueType::Text: return "string";
  }
  return "?";
}

// A single attribute value. Comparing values of different types throws:
// an int 1 and a real 1.0 are not silently the same thing.
class AttrValue {
 public:
  AttrValue() : v_(false) {}
  AttrValue(bool b) : v_(b) {}
  template <std::integral I>
    requires(!std::same_as<I, bool>)
  AttrValue(I i) : v_(static_cast<std::int64_t>(i)) {}
  // Without this an unscoped enum would quietly become a bool.
  template <typename E>
    requires std::is_enum_v<E>
  AttrValue(E e) : v_(static_cast<std::int64_t>(e)) {}
  template <std::floating_point F>
  AttrValue(F d) : v_(static_cast<double>(d)) {}
  AttrValue(std::string s) : v_(std::move(s)) {}
  AttrValue(const char* s) : v_(std::string(s)) {}

  ValueType type() const noexcept { return static_cast<ValueType>(v_.index()); }

  bool as_bool() const { return get<bool>(); }
  std::int64_t as_int() const { return get<std::int64_t>(); }
  double as_real() const { return get<double>(); }
  const std::string& as_text() const { return get<std::string>(); }

  std::string to_string() const {
    switch (type()) {
      case ValueType::Bool: return as_bool() ? "true" : "false";
      case ValueType::Int: return std::to_string(as_int());
      case ValueType::Real: return text::format_real(as_real());
      case ValueType::Text: return as_text();
    }
    return {};
  }

  friend bool operator==(const AttrValue& a, const AttrValue& b) {
    a.require_same(b);
    return a.v_ == b.v_;
  }

  friend std::partial_ordering operator<=>(const AttrValue& a, const AttrValue& b) {
    a.require_same(b);
    return std::visit(
        [&](const auto& x) -> std::partial_ordering {
          using T = std::decay_t<decltype(x)>;
          return x <=> std::get<T>(b.v_);
        },
        a.v_);
  }

 private:
  template <typename T>
  const T& get() const {
    if (const T* p = std::get_if<T>(&v_)) return *p;
    throw Error(std::string("attribute value is ") + evonet::to_string(type()) + ", not the requested type");
  }

  void require_same(const AttrValue& other) const {
    if (v_.index() != other.v_.index()) {
      throw Error(std::string("cannot compare ") + evonet::to_string(type()) + " with " +
                  evonet::to_string(other.type()));
    }
  }

  std::variant<bool, std::int64_t, double, std::string> v_;
};

enum class RangeKind { Bool, IntInterval, RealInterval, IntSet, RealSet, Text, TextSet };

// Typed value domain. Construct through the named factories or
// parse_attr_range; both enforce min <= max and non-empty, duplicate-free sets.
class AttributeRange {
 public:
  AttributeRange() = default;  // bool

  static AttributeRange boolean() { return {}; }
  static AttributeRange text() { return AttributeRange(RangeKind::Text); }

  static AttributeRange int_interval(std::int64_t lo, std::int64_t hi) {
    if (lo > hi) throw Error("invalid range int[" + std::to_string(lo) + "," + std::to_string(hi) + "]: min > max");
    AttributeRange r(RangeKind::IntInterval);
    r.min_ = lo;
    r.max_ = hi;
    return r;
  }

  static AttributeRange real_interval(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi)) throw Error("real interval bounds must be finite");
    if (lo > hi) {
      throw Error("invalid range double[" + text::format_real(lo) + "," + text::format_real(hi) + "]: min > max");
    }
    AttributeRange r(RangeKind::RealInterval);
    r.min_ = lo;
    r.max_ = hi;
    return r;
  }

  static AttributeRange int_set(const std::vector<std::int64_t>& members) {
    return make_set(RangeKind::IntSet, std::vector<AttrValue>(members.begin(), members.end()));
  }
  static AttributeRange real_set(const std::vector<double>& members) {
    for (double d : members) {
      if (!std::isfinite(d)) throw Error("real set members must be finite");
    }
    return make_set(RangeKind::RealSet, std::vector<AttrValue>(members.begin(), members.end()));
  }
  static AttributeRange text_set(const std::vector<std::string>& members) {
    return make_set(RangeKind::TextSet, std::vector<AttrValue>(members.begin(), members.end()));
  }

  RangeKind kind() const noexcept { return kind_; }
  const AttrValue& min() const noexcept { return min_; }
  const AttrValue& max() const noexcept { return max_; }
  const std::vector<AttrValue>& members() const noexcept { return members_; }

  ValueType value_type() const noexcept {
    switch (kind_) {
      case RangeKind::Bool: return ValueType::Bool;
      case RangeKind::IntInterval:
      case RangeKind::IntSet: return ValueType::Int;
      case RangeKind::RealInterval:
      case RangeKind::RealSet: return ValueType::Real;
      case RangeKind::Text:
      case RangeKind::TextSet: return ValueType::Text;
    }
    return ValueType::Bool;
  }

  bool is_set() const noexcept {
    return kind_ == RangeKind::IntSet || kind_ == RangeKind::RealSet || kind_ == RangeKind::TextSet;
  }

  // Every admissible value, when the domain is a finite enumeration
  // (bool and the three set kinds). Empty for intervals and free text.
  std::vector<AttrValue> enumerate() const {
    if (kind_ == RangeKind::Bool) return {AttrValue(false), AttrValue(true)};
    if (is_set()) return members_;
    return {};
  }

  AttrValue default_value() const {
    switch (kind_) {
      case RangeKind::Bool: return AttrValue(false);
      case RangeKind::IntInterval:
      case RangeKind::RealInterval: return min_;
      case RangeKind::IntSet:
      case RangeKind::RealSet:
      case RangeKind::TextSet: return members_.front();
      case RangeKind::Text: return AttrValue(std::string());
    }
    return {};
  }

  // Inverse of parse_attr_range.
  std::string to_string() const {
    auto join = [&](const char* prefix) {
      std::string s = prefix;
      s += '{';
      for (std::size_t i = 0; i < members_.size(); ++i) {
        if (i) s += ',';
        s += members_[i].to_string();
      }
      return s + '}';
    };
    switch (kind_) {
      case RangeKind::Bool: return "bool";
      case RangeKind::Text: return "string";
      case RangeKind::IntInterval: return "int[" + min_.to_string() + "," + max_.to_string() + "]";
      case RangeKind::RealInterval: return "double[" + min_.to_string() + "," + max_.to_string() + "]";
      case RangeKind::IntSet: return join("int");
      case RangeKind::RealSet: return join("double");
      case RangeKind::TextSet: return join("string");
    }
    return {};
  }

  friend bool operator==(const AttributeRange& a, const AttributeRange& b) {
    if (a.kind_ != b.kind_) return false;
    switch (a.kind_) {
      case RangeKind::IntInterval:
      case RangeKind::RealInterval: return a.min_ == b.min_ && a.max_ == b.max_;
      case RangeKind::IntSet:
      case RangeKind::RealSet:
      case RangeKind::TextSet: return a.members_ == b.members_;
      default: return true;
    }
  }

 private:
  explicit AttributeRange(RangeKind k) : kind_(k) {}

  static AttributeRange make_set(RangeKind kind, std::vector<AttrValue> members) {
    if (members.empty()) throw Error("set range must not be empty");
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        if (members[i] == members[j]) throw Error("duplicate set member '" + members[i].to_string() + "'");
      }
    }
    AttributeRange r(kind);
    r.members_ = std::move(members);
    return r;
  }

  RangeKind kind_ = RangeKind::Bool;
  AttrValue min_;
  AttrValue max_;
  std::vector<AttrValue> members_;
};

// Grammar:
//   bool | string | int[a,b] | double[a,b] | int{a,...} | double{a,...} | string{a,...}
// Whitespace around tokens is ignored.
inline AttributeRange parse_attr_range(std::string_view spec) {
  const std::string original(spec);
  auto fail = [&](const std::string& why) -> Error {
    return Error("invalid attribute range '" + original + "': " + why);
  };

  spec = text::trim(spec);
  std::size_t name_end = 0;
  while (name_end < spec.size() && spec[name_end] >= 'a' && spec[name_end] <= 'z') ++name_end;
  const std::string_view type = spec.substr(0, name_end);
  std::string_view rest = text::trim(spec.substr(name_end));

  if (rest.empty()) {
    if (type == "bool") return AttributeRange::boolean();
    if (type == "string") return AttributeRange::text();
    throw fail(type.empty() ? "missing type" : "missing bounds or members");
  }
  if (type != "int" && type != "double" && type != "string") throw fail("unknown type '" + std::string(type) + "'");

  const char open = rest.front();
  const char close = rest.back();
  const bool interval = open == '[' && close == ']';
  const bool set = open == '{' && close == '}';
  if (!interval && !set) throw fail("expected [min,max] or {a,b,...}");
  const auto body = rest.substr(1, rest.size() - 2);
  if (body.find_first_of("[]{}") != std::string_view::npos) throw fail("unbalanced brackets");
  auto items = text::split(body, ',');
  for (auto& item : items) {
    item = text::trim(item);
    if (item.empty()) throw fail("empty element");
  }

  auto to_int = [&](std::string_view s) {
    auto v = text::parse_int(s);
    if (!v) throw fail("'" + std::string(s) + "' is not an integer");
    return *v;
  };
  auto to_real = [&](std::string_view s) {
    auto v = text::parse_real(s);
    if (!v) throw fail("'" + std::string(s) + "' is not a finite decimal number");
    return *v;
  };

  try {
    if (interval) {
      if (type == "string") throw fail("string ranges cannot be intervals");
      if (items.size() != 2) throw fail("interval needs exactly two bounds");
      if (type == "int") return AttributeRange::int_interval(to_int(items[0]), to_int(items[1]));
      return AttributeRange::real_interval(to_real(items[0]), to_real(items[1]));
    }
    if (type == "int") {
      std::vector<std::int64_t> m;
      for (auto item : items) m.push_back(to_int(item));
      return AttributeRange::int_set(m);
    }
    if (type == "double") {
      std::vector<double> m;
      for (auto item : items) m.push_back(to_real(item));
      return AttributeRange::real_set(m);
    }
    std::vector<std::string> m;
    for (auto item : items) m.emplace_back(item);
    return AttributeRange::text_set(m);
  } catch (const Error& e) {
    const std::string msg = e.what();
    if (msg.rfind("invalid attribute range", 0) == 0) throw;
    throw fail(msg);
  }
}

inline bool validate(const AttrValue& value, const AttributeRange& range) noexcept {
  if (value.type() != range.value_type()) return false;
  if (value.type() == ValueType::Real && !std::isfinite(value.as_real())) return false;
  switch (range.kind()) {
    case RangeKind::Bool:
    case RangeKind::Text: return true;
    case RangeKind::IntInterval:
    case RangeKind::RealInterval: return !(value < range.min()) && !(range.max() < value);
    case RangeKind::IntSet:
    case RangeKind::RealSet:
    case RangeKind::TextSet:
      return std::find(range.members().begin(), range.members().end(), value) != range.members().end();
  }
  return false;
}

// Parses a textual cell into a value of the range's type and validates it.
// bool accepts true/false/1/0.
inline AttrValue parse_value(std::string_view raw, const AttributeRange& range) {
  const std::string_view s = range.value_type() == ValueType::Text ? raw : text::trim(raw);
  AttrValue v;
  switch (range.value_type()) {
    case ValueType::Bool:
      if (s == "true" || s == "1") {
        v = true;
      } else if (s == "false" || s == "0") {
        v = false;
      } else {
        throw Error("'" + std::string(s) + "' is not a boolean");
      }
      break;
    case ValueType::Int:
      if (auto i = text::parse_int(s)) {
        v = *i;
      } else {
        throw Error("'" + std::string(s) + "' is not an integer");
      }
      break;
    case ValueType::Real:
      if (auto d = text::parse_real(s)) {
        v = *d;
      } else {
        throw Error("'" + std::string(s) + "' is not a finite number");
      }
      break;
    case ValueType::Text: v = std::string(s); break;
  }
  if (!validate(v, range)) throw Error("value '" + std::string(s) + "' is outside " + range.to_string());
  return v;
}

namespace detail {

// floor(x * n / 2^64): maps a 64-bit draw onto [0, n) with one multiply.
inline std::uint64_t scale_to(std::uint64_t x, std::uint64_t n) noexcept {
  return static_cast<std::uint64_t>((static_cast<unsigned __int128>(x) * n) >> 64u);
}

}  // namespace detail

// Uniform draw from the range. PRNG consumption is fixed per kind:
//   bool            1 output  (top bit)
//   int interval    2 outputs (inclusive on both ends)
//   double interval 2 outputs (53-bit, half-open [min,max))
//   any set         2 outputs (uniform member)
// Free text has no generator and throws.
inline AttrValue random_value(const AttributeRange& range, Pcg32& rng) {
  switch (range.kind()) {
    case RangeKind::Bool: return AttrValue((rng() >> 31u) != 0);
    case RangeKind::IntInterval: {
      const std::int64_t lo = range.min().as_int();
      const auto span = static_cast<std::uint64_t>(range.max().as_int()) - static_cast<std::uint64_t>(lo);
      const std::uint64_t x = rng.next64();
      const std::uint64_t offset = span == std::numeric_limits<std::uint64_t>::max() ? x : detail::scale_to(x, span + 1);
      return AttrValue(static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + offset));
    }
    case RangeKind::RealInterval: {
      const double lo = range.min().as_real();
      const double hi = range.max().as_real();
      const double u = rng.next_double();
      if (lo == hi) return AttrValue(lo);
      double v = lo + u * (hi - lo);
      if (!std::isfinite(v)) v = lo * (1.0 - u) + hi * u;
      if (v >= hi) v = std::nextafter(hi, lo);
      if (v < lo) v = lo;
      return AttrValue(v);
    }
    case RangeKind::IntSet:
    case RangeKind::RealSet:
    case RangeKind::TextSet: {
      const auto& m = range.members();
      return m[detail::scale_to(rng.next64(), m.size())];
    }
    case RangeKind::Text: throw Error("cannot draw a random value from an unbounded string range");
  }
  return {};
}

struct AttrDecl {
  std::string name;
  AttributeRange range;

  friend bool operator==(const AttrDecl&, const AttrDecl&) = default;
};

// Ordered name -> range list. Order is significant: it fixes the column
// order of attribute tables and output files.
class AttrSchema {
 public:
  AttrSchema() = default;
  AttrSchema(std::initializer_list<AttrDecl> decls) {
    for (const auto& d : decls) add(d.name, d.range);
  }

  void add(std::string name, AttributeRange range) {
    if (!text::is_identifier(name)) throw Error("invalid attribute name '" + name + "'");
    if (find(name)) throw Error("duplicate attribute '" + name + "'");
    decls_.push_back({std::move(name), std::move(range)});
  }

  std::size_t size() const noexcept { return decls_.size(); }
  bool empty() const noexcept { return decls_.empty(); }
  const AttrDecl& operator[](std::size_t i) const { return decls_.at(i); }
  auto begin() const noexcept { return decls_.begin(); }
  auto end() const noexcept { return decls_.end(); }

  std::optional<std::size_t> find(std::string_view name) const noexcept {
    for (std::size_t i = 0; i < decls_.size(); ++i) {
      if (decls_[i].name == name) return i;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto i = find(name)) return *i;
    throw Error("unknown attribute '" + std::string(name) + "'");
  }

  std::vector<AttrValue> defaults() const {
    std::vector<AttrValue> out;
    out.reserve(decls_.size());
    for (const auto& d : decls_) out.push_back(d.range.default_value());
    return out;
  }

  friend bool operator==(const AttrSchema&, const AttrSchema&) = default;

 private:
  std::vector<AttrDecl> decls_;
};

}  // namespace evonet
