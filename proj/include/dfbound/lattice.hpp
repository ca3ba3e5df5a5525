#pragma once

// Component lattices and the product lattice over xi entities.
//
// A component lattice is a static policy type:
//   value_type, top(), bottom(), meet(a, b), height(v), max_height,
//   sample(rng), name(v)
// height(v) is the length of a longest descending chain from top to v.

#include <concepts>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace dfbound {

template <class L>
concept component_lattice = requires(const typename L::value_type& a, std::mt19937_64& rng) {
  typename L::value_type;
  { L::top() } -> std::same_as<typename L::value_type>;
  { L::bottom() } -> std::same_as<typename L::value_type>;
  { L::meet(a, a) } -> std::same_as<typename L::value_type>;
  { L::height(a) } -> std::convertible_to<std::uint32_t>;
  { L::max_height } -> std::convertible_to<std::uint32_t>;
  { L::sample(rng) } -> std::same_as<typename L::value_type>;
  { L::name(a) } -> std::convertible_to<std::string>;
  { a == a } -> std::convertible_to<bool>;
};

template <component_lattice L>
bool less_equal(const typename L::value_type& a, const typename L::value_type& b) {
  return L::meet(a, b) == a;
}

// Constant propagation: undef (top) > every constant > nonconst (bottom).
struct cp_value {
  enum class kind : std::uint8_t { undef, constant, nonconst };
  kind state = kind::undef;
  std::int64_t constant_value = 0;

  static cp_value undef() { return {}; }
  static cp_value constant(std::int64_t c) { return {kind::constant, c}; }
  static cp_value nonconst() { return {kind::nonconst, 0}; }

  bool is_undef() const { return state == kind::undef; }
  bool is_constant() const { return state == kind::constant; }
  bool is_nonconst() const { return state == kind::nonconst; }

  friend bool operator==(const cp_value& a, const cp_value& b) {
    if (a.state != b.state) return false;
    return a.state != kind::constant || a.constant_value == b.constant_value;
  }
};

struct cp_lattice {
  using value_type = cp_value;
  static constexpr std::uint32_t max_height = 2;

  static value_type top() { return cp_value::undef(); }
  static value_type bottom() { return cp_value::nonconst(); }

  static value_type meet(const value_type& a, const value_type& b) {
    if (a.is_undef()) return b;
    if (b.is_undef()) return a;
    if (a.is_nonconst() || b.is_nonconst()) return bottom();
    return a.constant_value == b.constant_value ? a : bottom();
  }

  static std::uint32_t height(const value_type& v) {
    switch (v.state) {
      case cp_value::kind::undef: return 0;
      case cp_value::kind::constant: return 1;
      case cp_value::kind::nonconst: return 2;
    }
    return 0;
  }

  static value_type sample(std::mt19937_64& rng) {
    const auto r = rng() % 7;
    if (r == 0) return top();
    if (r == 1) return bottom();
    return cp_value::constant(static_cast<std::int64_t>(r) - 3);
  }

  static std::string name(const value_type& v) {
    if (v.is_undef()) return "undef";
    if (v.is_nonconst()) return "nonconst";
    return std::to_string(v.constant_value);
  }
};

// Two-element lattice used by faint variables and the bit-vector analyses.
// What top and bottom mean is analysis specific (faint / not faint,
// available / killed, absent / reaching, dead / live).
enum class two_point : std::uint8_t { top, bottom };

struct two_point_lattice {
  using value_type = two_point;
  static constexpr std::uint32_t max_height = 1;

  static value_type top() { return two_point::top; }
  static value_type bottom() { return two_point::bottom; }
  static value_type meet(value_type a, value_type b) {
    return (a == two_point::bottom || b == two_point::bottom) ? two_point::bottom
                                                               : two_point::top;
  }
  static std::uint32_t height(value_type v) { return v == two_point::bottom ? 1 : 0; }
  static value_type sample(std::mt19937_64& rng) {
    return (rng() & 1) ? two_point::bottom : two_point::top;
  }
  static std::string name(value_type v) { return v == two_point::top ? "top" : "bottom"; }
};

class entity_mismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Element of the product lattice: one component value per entity.
template <component_lattice L>
class product_value {
 public:
  using value_type = typename L::value_type;

  product_value() = default;
  explicit product_value(std::size_t entities, value_type fill = L::top())
      : values_(entities, fill) {}
  explicit product_value(std::vector<value_type> values) : values_(std::move(values)) {}

  static product_value top(std::size_t entities) { return product_value(entities, L::top()); }
  static product_value bottom(std::size_t entities) {
    return product_value(entities, L::bottom());
  }

  std::size_t size() const noexcept { return values_.size(); }
  value_type& operator[](std::size_t i) { return values_[i]; }
  const value_type& operator[](std::size_t i) const { return values_[i]; }
  const std::vector<value_type>& values() const noexcept { return values_; }

  friend bool operator==(const product_value& a, const product_value& b) {
    return a.values_ == b.values_;
  }

 private:
  std::vector<value_type> values_;
};

template <component_lattice L>
product_value<L> meet_product(const product_value<L>& a, const product_value<L>& b) {
  if (a.size() != b.size())
    throw entity_mismatch("product meet over " + std::to_string(a.size()) + " and " +
                          std::to_string(b.size()) + " entities");
  product_value<L> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = L::meet(a[i], b[i]);
  return out;
}

template <component_lattice L>
bool less_equal(const product_value<L>& a, const product_value<L>& b) {
  return meet_product(a, b) == a;
}

template <component_lattice L>
product_value<L> sample_product(std::size_t entities, std::mt19937_64& rng) {
  product_value<L> v(entities);
  for (std::size_t i = 0; i < entities; ++i) v[i] = L::sample(rng);
  return v;
}

// Height of the product lattice of xi identical components.
inline std::uint64_t product_height(std::uint64_t component_height, std::uint64_t entities) {
  return component_height * entities;
}

}  // namespace dfbound
