#pragma once

// Finitely generated commutative semigroups, their finite lower-set windows,
// and truncated left regular representations on l^2(window).
//
// Elements are flat coordinate tuples. A product descriptor concatenates the
// coordinates of its factors (left first). Free and numerical coordinates are
// "capped" by a window spec; finite-group coordinates are always enumerated in
// full.
//
// Ordering: inside a leaf factor, windows are graded-lexicographic (total
// coordinate sum, then lexicographic). A product window is the lexicographic
// product of its factor windows, so that the left regular matrix of a product
// element is exactly the Kronecker product of the factor matrices.

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dynframe/linalg.hpp"

namespace dynframe::semigroup {

using Element = std::vector<std::int64_t>;

class Descriptor {
 public:
  enum class Kind { FreeAbelian, FiniteAbelian, Numerical, Product };

  static Descriptor free_abelian(int k);
  static Descriptor finite_abelian(std::vector<int> orders);
  /// Generators are sorted and deduplicated; they must be positive.
  static Descriptor numerical(std::vector<int> generators);
  static Descriptor product(Descriptor left, Descriptor right);

  Kind kind() const { return node_->kind; }
  /// Number of coordinates of an element.
  int arity() const { return node_->arity; }
  /// Number of coordinates constrained by a window cap.
  int capped_arity() const { return node_->capped_arity; }

  int rank() const { return node_->k; }                      // FreeAbelian
  const std::vector<int>& orders() const { return node_->values; }      // FiniteAbelian
  const std::vector<int>& generator_values() const { return node_->values; }  // Numerical
  const Descriptor& left() const { return *node_->left; }
  const Descriptor& right() const { return *node_->right; }

  std::string describe() const;
  bool operator==(const Descriptor& other) const;

 private:
  struct Node {
    Kind kind;
    int k = 0;
    std::vector<int> values;
    std::shared_ptr<const Descriptor> left;
    std::shared_ptr<const Descriptor> right;
    int arity = 0;
    int capped_arity = 0;
  };
  explicit Descriptor(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

Element identity(const Descriptor& d);
bool is_valid(const Descriptor& d, const Element& e);
/// Throws InvalidArgument when `e` is not an element of `d`.
void require_valid(const Descriptor& d, const Element& e);
Element mult(const Descriptor& d, const Element& a, const Element& b);

/// Canonical generating set. Free/finite factors: unit coordinate vectors.
/// Numerical: each generator value. Product: left generators padded with the
/// right identity, then right generators padded with the left identity.
std::vector<Element> generators(const Descriptor& d);

/// n = generators(d)[generator] * rest, with `rest` strictly smaller in the
/// window order. Empty for the identity.
struct Decomposition {
  std::size_t generator = 0;
  Element rest;
};
std::optional<Decomposition> predecessor(const Descriptor& d, const Element& n);

/// Dynamic-programming representability table for a numerical semigroup:
/// entry v is true iff v is a nonnegative combination of the generators.
std::vector<bool> representable_table(const std::vector<int>& generators, std::int64_t up_to);

struct WindowSpec {
  enum class Kind { Box, TotalDegree, Cap };
  Kind kind = Kind::Box;
  /// Box: one cap per capped coordinate, or a single cap broadcast to all.
  /// TotalDegree / Cap: a single value.
  std::vector<int> caps;

  static WindowSpec box(std::vector<int> caps) { return {Kind::Box, std::move(caps)}; }
  static WindowSpec total_degree(int n) { return {Kind::TotalDegree, {n}}; }
  static WindowSpec cap(int n) { return {Kind::Cap, {n}}; }
  /// "box:4", "box:3,5", "total:6", "cap:30".
  static WindowSpec parse(const std::string& text);
  std::string to_string() const;
};

class Window {
 public:
  /// Throws InvalidArgument for negative caps or a spec that does not fit
  /// the descriptor.
  static Window enumerate(const Descriptor& d, const WindowSpec& spec);

  const Descriptor& descriptor() const { return desc_; }
  const WindowSpec& spec() const { return spec_; }
  std::size_t size() const { return elements_.size(); }
  const Element& operator[](std::size_t i) const { return elements_[i]; }
  const std::vector<Element>& elements() const { return elements_; }
  std::optional<std::size_t> index_of(const Element& e) const;
  bool contains(const Element& e) const { return index_.count(e) > 0; }

  /// Upper bound of coordinate `c` over the window (the box cap for capped
  /// coordinates, N - 1 for a finite coordinate of order N).
  std::int64_t coordinate_max(int c) const;

 private:
  Window(Descriptor d, WindowSpec s, std::vector<Element> elems);
  Descriptor desc_;
  WindowSpec spec_;
  std::vector<Element> elements_;
  std::map<Element, std::size_t> index_;
};

/// Checks the lower-set property directly: for every w in W and generator g
/// with w = g * v, v lies in W.
bool is_lower_set(const Window& w);

/// |W| x |W| matrix of the truncated lambda(s): entry (st, t) = 1 when st is
/// in W; column t is zero otherwise.
CMatrix left_regular_matrix(const Element& s, const Window& w);

/// Truncated lambda(s)^*: entry (v, t) = 1 iff t = s v with both in W.
CMatrix left_regular_adjoint(const Element& s, const Window& w);

/// Positions of w in W with s * w in W.
std::vector<std::size_t> interior(const Window& w, const Element& s);

}  // namespace dynframe::semigroup
