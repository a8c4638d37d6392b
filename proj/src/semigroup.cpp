#include "dynframe/semigroup.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "dynframe/error.hpp"

namespace dynframe::semigroup {

// ---------------------------------------------------------------------------
// Descriptor

Descriptor Descriptor::free_abelian(int k) {
  if (k < 1) throw InvalidArgument("free abelian semigroup needs at least one generator");
  auto n = std::make_shared<Node>();
  n->kind = Kind::FreeAbelian;
  n->k = k;
  n->arity = k;
  n->capped_arity = k;
  return Descriptor(std::move(n));
}

Descriptor Descriptor::finite_abelian(std::vector<int> orders) {
  if (orders.empty()) throw InvalidArgument("finite abelian group needs at least one factor");
  for (int o : orders) {
    if (o < 2) throw InvalidArgument("finite abelian factor orders must be >= 2");
  }
  auto n = std::make_shared<Node>();
  n->kind = Kind::FiniteAbelian;
  n->arity = static_cast<int>(orders.size());
  n->capped_arity = 0;
  n->values = std::move(orders);
  return Descriptor(std::move(n));
}

Descriptor Descriptor::numerical(std::vector<int> generators) {
  if (generators.empty()) throw InvalidArgument("numerical semigroup needs at least one generator");
  for (int g : generators) {
    if (g < 1) throw InvalidArgument("numerical semigroup generators must be positive");
  }
  std::sort(generators.begin(), generators.end());
  generators.erase(std::unique(generators.begin(), generators.end()), generators.end());
  auto n = std::make_shared<Node>();
  n->kind = Kind::Numerical;
  n->arity = 1;
  n->capped_arity = 1;
  n->values = std::move(generators);
  return Descriptor(std::move(n));
}

Descriptor Descriptor::product(Descriptor left, Descriptor right) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::Product;
  n->arity = left.arity() + right.arity();
  n->capped_arity = left.capped_arity() + right.capped_arity();
  n->left = std::make_shared<const Descriptor>(std::move(left));
  n->right = std::make_shared<const Descriptor>(std::move(right));
  return Descriptor(std::move(n));
}

std::string Descriptor::describe() const {
  std::ostringstream os;
  auto list = [&os](const std::vector<int>& v) {
    for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  };
  switch (kind()) {
    case Kind::FreeAbelian:
      os << "Z+^" << rank();
      break;
    case Kind::FiniteAbelian:
      os << "Z(";
      list(orders());
      os << ")";
      break;
    case Kind::Numerical:
      os << "<";
      list(generator_values());
      os << ">";
      break;
    case Kind::Product:
      os << "(" << left().describe() << " x " << right().describe() << ")";
      break;
  }
  return os.str();
}

bool Descriptor::operator==(const Descriptor& other) const {
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case Kind::FreeAbelian:
      return rank() == other.rank();
    case Kind::FiniteAbelian:
    case Kind::Numerical:
      return node_->values == other.node_->values;
    case Kind::Product:
      return left() == other.left() && right() == other.right();
  }
  return false;
}

// ---------------------------------------------------------------------------
// Element arithmetic

namespace {

Element slice(const Element& e, std::size_t from, std::size_t count) {
  return Element(e.begin() + static_cast<std::ptrdiff_t>(from),
                 e.begin() + static_cast<std::ptrdiff_t>(from + count));
}

Element concat(const Element& a, const Element& b) {
  Element out = a;
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

std::vector<bool> representable_table(const std::vector<int>& generators, std::int64_t up_to) {
  std::vector<bool> ok(static_cast<std::size_t>(std::max<std::int64_t>(up_to, 0) + 1), false);
  ok[0] = true;
  for (std::int64_t v = 1; v <= up_to; ++v) {
    for (int g : generators) {
      if (g <= v && ok[static_cast<std::size_t>(v - g)]) {
        ok[static_cast<std::size_t>(v)] = true;
        break;
      }
    }
  }
  return ok;
}

Element identity(const Descriptor& d) { return Element(static_cast<std::size_t>(d.arity()), 0); }

bool is_valid(const Descriptor& d, const Element& e) {
  if (e.size() != static_cast<std::size_t>(d.arity())) return false;
  switch (d.kind()) {
    case Descriptor::Kind::FreeAbelian:
      return std::all_of(e.begin(), e.end(), [](std::int64_t c) { return c >= 0; });
    case Descriptor::Kind::FiniteAbelian:
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] < 0 || e[i] >= d.orders()[i]) return false;
      }
      return true;
    case Descriptor::Kind::Numerical:
      return e[0] >= 0 && representable_table(d.generator_values(), e[0]).back();
    case Descriptor::Kind::Product: {
      const auto la = static_cast<std::size_t>(d.left().arity());
      return is_valid(d.left(), slice(e, 0, la)) &&
             is_valid(d.right(), slice(e, la, e.size() - la));
    }
  }
  return false;
}

void require_valid(const Descriptor& d, const Element& e) {
  if (!is_valid(d, e)) throw InvalidArgument("element is not a member of " + d.describe());
}

Element mult(const Descriptor& d, const Element& a, const Element& b) {
  const auto n = static_cast<std::size_t>(d.arity());
  if (a.size() != n || b.size() != n) throw InvalidArgument("element arity does not match " + d.describe());
  switch (d.kind()) {
    case Descriptor::Kind::FreeAbelian:
    case Descriptor::Kind::Numerical: {
      Element out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
      return out;
    }
    case Descriptor::Kind::FiniteAbelian: {
      Element out(a.size());
      for (std::size_t i = 0; i < a.size(); ++i) out[i] = (a[i] + b[i]) % d.orders()[i];
      return out;
    }
    case Descriptor::Kind::Product: {
      const auto la = static_cast<std::size_t>(d.left().arity());
      const auto ra = a.size() - la;
      return concat(mult(d.left(), slice(a, 0, la), slice(b, 0, la)),
                    mult(d.right(), slice(a, la, ra), slice(b, la, ra)));
    }
  }
  return {};
}

std::vector<Element> generators(const Descriptor& d) {
  std::vector<Element> out;
  switch (d.kind()) {
    case Descriptor::Kind::FreeAbelian:
    case Descriptor::Kind::FiniteAbelian:
      for (int i = 0; i < d.arity(); ++i) {
        Element e = identity(d);
        e[static_cast<std::size_t>(i)] = 1;
        out.push_back(std::move(e));
      }
      break;
    case Descriptor::Kind::Numerical:
      for (int g : d.generator_values()) out.push_back(Element{g});
      break;
    case Descriptor::Kind::Product: {
      const Element li = identity(d.left());
      const Element ri = identity(d.right());
      for (const Element& g : generators(d.left())) out.push_back(concat(g, ri));
      for (const Element& g : generators(d.right())) out.push_back(concat(li, g));
      break;
    }
  }
  return out;
}

std::optional<Decomposition> predecessor(const Descriptor& d, const Element& n) {
  switch (d.kind()) {
    case Descriptor::Kind::FreeAbelian:
    case Descriptor::Kind::FiniteAbelian:
      for (std::size_t i = 0; i < n.size(); ++i) {
        if (n[i] > 0) {
          Element rest = n;
          rest[i] -= 1;
          return Decomposition{i, std::move(rest)};
        }
      }
      return std::nullopt;
    case Descriptor::Kind::Numerical: {
      if (n[0] == 0) return std::nullopt;
      const auto& gens = d.generator_values();
      const auto table = representable_table(gens, n[0]);
      for (std::size_t i = gens.size(); i-- > 0;) {
        const std::int64_t r = n[0] - gens[i];
        if (r >= 0 && table[static_cast<std::size_t>(r)]) return Decomposition{i, Element{r}};
      }
      return std::nullopt;
    }
    case Descriptor::Kind::Product: {
      const auto la = static_cast<std::size_t>(d.left().arity());
      const Element l = slice(n, 0, la);
      const Element r = slice(n, la, n.size() - la);
      if (auto dl = predecessor(d.left(), l)) {
        return Decomposition{dl->generator, concat(dl->rest, r)};
      }
      if (auto dr = predecessor(d.right(), r)) {
        return Decomposition{generators(d.left()).size() + dr->generator, concat(l, dr->rest)};
      }
      return std::nullopt;
    }
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Window specs

WindowSpec WindowSpec::parse(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw InvalidArgument("window spec must look like kind:values, got '" + text + "'");
  const std::string kind = text.substr(0, colon);
  std::vector<int> caps;
  std::stringstream ss(text.substr(colon + 1));
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      const int v = std::stoi(item, &used);
      if (used != item.size() || v < 0) throw InvalidArgument("bad window cap '" + item + "'");
      caps.push_back(v);
    } catch (const std::logic_error&) {
      throw InvalidArgument("bad window cap '" + item + "'");
    }
  }
  if (caps.empty()) throw InvalidArgument("window spec has no caps: '" + text + "'");
  if (kind == "box") return box(std::move(caps));
  if (caps.size() != 1) throw InvalidArgument("window spec '" + kind + "' takes a single value");
  if (kind == "total" || kind == "total_degree") return total_degree(caps[0]);
  if (kind == "cap") return cap(caps[0]);
  throw InvalidArgument("unknown window kind '" + kind + "'");
}

std::string WindowSpec::to_string() const {
  std::ostringstream os;
  os << (kind == Kind::Box ? "box:" : kind == Kind::TotalDegree ? "total:" : "cap:");
  for (std::size_t i = 0; i < caps.size(); ++i) os << (i ? "," : "") << caps[i];
  return os.str();
}

// ---------------------------------------------------------------------------
// Window enumeration

namespace {

bool graded_lex_less(const Element& a, const Element& b) {
  const auto sa = std::accumulate(a.begin(), a.end(), std::int64_t{0});
  const auto sb = std::accumulate(b.begin(), b.end(), std::int64_t{0});
  if (sa != sb) return sa < sb;
  return a < b;
}

// All tuples with 0 <= t_i <= bound_i.
std::vector<Element> box_tuples(const std::vector<std::int64_t>& bounds) {
  std::vector<Element> out;
  Element cur(bounds.size(), 0);
  if (bounds.empty()) {
    out.push_back(cur);
    return out;
  }
  while (true) {
    out.push_back(cur);
    std::size_t i = bounds.size();
    while (i-- > 0) {
      if (cur[i] < bounds[i]) {
        ++cur[i];
        break;
      }
      cur[i] = 0;
      if (i == 0) return out;
    }
  }
}

// Leaf enumeration with `caps` holding either one cap per capped coordinate
// (box) or the degree bound (total degree) for this factor.
std::vector<Element> enumerate_leaf(const Descriptor& d, bool total, const std::vector<int>& caps) {
  std::vector<Element> out;
  switch (d.kind()) {
    case Descriptor::Kind::FreeAbelian: {
      std::vector<std::int64_t> bounds;
      for (int i = 0; i < d.rank(); ++i) bounds.push_back(total ? caps[0] : caps[static_cast<std::size_t>(i)]);
      for (Element& e : box_tuples(bounds)) {
        if (total && std::accumulate(e.begin(), e.end(), std::int64_t{0}) > caps[0]) continue;
        out.push_back(std::move(e));
      }
      break;
    }
    case Descriptor::Kind::FiniteAbelian: {
      std::vector<std::int64_t> bounds;
      for (int o : d.orders()) bounds.push_back(o - 1);
      out = box_tuples(bounds);
      break;
    }
    case Descriptor::Kind::Numerical: {
      const auto table = representable_table(d.generator_values(), caps[0]);
      for (std::int64_t v = 0; v <= caps[0]; ++v) {
        if (table[static_cast<std::size_t>(v)]) out.push_back(Element{v});
      }
      break;
    }
    case Descriptor::Kind::Product:
      break;
  }
  std::sort(out.begin(), out.end(), graded_lex_less);
  return out;
}

std::vector<Element> enumerate_rec(const Descriptor& d, bool total, const std::vector<int>& caps) {
  if (d.kind() != Descriptor::Kind::Product) return enumerate_leaf(d, total, caps);
  std::vector<int> lcaps, rcaps;
  if (total) {
    // Only one side may carry capped coordinates; it receives the bound.
    lcaps = caps;
    rcaps = caps;
  } else {
    const auto lc = static_cast<std::size_t>(d.left().capped_arity());
    lcaps.assign(caps.begin(), caps.begin() + static_cast<std::ptrdiff_t>(lc));
    rcaps.assign(caps.begin() + static_cast<std::ptrdiff_t>(lc), caps.end());
  }
  const auto lw = enumerate_rec(d.left(), total, lcaps);
  const auto rw = enumerate_rec(d.right(), total, rcaps);
  std::vector<Element> out;
  out.reserve(lw.size() * rw.size());
  for (const Element& a : lw) {
    for (const Element& b : rw) out.push_back(concat(a, b));
  }
  return out;
}

int count_capped_products(const Descriptor& d) {
  if (d.kind() != Descriptor::Kind::Product) return d.capped_arity() > 0 ? 1 : 0;
  return count_capped_products(d.left()) + count_capped_products(d.right());
}

}  // namespace

Window::Window(Descriptor d, WindowSpec s, std::vector<Element> elems)
    : desc_(std::move(d)), spec_(std::move(s)), elements_(std::move(elems)) {
  for (std::size_t i = 0; i < elements_.size(); ++i) index_.emplace(elements_[i], i);
}

Window Window::enumerate(const Descriptor& d, const WindowSpec& spec) {
  if (spec.caps.empty()) throw InvalidArgument("window spec has no caps");
  for (int c : spec.caps) {
    if (c < 0) throw InvalidArgument("window caps must be nonnegative");
  }
  const auto capped = static_cast<std::size_t>(d.capped_arity());
  bool total = false;
  std::vector<int> caps;
  switch (spec.kind) {
    case WindowSpec::Kind::Box:
      if (spec.caps.size() == 1) {
        caps.assign(capped, spec.caps[0]);
      } else if (spec.caps.size() == capped) {
        caps = spec.caps;
      } else {
        throw InvalidArgument("box window needs 1 or " + std::to_string(capped) + " caps for " + d.describe());
      }
      break;
    case WindowSpec::Kind::Cap:
      caps.assign(capped, spec.caps[0]);
      break;
    case WindowSpec::Kind::TotalDegree:
      if (count_capped_products(d) > 1) {
        throw InvalidArgument("total-degree windows need a single capped factor; use a box for " + d.describe());
      }
      total = true;
      caps = spec.caps;
      break;
  }
  auto elems = enumerate_rec(d, total, caps);
  if (elems.empty() || elems.front() != identity(d)) {
    throw InvalidArgument("window does not contain the identity");
  }
  return Window(d, spec, std::move(elems));
}

std::optional<std::size_t> Window::index_of(const Element& e) const {
  auto it = index_.find(e);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::int64_t Window::coordinate_max(int c) const {
  std::int64_t m = 0;
  for (const Element& e : elements_) m = std::max(m, e[static_cast<std::size_t>(c)]);
  return m;
}

namespace {

// v with g v = e, if such an element of the semigroup exists.
std::optional<Element> divide(const Descriptor& d, const Element& e, const Element& g) {
  switch (d.kind()) {
    case Descriptor::Kind::FreeAbelian: {
      Element v(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        v[i] = e[i] - g[i];
        if (v[i] < 0) return std::nullopt;
      }
      return v;
    }
    case Descriptor::Kind::FiniteAbelian: {
      Element v(e.size());
      for (std::size_t i = 0; i < e.size(); ++i) {
        const int o = d.orders()[i];
        v[i] = ((e[i] - g[i]) % o + o) % o;
      }
      return v;
    }
    case Descriptor::Kind::Numerical: {
      Element v{e[0] - g[0]};
      if (!is_valid(d, v)) return std::nullopt;
      return v;
    }
    case Descriptor::Kind::Product: {
      const auto la = static_cast<std::size_t>(d.left().arity());
      const auto ra = e.size() - la;
      auto l = divide(d.left(), slice(e, 0, la), slice(g, 0, la));
      auto r = divide(d.right(), slice(e, la, ra), slice(g, la, ra));
      if (!l || !r) return std::nullopt;
      return concat(*l, *r);
    }
  }
  return std::nullopt;
}

}  // namespace

bool is_lower_set(const Window& w) {
  const Descriptor& d = w.descriptor();
  if (!w.contains(identity(d))) return false;
  // Closure under division by generators implies closure under division by
  // any element (induct on a factorisation of the divisor).
  const auto gens = generators(d);
  for (const Element& e : w.elements()) {
    for (const Element& g : gens) {
      if (auto v = divide(d, e, g); v && !w.contains(*v)) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------
// Truncated left regular representation

CMatrix left_regular_matrix(const Element& s, const Window& w) {
  require_valid(w.descriptor(), s);
  const auto n = static_cast<Eigen::Index>(w.size());
  CMatrix m = CMatrix::Zero(n, n);
  for (std::size_t t = 0; t < w.size(); ++t) {
    if (auto i = w.index_of(mult(w.descriptor(), s, w[t]))) {
      m(static_cast<Eigen::Index>(*i), static_cast<Eigen::Index>(t)) = 1.0;
    }
  }
  return m;
}

CMatrix left_regular_adjoint(const Element& s, const Window& w) {
  require_valid(w.descriptor(), s);
  const auto n = static_cast<Eigen::Index>(w.size());
  CMatrix m = CMatrix::Zero(n, n);
  // Column t has a single 1 at row v when t = s v (v unique by cancellation).
  for (std::size_t v = 0; v < w.size(); ++v) {
    if (auto t = w.index_of(mult(w.descriptor(), s, w[v]))) {
      m(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(*t)) = 1.0;
    }
  }
  return m;
}

std::vector<std::size_t> interior(const Window& w, const Element& s) {
  require_valid(w.descriptor(), s);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (w.contains(mult(w.descriptor(), s, w[i]))) out.push_back(i);
  }
  return out;
}

}  // namespace dynframe::semigroup
