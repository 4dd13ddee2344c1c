#pragma once

// μ-recursive functions: AST, a prefix DSL, and a fuel-bounded evaluator used
// as the reference for compiled systems.
//
//   expr := "Z" [ "[" nat "]" ] | "S" | "U" "[" nat "," nat "]"
//         | "C" "(" expr ";" expr { "," expr } ")"
//         | "P" "(" expr "," expr ")"
//         | "M" "(" expr ")"

#include <cctype>
#include <cstdint>
#include <memory>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "memrec/error.hpp"
#include "memrec/multiset.hpp"

namespace memrec {

using Nat = Count;

class RecExpr {
 public:
  struct Zero {
    std::size_t n;
  };
  struct Succ {};
  struct Proj {
    std::size_t n, i;  // 1 <= i <= n
  };
  struct Comp {
    std::shared_ptr<const RecExpr> f;
    std::vector<RecExpr> gs;
  };
  struct PrimRec {
    std::shared_ptr<const RecExpr> f, g;
  };
  struct Min {
    std::shared_ptr<const RecExpr> f;
  };
  using Node = std::variant<Zero, Succ, Proj, Comp, PrimRec, Min>;

  // Factories check the arity invariants; `path` names the node in errors.
  static RecExpr zero(std::size_t n) { return RecExpr(Zero{n}, n); }
  static RecExpr succ() { return RecExpr(Succ{}, 1); }

  static RecExpr proj(std::size_t n, std::size_t i, const std::string& path = "$") {
    if (i < 1 || i > n)
      throw ArityError(path, "index " + std::to_string(i), "1.." + std::to_string(n));
    return RecExpr(Proj{n, i}, n);
  }

  static RecExpr comp(RecExpr f, std::vector<RecExpr> gs, const std::string& path = "$") {
    if (gs.empty()) throw ArityError(path, "0 inner functions", "at least 1");
    if (f.arity() != gs.size())
      throw ArityError(path + ".f", "arity " + std::to_string(f.arity()),
                       "arity " + std::to_string(gs.size()));
    const std::size_t n = gs.front().arity();
    for (std::size_t k = 1; k < gs.size(); ++k)
      if (gs[k].arity() != n)
        throw ArityError(path + ".g" + std::to_string(k + 1),
                         "arity " + std::to_string(gs[k].arity()), "arity " + std::to_string(n));
    return RecExpr(Comp{std::make_shared<const RecExpr>(std::move(f)), std::move(gs)}, n);
  }

  static RecExpr primrec(RecExpr f, RecExpr g, const std::string& path = "$") {
    if (g.arity() != f.arity() + 2)
      throw ArityError(path + ".g", "arity " + std::to_string(g.arity()),
                       "arity " + std::to_string(f.arity() + 2));
    const std::size_t n = f.arity() + 1;
    return RecExpr(PrimRec{std::make_shared<const RecExpr>(std::move(f)),
                           std::make_shared<const RecExpr>(std::move(g))},
                   n);
  }

  static RecExpr min(RecExpr f, const std::string& path = "$") {
    if (f.arity() < 2)
      throw ArityError(path + ".f", "arity " + std::to_string(f.arity()), "arity >= 2");
    const std::size_t n = f.arity() - 1;
    return RecExpr(Min{std::make_shared<const RecExpr>(std::move(f))}, n);
  }

  const Node& node() const noexcept { return *node_; }
  std::size_t arity() const noexcept { return arity_; }

  template <class T>
  const T* as() const noexcept {
    return std::get_if<T>(node_.get());
  }

  std::string to_string() const {
    std::ostringstream os;
    os << *this;
    return os.str();
  }

  friend bool operator==(const RecExpr& a, const RecExpr& b) {
    if (a.node_ == b.node_) return true;
    if (a.node_->index() != b.node_->index()) return false;
    return std::visit(
        [&](const auto& x) -> bool {
          using T = std::decay_t<decltype(x)>;
          const auto& y = std::get<T>(*b.node_);
          if constexpr (std::is_same_v<T, Zero>) return x.n == y.n;
          else if constexpr (std::is_same_v<T, Succ>) return true;
          else if constexpr (std::is_same_v<T, Proj>) return x.n == y.n && x.i == y.i;
          else if constexpr (std::is_same_v<T, Comp>) return *x.f == *y.f && x.gs == y.gs;
          else if constexpr (std::is_same_v<T, PrimRec>) return *x.f == *y.f && *x.g == *y.g;
          else return *x.f == *y.f;
        },
        *a.node_);
  }

  friend std::ostream& operator<<(std::ostream& os, const RecExpr& e) {
    std::visit(
        [&](const auto& x) {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, Zero>) {
            os << "Z[" << x.n << ']';
          } else if constexpr (std::is_same_v<T, Succ>) {
            os << 'S';
          } else if constexpr (std::is_same_v<T, Proj>) {
            os << "U[" << x.n << ',' << x.i << ']';
          } else if constexpr (std::is_same_v<T, Comp>) {
            os << "C(" << *x.f << ';';
            for (std::size_t k = 0; k < x.gs.size(); ++k) os << (k ? ", " : " ") << x.gs[k];
            os << ')';
          } else if constexpr (std::is_same_v<T, PrimRec>) {
            os << "P(" << *x.f << ", " << *x.g << ')';
          } else {
            os << "M(" << *x.f << ')';
          }
        },
        *e.node_);
    return os;
  }

 private:
  RecExpr(Node n, std::size_t arity)
      : node_(std::make_shared<const Node>(std::move(n))), arity_(arity) {}

  std::shared_ptr<const Node> node_;
  std::size_t arity_;
};

inline std::size_t arity(const RecExpr& e) { return e.arity(); }

// ---------------------------------------------------------------------------
// Parser

namespace detail {

class Parser {
 public:
  explicit Parser(std::string_view text) : text_(text) {}

  RecExpr parse_all() {
    RecExpr e = expr("$");
    skip_ws();
    if (pos_ != text_.size()) fail("end of input");
    return e;
  }

 private:
  [[noreturn]] void fail(std::string expected) const {
    throw SyntaxError(pos_ + 1, std::move(expected));
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(char c) {
    skip_ws();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  void expect(char c) {
    if (!peek(c)) fail(std::string("'") + c + "'");
    ++pos_;
  }

  std::size_t nat() {
    skip_ws();
    if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
      fail("natural number");
    std::size_t v = 0;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      const std::size_t d = static_cast<std::size_t>(text_[pos_] - '0');
      if (v > (std::size_t(-1) - d) / 10) fail("smaller number");
      v = v * 10 + d;
      ++pos_;
    }
    return v;
  }

  RecExpr expr(const std::string& path) {
    skip_ws();
    if (pos_ >= text_.size()) fail("expression (Z, S, U, C, P or M)");
    const char head = text_[pos_++];
    switch (head) {
      case 'Z': {
        if (!peek('[')) return RecExpr::zero(1);
        expect('[');
        const std::size_t n = nat();
        expect(']');
        return RecExpr::zero(n);
      }
      case 'S':
        return RecExpr::succ();
      case 'U': {
        expect('[');
        const std::size_t n = nat();
        expect(',');
        const std::size_t i = nat();
        expect(']');
        return RecExpr::proj(n, i, path);
      }
      case 'C': {
        expect('(');
        RecExpr f = expr(path + ".f");
        expect(';');
        std::vector<RecExpr> gs;
        gs.push_back(expr(path + ".g1"));
        while (peek(',')) {
          ++pos_;
          gs.push_back(expr(path + ".g" + std::to_string(gs.size() + 1)));
        }
        expect(')');
        return RecExpr::comp(std::move(f), std::move(gs), path);
      }
      case 'P': {
        expect('(');
        RecExpr f = expr(path + ".f");
        expect(',');
        RecExpr g = expr(path + ".g");
        expect(')');
        return RecExpr::primrec(std::move(f), std::move(g), path);
      }
      case 'M': {
        expect('(');
        RecExpr f = expr(path + ".f");
        expect(')');
        return RecExpr::min(std::move(f), path);
      }
      default:
        --pos_;
        fail("expression (Z, S, U, C, P or M)");
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Throws SyntaxError or ArityError.
inline RecExpr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluator

struct EvalResult {
  enum class Kind { Value, Diverged };
  Kind kind = Kind::Value;
  Nat value = 0;
  std::uint64_t fuel_spent = 0;

  bool has_value() const noexcept { return kind == Kind::Value; }

  static EvalResult of(Nat v, std::uint64_t spent) { return {Kind::Value, v, spent}; }
  static EvalResult diverged(std::uint64_t spent) { return {Kind::Diverged, 0, spent}; }

  friend bool operator==(const EvalResult&, const EvalResult&) = default;
};

namespace detail {

struct OutOfFuel {};

class Evaluator {
 public:
  explicit Evaluator(std::uint64_t fuel) : fuel_(fuel) {}

  std::uint64_t spent() const noexcept { return spent_; }

  Nat eval(const RecExpr& e, std::span<const Nat> args) {
    if (spent_ == fuel_) throw OutOfFuel{};
    ++spent_;
    return std::visit(
        [&](const auto& x) -> Nat {
          using T = std::decay_t<decltype(x)>;
          if constexpr (std::is_same_v<T, RecExpr::Zero>) {
            return 0;
          } else if constexpr (std::is_same_v<T, RecExpr::Succ>) {
            return checked_add(args[0], 1);
          } else if constexpr (std::is_same_v<T, RecExpr::Proj>) {
            return args[x.i - 1];
          } else if constexpr (std::is_same_v<T, RecExpr::Comp>) {
            std::vector<Nat> inner;
            inner.reserve(x.gs.size());
            for (const auto& g : x.gs) inner.push_back(eval(g, args));
            return eval(*x.f, inner);
          } else if constexpr (std::is_same_v<T, RecExpr::PrimRec>) {
            const std::size_t k = args.size() - 1;
            const Nat y = args[k];
            Nat acc = eval(*x.f, args.first(k));
            std::vector<Nat> gargs(args.begin(), args.begin() + static_cast<std::ptrdiff_t>(k));
            gargs.push_back(0);
            gargs.push_back(0);
            for (Nat m = 0; m < y; ++m) {
              gargs[k] = m;
              gargs[k + 1] = acc;
              acc = eval(*x.g, gargs);
            }
            return acc;
          } else {
            std::vector<Nat> fargs(args.begin(), args.end());
            fargs.push_back(0);
            for (Nat y = 0;; ++y) {
              fargs.back() = y;
              if (eval(*x.f, fargs) == 0) return y;
            }
          }
        },
        e.node());
  }

 private:
  std::uint64_t fuel_;
  std::uint64_t spent_ = 0;
};

}  // namespace detail

// Direct evaluation; every node visit costs one unit of fuel.
inline EvalResult eval(const RecExpr& e, std::span<const Nat> args, std::uint64_t fuel) {
  if (args.size() != e.arity()) throw ArityMismatch(e.arity(), args.size());
  detail::Evaluator ev(fuel);
  try {
    const Nat v = ev.eval(e, args);
    return EvalResult::of(v, ev.spent());
  } catch (const detail::OutOfFuel&) {
    return EvalResult::diverged(ev.spent());
  }
}

inline EvalResult eval(const RecExpr& e, std::initializer_list<Nat> args, std::uint64_t fuel) {
  return eval(e, std::span<const Nat>(args.begin(), args.size()), fuel);
}

}  // namespace memrec
