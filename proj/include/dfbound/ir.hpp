#pragma once

// Textual mini-IR: one statement per CFG node, explicit edges.
//
//   program  NAME
//   vars     NAME ("," NAME)*
//   node     INT STMT          STMT := NAME "=" RHS | "print" NAME | "skip"
//   edge     INT "->" INT      RHS  := INT | NAME | OPND OP OPND | "read()"
//   entry    INT               (optional, defaults to the lowest node id)
//   exit     INT               (optional, repeatable; defaults to nodes
//                               without successors)
//
// '#' starts a comment that runs to end of line.

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dfbound {

using node_id = std::uint32_t;

struct const_assign {
  std::string target;
  std::int64_t value = 0;
  bool operator==(const const_assign&) const = default;
};

struct copy_assign {
  std::string target;
  std::string source;
  bool operator==(const copy_assign&) const = default;
};

enum class binary_op { add, sub, mul };

// A variable name or an integer literal.
using operand = std::variant<std::string, std::int64_t>;

struct binary_assign {
  std::string target;
  operand left;
  binary_op op = binary_op::add;
  operand right;
  bool operator==(const binary_assign&) const = default;
};

struct read_assign {
  std::string target;
  bool operator==(const read_assign&) const = default;
};

struct print_stmt {
  std::string source;
  bool operator==(const print_stmt&) const = default;
};

struct skip_stmt {
  bool operator==(const skip_stmt&) const = default;
};

using statement = std::variant<const_assign, copy_assign, binary_assign,
                               read_assign, print_stmt, skip_stmt>;

struct edge {
  node_id from = 0;
  node_id to = 0;
  auto operator<=>(const edge&) const = default;
};

struct program {
  std::string name;
  std::vector<std::string> variables;
  std::map<node_id, statement> nodes;
  std::vector<edge> edges;
  node_id entry = 0;
  std::set<node_id> exits;

  bool operator==(const program&) const = default;
};

inline char op_symbol(binary_op op) {
  switch (op) {
    case binary_op::add: return '+';
    case binary_op::sub: return '-';
    case binary_op::mul: return '*';
  }
  return '?';
}

// Two's-complement wrap-around evaluation.
inline std::int64_t evaluate(binary_op op, std::int64_t a, std::int64_t b) {
  const auto ua = static_cast<std::uint64_t>(a);
  const auto ub = static_cast<std::uint64_t>(b);
  std::uint64_t r = 0;
  switch (op) {
    case binary_op::add: r = ua + ub; break;
    case binary_op::sub: r = ua - ub; break;
    case binary_op::mul: r = ua * ub; break;
  }
  return static_cast<std::int64_t>(r);
}

inline std::string to_string(const operand& o) {
  if (const auto* name = std::get_if<std::string>(&o)) return *name;
  return std::to_string(std::get<std::int64_t>(o));
}

inline std::string to_string(const statement& s) {
  struct visitor {
    std::string operator()(const const_assign& a) const {
      return a.target + " = " + std::to_string(a.value);
    }
    std::string operator()(const copy_assign& a) const {
      return a.target + " = " + a.source;
    }
    std::string operator()(const binary_assign& a) const {
      return a.target + " = " + to_string(a.left) + " " + op_symbol(a.op) + " " +
             to_string(a.right);
    }
    std::string operator()(const read_assign& a) const {
      return a.target + " = read()";
    }
    std::string operator()(const print_stmt& p) const {
      return "print " + p.source;
    }
    std::string operator()(const skip_stmt&) const { return "skip"; }
  };
  return std::visit(visitor{}, s);
}

inline std::optional<std::string> defined_variable(const statement& s) {
  if (const auto* a = std::get_if<const_assign>(&s)) return a->target;
  if (const auto* a = std::get_if<copy_assign>(&s)) return a->target;
  if (const auto* a = std::get_if<binary_assign>(&s)) return a->target;
  if (const auto* a = std::get_if<read_assign>(&s)) return a->target;
  return std::nullopt;
}

// Variables read by the statement, without duplicates, in operand order.
inline std::vector<std::string> used_variables(const statement& s) {
  std::vector<std::string> out;
  auto add = [&out](const std::string& v) {
    if (std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  if (const auto* a = std::get_if<copy_assign>(&s)) add(a->source);
  if (const auto* a = std::get_if<binary_assign>(&s)) {
    if (const auto* v = std::get_if<std::string>(&a->left)) add(*v);
    if (const auto* v = std::get_if<std::string>(&a->right)) add(*v);
  }
  if (const auto* p = std::get_if<print_stmt>(&s)) add(p->source);
  return out;
}

// Variables whose value flows into the assigned target (excludes print).
inline std::vector<std::string> rhs_variables(const statement& s) {
  if (std::holds_alternative<print_stmt>(s)) return {};
  return used_variables(s);
}

class parse_error : public std::runtime_error {
 public:
  enum class kind {
    syntax,
    undeclared_variable,
    duplicate_node,
    unknown_operator,
    literal_out_of_range,
  };

  parse_error(kind k, std::size_t line, std::size_t column,
              const std::string& message)
      : std::runtime_error("line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ": " + message),
        kind_(k),
        line_(line),
        column_(column) {}

  kind error_kind() const noexcept { return kind_; }
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  kind kind_;
  std::size_t line_;
  std::size_t column_;
};

namespace detail {

struct token {
  enum class type { name, integer, symbol };
  type kind;
  std::string text;
  std::size_t column;  // 1-based
};

inline bool is_name_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_name_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}
inline bool is_digit(char c) {
  return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

// A '-' directly followed by a digit is a negative literal when it cannot be
// a binary operator (start of line, after '=' or after another operator).
inline std::vector<token> tokenize(std::string_view line, std::size_t line_no) {
  std::vector<token> out;
  std::size_t i = 0;
  auto minus_is_sign = [&out]() {
    if (out.empty()) return true;
    const auto& prev = out.back();
    return prev.kind == token::type::symbol && prev.text != ")";
  };
  while (i < line.size()) {
    const char c = line[i];
    if (c == '#') break;
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (is_name_start(c)) {
      while (i < line.size() && is_name_char(line[i])) ++i;
      out.push_back({token::type::name, std::string(line.substr(start, i - start)), start + 1});
    } else if (is_digit(c) ||
               (c == '-' && i + 1 < line.size() && is_digit(line[i + 1]) && minus_is_sign())) {
      ++i;
      while (i < line.size() && is_digit(line[i])) ++i;
      if (i < line.size() && is_name_char(line[i]))
        throw parse_error(parse_error::kind::syntax, line_no, start + 1,
                          "malformed integer literal");
      out.push_back({token::type::integer, std::string(line.substr(start, i - start)), start + 1});
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      i += 2;
      out.push_back({token::type::symbol, "->", start + 1});
    } else if (std::string_view("=,+-*()/%&|^<>!~").find(c) != std::string_view::npos) {
      ++i;
      out.push_back({token::type::symbol, std::string(1, c), start + 1});
    } else {
      throw parse_error(parse_error::kind::syntax, line_no, start + 1,
                        std::string("unexpected character '") + c + "'");
    }
  }
  return out;
}

struct variable_use {
  std::string name;
  std::size_t line;
  std::size_t column;
};

class line_parser {
 public:
  line_parser(std::vector<token> tokens, std::size_t line_no)
      : tokens_(std::move(tokens)), line_(line_no) {}

  bool at_end() const { return pos_ >= tokens_.size(); }

  const token& peek() const {
    if (at_end()) fail_here("unexpected end of line");
    return tokens_[pos_];
  }

  bool peek_is(token::type t, std::string_view text = {}) const {
    if (at_end()) return false;
    const auto& tok = tokens_[pos_];
    return tok.kind == t && (text.empty() || tok.text == text);
  }

  token expect(token::type t, std::string_view what) {
    if (at_end()) fail_here("expected " + std::string(what) + " at end of line");
    const auto& tok = tokens_[pos_];
    if (tok.kind != t) fail(tok, "expected " + std::string(what) + ", found '" + tok.text + "'");
    ++pos_;
    return tok;
  }

  void expect_symbol(std::string_view sym) {
    if (at_end()) fail_here("expected '" + std::string(sym) + "' at end of line");
    const auto& tok = tokens_[pos_];
    if (tok.kind != token::type::symbol || tok.text != sym)
      fail(tok, "expected '" + std::string(sym) + "', found '" + tok.text + "'");
    ++pos_;
  }

  void expect_end() const {
    if (!at_end()) fail(tokens_[pos_], "unexpected trailing '" + tokens_[pos_].text + "'");
  }

  std::int64_t integer(const token& tok) const {
    std::int64_t value = 0;
    const auto* first = tok.text.data();
    const auto* last = first + tok.text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec == std::errc::result_out_of_range)
      throw parse_error(parse_error::kind::literal_out_of_range, line_, tok.column,
                        "integer literal '" + tok.text + "' does not fit in 64 bits");
    if (ec != std::errc() || ptr != last) fail(tok, "malformed integer '" + tok.text + "'");
    return value;
  }

  node_id node_number(const token& tok) const {
    const std::int64_t v = integer(tok);
    if (v <= 0 || v > std::int64_t{0xFFFFFFFF})
      fail(tok, "node ids must be positive 32-bit integers");
    return static_cast<node_id>(v);
  }

  operand parse_operand(std::vector<variable_use>& uses) {
    const auto& tok = peek();
    if (tok.kind == token::type::integer) {
      ++pos_;
      return integer(tok);
    }
    if (tok.kind == token::type::name) {
      ++pos_;
      uses.push_back({tok.text, line_, tok.column});
      return tok.text;
    }
    fail(tok, "expected variable or integer, found '" + tok.text + "'");
  }

  statement parse_statement(std::vector<variable_use>& uses) {
    const token head = expect(token::type::name, "statement");
    const bool assignment = peek_is(token::type::symbol, "=");
    if (!assignment && head.text == "skip") {
      expect_end();
      return skip_stmt{};
    }
    if (!assignment && head.text == "print") {
      const token v = expect(token::type::name, "variable");
      uses.push_back({v.text, line_, v.column});
      expect_end();
      return print_stmt{v.text};
    }
    expect_symbol("=");
    uses.push_back({head.text, line_, head.column});
    const std::string& target = head.text;

    if (peek_is(token::type::name, "read") && pos_ + 1 < tokens_.size() &&
        tokens_[pos_ + 1].kind == token::type::symbol && tokens_[pos_ + 1].text == "(") {
      pos_ += 2;
      expect_symbol(")");
      expect_end();
      return read_assign{target};
    }

    operand left = parse_operand(uses);
    if (at_end()) {
      if (const auto* v = std::get_if<std::string>(&left)) return copy_assign{target, *v};
      return const_assign{target, std::get<std::int64_t>(left)};
    }
    const token op_tok = peek();
    if (op_tok.kind != token::type::symbol)
      fail(op_tok, "expected operator, found '" + op_tok.text + "'");
    binary_op op;
    if (op_tok.text == "+") op = binary_op::add;
    else if (op_tok.text == "-") op = binary_op::sub;
    else if (op_tok.text == "*") op = binary_op::mul;
    else
      throw parse_error(parse_error::kind::unknown_operator, line_, op_tok.column,
                        "unknown operator '" + op_tok.text + "'");
    ++pos_;
    operand right = parse_operand(uses);
    expect_end();
    return binary_assign{target, std::move(left), op, std::move(right)};
  }

  [[noreturn]] void fail(const token& tok, const std::string& msg) const {
    throw parse_error(parse_error::kind::syntax, line_, tok.column, msg);
  }
  [[noreturn]] void fail_here(const std::string& msg) const {
    const std::size_t col =
        tokens_.empty() ? 1 : tokens_.back().column + tokens_.back().text.size();
    throw parse_error(parse_error::kind::syntax, line_, col, msg);
  }

 private:
  std::vector<token> tokens_;
  std::size_t pos_ = 0;
  std::size_t line_;
};

}  // namespace detail

inline program parse_program(std::string_view text) {
  using detail::token;
  program p;
  bool have_header = false;
  std::optional<node_id> declared_entry;
  std::set<node_id> declared_exits;
  std::vector<detail::variable_use> uses;
  std::set<std::string> declared;

  std::size_t line_no = 0;
  std::size_t begin = 0;
  while (begin <= text.size()) {
    std::size_t end = text.find('\n', begin);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(begin, end - begin);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    begin = end + 1;

    auto tokens = detail::tokenize(line, line_no);
    if (tokens.empty()) {
      if (end == text.size()) break;
      continue;
    }
    detail::line_parser lp(std::move(tokens), line_no);
    const token kw = lp.expect(token::type::name, "keyword");

    if (kw.text == "program") {
      if (have_header) lp.fail(kw, "duplicate program header");
      p.name = lp.expect(token::type::name, "program name").text;
      lp.expect_end();
      have_header = true;
    } else if (kw.text == "vars") {
      while (true) {
        const token v = lp.expect(token::type::name, "variable name");
        if (!declared.insert(v.text).second) lp.fail(v, "variable '" + v.text + "' declared twice");
        p.variables.push_back(v.text);
        if (lp.at_end()) break;
        lp.expect_symbol(",");
      }
    } else if (kw.text == "node") {
      const token id_tok = lp.expect(token::type::integer, "node id");
      const node_id id = lp.node_number(id_tok);
      statement s = lp.parse_statement(uses);
      if (!p.nodes.emplace(id, std::move(s)).second)
        throw parse_error(parse_error::kind::duplicate_node, line_no, id_tok.column,
                          "duplicate node id " + std::to_string(id));
    } else if (kw.text == "edge") {
      const node_id from = lp.node_number(lp.expect(token::type::integer, "source node"));
      lp.expect_symbol("->");
      const node_id to = lp.node_number(lp.expect(token::type::integer, "target node"));
      lp.expect_end();
      p.edges.push_back({from, to});
    } else if (kw.text == "entry") {
      const token t = lp.expect(token::type::integer, "entry node");
      if (declared_entry) lp.fail(t, "entry declared twice");
      declared_entry = lp.node_number(t);
      lp.expect_end();
    } else if (kw.text == "exit") {
      declared_exits.insert(lp.node_number(lp.expect(token::type::integer, "exit node")));
      lp.expect_end();
    } else {
      lp.fail(kw, "unknown directive '" + kw.text + "'");
    }
    if (end == text.size()) break;
  }

  if (!have_header)
    throw parse_error(parse_error::kind::syntax, 1, 1, "missing 'program' header");
  for (const auto& u : uses) {
    if (!declared.count(u.name))
      throw parse_error(parse_error::kind::undeclared_variable, u.line, u.column,
                        "undeclared variable '" + u.name + "'");
  }

  if (declared_entry) p.entry = *declared_entry;
  else if (!p.nodes.empty()) p.entry = p.nodes.begin()->first;

  if (!declared_exits.empty()) {
    p.exits = std::move(declared_exits);
  } else {
    std::set<node_id> has_succ;
    for (const auto& e : p.edges) has_succ.insert(e.from);
    for (const auto& [id, s] : p.nodes)
      if (!has_succ.count(id)) p.exits.insert(id);
  }
  return p;
}

// Exits are always written explicitly unless they coincide with the default,
// so parse_program(serialize_program(p)) == p.
inline std::string serialize_program(const program& p) {
  std::ostringstream os;
  os << "program " << p.name << "\n";
  if (!p.variables.empty()) {
    os << "vars ";
    for (std::size_t i = 0; i < p.variables.size(); ++i) os << (i ? ", " : "") << p.variables[i];
    os << "\n";
  }
  for (const auto& [id, s] : p.nodes) os << "node " << id << "  " << to_string(s) << "\n";
  for (const auto& e : p.edges) os << "edge " << e.from << " -> " << e.to << "\n";
  const bool default_entry = !p.nodes.empty() && p.entry == p.nodes.begin()->first;
  if (!default_entry) os << "entry " << p.entry << "\n";

  std::set<node_id> has_succ;
  for (const auto& e : p.edges) has_succ.insert(e.from);
  std::set<node_id> default_exits;
  for (const auto& [id, s] : p.nodes)
    if (!has_succ.count(id)) default_exits.insert(id);
  if (p.exits != default_exits)
    for (node_id x : p.exits) os << "exit " << x << "\n";
  return os.str();
}

struct diagnostic {
  enum class kind {
    empty_program,
    invalid_node_id,
    undefined_node_in_edge,
    duplicate_edge,
    undefined_entry,
    undefined_exit,
    unreachable_node,
    undeclared_variable,
    duplicate_variable,
  };
  kind what;
  std::string detail;  // node id or variable name

  bool operator==(const diagnostic&) const = default;

  std::string to_string() const {
    const char* label = "";
    switch (what) {
      case kind::empty_program: label = "empty-program"; break;
      case kind::invalid_node_id: label = "invalid-node-id"; break;
      case kind::undefined_node_in_edge: label = "undefined-node-in-edge"; break;
      case kind::duplicate_edge: label = "duplicate-edge"; break;
      case kind::undefined_entry: label = "undefined-entry"; break;
      case kind::undefined_exit: label = "undefined-exit"; break;
      case kind::unreachable_node: label = "unreachable-node"; break;
      case kind::undeclared_variable: label = "undeclared-variable"; break;
      case kind::duplicate_variable: label = "duplicate-variable"; break;
    }
    return std::string(label) + "(" + detail + ")";
  }
};

inline std::vector<diagnostic> validate_program(const program& p) {
  using K = diagnostic::kind;
  std::vector<diagnostic> out;
  if (p.nodes.empty()) {
    out.push_back({K::empty_program, p.name});
    return out;
  }

  std::set<std::string> vars;
  for (const auto& v : p.variables)
    if (!vars.insert(v).second) out.push_back({K::duplicate_variable, v});

  if (p.nodes.count(0)) out.push_back({K::invalid_node_id, "0"});

  for (const auto& [id, s] : p.nodes) {
    std::vector<std::string> mentioned = used_variables(s);
    if (auto d = defined_variable(s)) mentioned.push_back(*d);
    for (const auto& v : mentioned)
      if (!vars.count(v)) out.push_back({K::undeclared_variable, v + "@" + std::to_string(id)});
  }

  std::set<edge> seen;
  std::map<node_id, std::vector<node_id>> succ;
  for (const auto& e : p.edges) {
    bool ok = true;
    for (node_id end : {e.from, e.to}) {
      if (!p.nodes.count(end)) {
        out.push_back({K::undefined_node_in_edge, std::to_string(end)});
        ok = false;
        if (e.from == e.to) break;
      }
    }
    if (!seen.insert(e).second) {
      out.push_back({K::duplicate_edge, std::to_string(e.from) + "->" + std::to_string(e.to)});
      continue;
    }
    if (ok) succ[e.from].push_back(e.to);
  }

  if (!p.nodes.count(p.entry)) {
    out.push_back({K::undefined_entry, std::to_string(p.entry)});
  } else {
    std::set<node_id> reached{p.entry};
    std::vector<node_id> stack{p.entry};
    while (!stack.empty()) {
      const node_id n = stack.back();
      stack.pop_back();
      for (node_id s : succ[n])
        if (reached.insert(s).second) stack.push_back(s);
    }
    for (const auto& [id, s] : p.nodes)
      if (!reached.count(id)) out.push_back({K::unreachable_node, std::to_string(id)});
  }
  for (node_id x : p.exits)
    if (!p.nodes.count(x)) out.push_back({K::undefined_exit, std::to_string(x)});
  return out;
}

}  // namespace dfbound
