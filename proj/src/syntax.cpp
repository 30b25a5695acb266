#include "treelogic/syntax.hpp"

#include <cctype>
#include <optional>
#include <sstream>
#include <vector>

namespace treelogic {

namespace {

enum class Tok {
  Ident,
  LParen,
  RParen,
  LBrace,
  RBrace,
  Comma,
  Semi,
  Dot,
  Assign,  // :=
  Equal,
  Bang,
  ExBang,  // "ex!"
  Amp,
  Pipe,
  Arrow,   // ->
  DArrow,  // <->
  At,
  End,
};

struct Token {
  Tok kind;
  std::string text;
  SourceSpan span;
};

class Lexer {
 public:
  explicit Lexer(std::string_view text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }

  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(msg, tok_.span);
  }

 private:
  void advance() {
    skip_space();
    std::size_t begin = pos_;
    int line = line_, col = col_;
    auto span = [&]() {
      return SourceSpan{begin, pos_, line, col};
    };
    auto emit = [&](Tok k, std::string text) {
      tok_ = Token{k, std::move(text), span()};
    };
    if (pos_ >= text_.size()) return emit(Tok::End, "");
    char c = text_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < text_.size() &&
             (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
              text_[pos_] == '_'))
        bump();
      std::string word(text_.substr(start, pos_ - start));
      if (word == "ex" && pos_ < text_.size() && text_[pos_] == '!') {
        bump();
        return emit(Tok::ExBang, "ex!");
      }
      return emit(Tok::Ident, std::move(word));
    }
    switch (c) {
      case '(': bump(); return emit(Tok::LParen, "(");
      case ')': bump(); return emit(Tok::RParen, ")");
      case '{': bump(); return emit(Tok::LBrace, "{");
      case '}': bump(); return emit(Tok::RBrace, "}");
      case ',': bump(); return emit(Tok::Comma, ",");
      case ';': bump(); return emit(Tok::Semi, ";");
      case '.': bump(); return emit(Tok::Dot, ".");
      case '@': bump(); return emit(Tok::At, "@");
      case '=': bump(); return emit(Tok::Equal, "=");
      case '!': bump(); return emit(Tok::Bang, "!");
      case '&': bump(); return emit(Tok::Amp, "&");
      case '|': bump(); return emit(Tok::Pipe, "|");
      case ':':
        bump();
        if (pos_ < text_.size() && text_[pos_] == '=') {
          bump();
          return emit(Tok::Assign, ":=");
        }
        throw ParseError("expected ':='", span());
      case '-':
        bump();
        if (pos_ < text_.size() && text_[pos_] == '>') {
          bump();
          return emit(Tok::Arrow, "->");
        }
        throw ParseError("expected '->'", span());
      case '<':
        bump();
        if (pos_ + 1 < text_.size() && text_[pos_] == '-' &&
            text_[pos_ + 1] == '>') {
          bump();
          bump();
          return emit(Tok::DArrow, "<->");
        }
        throw ParseError("expected '<->'", span());
      default:
        throw ParseError(std::string("unexpected character '") + c + "'",
                         span());
    }
  }

  void skip_space() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        break;
      }
    }
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_{Tok::End, "", {}};
};

bool lower_start(const std::string& s) {
  return !s.empty() && std::islower(static_cast<unsigned char>(s[0]));
}
bool upper_start(const std::string& s) {
  return !s.empty() && std::isupper(static_cast<unsigned char>(s[0]));
}

class FormulaParser {
 public:
  FormulaParser(Lexer& lex, const Theory& theory,
                const std::map<std::string, Sort>& free)
      : lex_(lex), theory_(theory) {
    for (const auto& [name, sort] : free) scope_.emplace_back(name, sort);
  }

  FormulaPtr parse() { return parse_iff(); }

 private:
  Token expect(Tok k, const std::string& what) {
    if (lex_.peek().kind != k) lex_.fail("expected " + what);
    return lex_.take();
  }

  std::optional<Sort> lookup(const std::string& name) const {
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it)
      if (it->first == name) return it->second;
    return std::nullopt;
  }

  FormulaPtr parse_iff() {
    FormulaPtr f = parse_implies();
    while (lex_.peek().kind == Tok::DArrow) {
      lex_.take();
      f = Formula::iff(f, parse_implies());
    }
    return f;
  }

  FormulaPtr parse_implies() {
    FormulaPtr f = parse_or();
    if (lex_.peek().kind == Tok::Arrow) {
      lex_.take();
      return Formula::implies(f, parse_implies());
    }
    return f;
  }

  FormulaPtr parse_or() {
    FormulaPtr f = parse_and();
    while (lex_.peek().kind == Tok::Pipe) {
      lex_.take();
      f = Formula::disj(f, parse_and());
    }
    return f;
  }

  FormulaPtr parse_and() {
    FormulaPtr f = parse_unary();
    while (lex_.peek().kind == Tok::Amp) {
      lex_.take();
      f = Formula::conj(f, parse_unary());
    }
    return f;
  }

  FormulaPtr parse_unary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Bang) {
      lex_.take();
      return Formula::negate(parse_unary());
    }
    if (t.kind == Tok::ExBang) {
      lex_.take();
      return parse_quantifier(FormulaKind::ExistsUnique);
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "all") {
        lex_.take();
        return parse_quantifier(FormulaKind::ForallNode);
      }
      if (t.text == "ex") {
        lex_.take();
        return parse_quantifier(FormulaKind::ExistsNode);
      }
      if (t.text == "All") {
        lex_.take();
        return parse_quantifier(FormulaKind::ForallSet);
      }
      if (t.text == "Ex") {
        lex_.take();
        return parse_quantifier(FormulaKind::ExistsSet);
      }
    }
    return parse_primary();
  }

  FormulaPtr parse_quantifier(FormulaKind kind) {
    Token var = expect(Tok::Ident, "a variable");
    bool node_sorted = kind != FormulaKind::ExistsSet &&
                       kind != FormulaKind::ForallSet;
    if (node_sorted && !lower_start(var.text))
      throw ParseError("node variables start with a lowercase letter",
                       var.span);
    if (!node_sorted && !upper_start(var.text))
      throw ParseError("set variables start with an uppercase letter",
                       var.span);
    expect(Tok::Dot, "'.'");
    scope_.emplace_back(var.text, node_sorted ? Sort::Node : Sort::Set);
    FormulaPtr body = parse_iff();
    scope_.pop_back();
    switch (kind) {
      case FormulaKind::ForallNode: return Formula::forall_node(var.text, body);
      case FormulaKind::ExistsNode: return Formula::exists_node(var.text, body);
      case FormulaKind::ExistsUnique:
        return Formula::exists_unique(var.text, body);
      case FormulaKind::ForallSet: return Formula::forall_set(var.text, body);
      case FormulaKind::ExistsSet: return Formula::exists_set(var.text, body);
      default: break;
    }
    lex_.fail("bad quantifier");
  }

  NodeTerm resolve_term(const Token& t) {
    if (auto sort = lookup(t.text)) {
      if (*sort != Sort::Node)
        throw ParseError("set variable '" + t.text +
                          "' used where a node term is expected",
                         t.span);
      return NodeTerm::var(t.text);
    }
    if (theory_.has_constant(t.text)) return NodeTerm::constant(t.text);
    throw ParseError("unknown name: " + t.text, t.span);
  }

  FormulaPtr parse_primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::LParen) {
      lex_.take();
      FormulaPtr f = parse_iff();
      expect(Tok::RParen, "')'");
      return f;
    }
    if (t.kind != Tok::Ident) lex_.fail("expected a formula");
    Token head = lex_.take();
    if (head.text == "idom" || head.text == "dom" || head.text == "prec") {
      expect(Tok::LParen, "'('");
      NodeTerm a = resolve_term(expect(Tok::Ident, "a node term"));
      expect(Tok::Comma, "','");
      NodeTerm b = resolve_term(expect(Tok::Ident, "a node term"));
      expect(Tok::RParen, "')'");
      if (head.text == "idom") return Formula::idom(a, b);
      if (head.text == "dom") return Formula::dom(a, b);
      return Formula::prec(a, b);
    }
    if (lex_.peek().kind == Tok::LParen) return parse_application(head);
    // Bare identifier: must be the left side of an equality atom.
    NodeTerm a = resolve_term(head);
    expect(Tok::Equal, "'='");
    NodeTerm b = resolve_term(expect(Tok::Ident, "a node term"));
    return Formula::eq(a, b);
  }

  FormulaPtr parse_application(const Token& head) {
    expect(Tok::LParen, "'('");
    std::vector<Token> raw;
    if (lex_.peek().kind != Tok::RParen) {
      raw.push_back(expect(Tok::Ident, "an argument"));
      while (lex_.peek().kind == Tok::Comma) {
        lex_.take();
        raw.push_back(expect(Tok::Ident, "an argument"));
      }
    }
    expect(Tok::RParen, "')'");

    auto in_scope_set = lookup(head.text) == Sort::Set;
    if (in_scope_set) {
      if (raw.size() != 1)
        throw ParseError("set membership takes one node term", head.span);
      return Formula::in_set(head.text, resolve_term(raw[0]));
    }
    if (theory_.has_label(head.text)) {
      if (raw.size() != 1)
        throw ParseError("label atom takes one node term", head.span);
      return Formula::has_label(head.text, resolve_term(raw[0]));
    }
    if (const Definition* def = theory_.find_definition(head.text)) {
      if (def->params.size() != raw.size())
        throw ParseError("predicate " + head.text + " expects " +
                             std::to_string(def->params.size()) +
                             " arguments",
                         head.span);
      std::vector<ApplyArg> args;
      for (std::size_t i = 0; i < raw.size(); ++i) {
        if (def->params[i].second == Sort::Set) {
          if (auto sort = lookup(raw[i].text)) {
            if (*sort != Sort::Set)
              throw ParseError("node variable '" + raw[i].text +
                                   "' used where a set variable is expected",
                               raw[i].span);
          } else if (!upper_start(raw[i].text)) {
            throw ParseError("unknown name: " + raw[i].text, raw[i].span);
          } else {
            throw ParseError("unbound set variable: " + raw[i].text,
                             raw[i].span);
          }
          args.emplace_back(SetVar{raw[i].text});
        } else {
          args.emplace_back(resolve_term(raw[i]));
        }
      }
      return Formula::apply(head.text, std::move(args));
    }
    throw ParseError("unknown name: " + head.text, head.span);
  }

  Lexer& lex_;
  const Theory& theory_;
  std::vector<std::pair<std::string, Sort>> scope_;
};

LabeledTree parse_tree_node(Lexer& lex) {
  std::vector<GornAddress> domain;
  std::map<GornAddress, LabeledTree::LabelSet> labels;
  std::map<std::string, GornAddress> constants;

  auto expect = [&](Tok k, const std::string& what) {
    if (lex.peek().kind != k) lex.fail("expected " + what);
    return lex.take();
  };

  auto rec = [&](auto&& self, const GornAddress& addr) -> void {
    expect(Tok::LParen, "'('");
    expect(Tok::LBrace, "'{'");
    LabeledTree::LabelSet set;
    if (lex.peek().kind == Tok::Ident) {
      set.insert(lex.take().text);
      while (lex.peek().kind == Tok::Comma) {
        lex.take();
        set.insert(expect(Tok::Ident, "a label").text);
      }
    }
    expect(Tok::RBrace, "'}'");
    while (lex.peek().kind == Tok::At) {
      lex.take();
      Token name = expect(Tok::Ident, "a constant name");
      if (constants.count(name.text))
        throw ParseError("duplicate constant binding: " + name.text,
                         name.span);
      constants[name.text] = addr;
    }
    domain.push_back(addr);
    if (!set.empty()) labels[addr] = std::move(set);
    uint32_t child = 0;
    while (lex.peek().kind == Tok::LParen) {
      self(self, addr.child(child));
      ++child;
    }
    expect(Tok::RParen, "')'");
  };
  rec(rec, GornAddress::root());
  if (lex.peek().kind != Tok::End) lex.fail("trailing input after tree");
  return LabeledTree(std::move(domain), std::move(labels),
                     std::move(constants));
}

// Precedence levels used by both parser and printer; quantifiers bind
// loosest and swallow everything to their right.
int level_of(const FormulaPtr& f) {
  switch (f->kind) {
    case FormulaKind::Iff: return 1;
    case FormulaKind::Implies: return 2;
    case FormulaKind::Or: return 3;
    case FormulaKind::And: return 4;
    case FormulaKind::Not: return 5;
    default: return f->is_quantifier() ? 0 : 6;
  }
}

void print_rec(const FormulaPtr& f, int min_level, bool rightmost,
               std::string& out) {
  auto term = [](const NodeTerm& t) { return t.name; };
  int lvl = level_of(f);
  bool parens = f->is_quantifier() ? !rightmost : lvl < min_level;
  if (parens) out += '(';
  bool inner_right = rightmost || parens;
  switch (f->kind) {
    case FormulaKind::Idom:
      out += "idom(" + term(f->t1) + "," + term(f->t2) + ")";
      break;
    case FormulaKind::Dom:
      out += "dom(" + term(f->t1) + "," + term(f->t2) + ")";
      break;
    case FormulaKind::Prec:
      out += "prec(" + term(f->t1) + "," + term(f->t2) + ")";
      break;
    case FormulaKind::Eq:
      out += term(f->t1) + " = " + term(f->t2);
      break;
    case FormulaKind::HasLabel:
    case FormulaKind::InSet:
      out += f->name + "(" + term(f->t1) + ")";
      break;
    case FormulaKind::Apply: {
      out += f->name + "(";
      for (std::size_t i = 0; i < f->args.size(); ++i) {
        if (i) out += ",";
        if (const NodeTerm* t = std::get_if<NodeTerm>(&f->args[i]))
          out += t->name;
        else
          out += std::get<SetVar>(f->args[i]).name;
      }
      out += ")";
      break;
    }
    case FormulaKind::Not:
      out += "!";
      print_rec(f->f1, 5, inner_right, out);
      break;
    case FormulaKind::And:
      print_rec(f->f1, 4, false, out);
      out += " & ";
      print_rec(f->f2, 5, inner_right, out);
      break;
    case FormulaKind::Or:
      print_rec(f->f1, 3, false, out);
      out += " | ";
      print_rec(f->f2, 4, inner_right, out);
      break;
    case FormulaKind::Implies:
      print_rec(f->f1, 3, false, out);
      out += " -> ";
      print_rec(f->f2, 2, inner_right, out);
      break;
    case FormulaKind::Iff:
      print_rec(f->f1, 1, false, out);
      out += " <-> ";
      print_rec(f->f2, 2, inner_right, out);
      break;
    case FormulaKind::ExistsNode:
      out += "ex " + f->name + ". ";
      print_rec(f->f1, 0, true, out);
      break;
    case FormulaKind::ForallNode:
      out += "all " + f->name + ". ";
      print_rec(f->f1, 0, true, out);
      break;
    case FormulaKind::ExistsUnique:
      out += "ex! " + f->name + ". ";
      print_rec(f->f1, 0, true, out);
      break;
    case FormulaKind::ExistsSet:
      out += "Ex " + f->name + ". ";
      print_rec(f->f1, 0, true, out);
      break;
    case FormulaKind::ForallSet:
      out += "All " + f->name + ". ";
      print_rec(f->f1, 0, true, out);
      break;
  }
  if (parens) out += ')';
}

}  // namespace

Theory parse_theory(std::string_view text) {
  Lexer lex(text);
  Theory theory;
  while (lex.peek().kind != Tok::End) {
    Token head = lex.peek();
    if (head.kind != Tok::Ident) lex.fail("expected a declaration");
    if (head.text == "label" || head.text == "const") {
      lex.take();
      Token name = lex.take();
      if (name.kind != Tok::Ident)
        throw ParseError("expected a name", name.span);
      if (theory.has_label(name.text) || theory.has_constant(name.text) ||
          theory.find_definition(name.text))
        throw ParseError("redeclaration of " + name.text, name.span);
      if (lex.peek().kind != Tok::Semi) lex.fail("expected ';'");
      lex.take();
      if (head.text == "label")
        theory.add_label(name.text);
      else
        theory.add_constant(name.text);
    } else if (head.text == "def") {
      lex.take();
      Token name = lex.take();
      if (name.kind != Tok::Ident)
        throw ParseError("expected a name", name.span);
      if (theory.has_label(name.text) || theory.has_constant(name.text) ||
          theory.find_definition(name.text))
        throw ParseError("redeclaration of " + name.text, name.span);
      if (lex.peek().kind != Tok::LParen) lex.fail("expected '('");
      lex.take();
      Definition def;
      def.name = name.text;
      if (lex.peek().kind != Tok::RParen) {
        while (true) {
          Token p = lex.take();
          if (p.kind != Tok::Ident)
            throw ParseError("expected a parameter", p.span);
          Sort sort = upper_start(p.text) ? Sort::Set : Sort::Node;
          for (const auto& [q, s] : def.params)
            if (q == p.text)
              throw ParseError("duplicate parameter " + p.text, p.span);
          def.params.emplace_back(p.text, sort);
          if (lex.peek().kind == Tok::Comma) {
            lex.take();
            continue;
          }
          break;
        }
      }
      if (lex.peek().kind != Tok::RParen) lex.fail("expected ')'");
      lex.take();
      if (lex.peek().kind != Tok::Assign) lex.fail("expected ':='");
      lex.take();
      std::map<std::string, Sort> params;
      for (const auto& [q, s] : def.params) params[q] = s;
      FormulaParser fp(lex, theory, params);
      def.body = fp.parse();
      if (lex.peek().kind != Tok::Semi) lex.fail("expected ';'");
      lex.take();
      theory.add_definition(std::move(def));
    } else if (head.text == "axiom") {
      lex.take();
      FormulaParser fp(lex, theory, {});
      theory.add_axiom(fp.parse());
      if (lex.peek().kind != Tok::Semi) lex.fail("expected ';'");
      lex.take();
    } else {
      lex.fail("expected 'label', 'const', 'def', or 'axiom'");
    }
  }
  return theory;
}

FormulaPtr parse_formula(std::string_view text, const Theory& theory,
                         const std::map<std::string, Sort>& free) {
  Lexer lex(text);
  FormulaParser fp(lex, theory, free);
  FormulaPtr f = fp.parse();
  if (lex.peek().kind != Tok::End) lex.fail("trailing input after formula");
  return f;
}

LabeledTree parse_tree(std::string_view text) {
  Lexer lex(text);
  return parse_tree_node(lex);
}

std::string print_formula(const FormulaPtr& f) {
  std::string out;
  print_rec(f, 0, true, out);
  return out;
}

std::string print_theory(const Theory& theory) {
  std::string out;
  for (const std::string& l : theory.labels()) out += "label " + l + ";\n";
  for (const std::string& c : theory.constant_names())
    out += "const " + c + ";\n";
  for (const Definition& d : theory.definitions()) {
    out += "def " + d.name + "(";
    for (std::size_t i = 0; i < d.params.size(); ++i) {
      if (i) out += ",";
      out += d.params[i].first;
    }
    out += ") := " + print_formula(d.body) + ";\n";
  }
  for (const FormulaPtr& ax : theory.axioms())
    out += "axiom " + print_formula(ax) + ";\n";
  return out;
}

namespace {

void print_tree_rec(const LabeledTree& tree, std::size_t node,
                    std::string& out) {
  out += "({";
  const auto& labels = tree.labels_at(node);
  bool first = true;
  for (const std::string& l : labels) {
    if (!first) out += ",";
    first = false;
    out += l;
  }
  out += "}";
  for (const auto& [name, addr] : tree.constants()) {
    if (addr == tree.node(node)) out += "@" + name;
  }
  for (std::size_t child : tree.children_of(node)) {
    out += " ";
    print_tree_rec(tree, child, out);
  }
  out += ")";
}

}  // namespace

std::string print_tree(const LabeledTree& tree) {
  std::string out;
  print_tree_rec(tree, 0, out);
  return out;
}

}  // namespace treelogic
