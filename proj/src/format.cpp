#include "topdown/format.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <vector>

#include "topdown/error.hpp"

namespace topdown {

namespace {

struct Token {
  enum class Kind { Name, LParen, RParen, Comma, Arrow, Slash, Colon };
  Kind kind;
  std::string text;
  std::size_t column;
};

bool name_char(char c) {
  const auto u = static_cast<unsigned char>(c);
  return u >= 0x80 || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '\'' || c == '.' || c == '$';
}

std::vector<Token> tokenize(std::string_view line, std::size_t line_number) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    const char c = line[i];
    const std::size_t column = i + 1;
    if (c == ' ' || c == '\t') {
      ++i;
    } else if (c == '#') {
      break;
    } else if (name_char(c)) {
      std::size_t j = i;
      while (j < line.size() && name_char(line[j])) ++j;
      tokens.push_back({Token::Kind::Name, std::string(line.substr(i, j - i)), column});
      i = j;
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      tokens.push_back({Token::Kind::Arrow, "->", column});
      i += 2;
    } else {
      Token::Kind kind;
      switch (c) {
        case '(': kind = Token::Kind::LParen; break;
        case ')': kind = Token::Kind::RParen; break;
        case ',': kind = Token::Kind::Comma; break;
        case '/': kind = Token::Kind::Slash; break;
        case ':': kind = Token::Kind::Colon; break;
        default: throw ParseError(std::string("unexpected character '") + c + "'", line_number, column);
      }
      tokens.push_back({kind, std::string(1, c), column});
      ++i;
    }
  }
  return tokens;
}

struct Line {
  std::size_t number;
  std::vector<Token> tokens;
  std::size_t end_column;
};

struct Section {
  std::size_t line;
  std::vector<Line> lines;
};

class DbaParser {
 public:
  explicit DbaParser(std::string_view text) { split(text); }

  Dba parse() {
    const Section& alphabet_section = require("alphabet");
    RankedAlphabet alphabet = parse_alphabet(alphabet_section);
    Dba::Builder builder(alphabet);
    for (const auto& [name, column, line] : names_in(require("states"))) {
      if (builder.find_state(name)) throw ParseError("duplicate state '" + name + "'", line, column);
      if (name == kHole) throw ParseError("state name 'x' is reserved", line, column);
      builder.add_state(name);
    }
    for (const auto& [name, column, line] : names_in(require("final"))) {
      builder.set_final(state(builder, name, line, column));
      final_names_.push_back(name);
    }
    if (auto it = sections_.find("trap"); it != sections_.end()) {
      const auto names = names_in(it->second);
      if (names.size() != 1) throw ParseError("'trap:' names exactly one state", it->second.line, 1);
      const auto& [name, column, line] = names.front();
      const StateId trap = state(builder, name, line, column);
      if (std::count(final_names_.begin(), final_names_.end(), name) != 0) {
        throw ParseError("trap state '" + name + "' must not be final", line, column);
      }
      builder.set_trap(trap);
      trap_ = trap;
    }
    for (const Line& line : require("trans").lines) parse_transition(builder, alphabet, line);
    try {
      return builder.build();
    } catch (const ModelError& e) {
      throw ParseError(e.what(), 0, 0);
    }
  }

 private:
  struct Named {
    std::string name;
    std::size_t column;
    std::size_t line;
  };

  void split(std::string_view text) {
    if (text.substr(0, 3) == "\xEF\xBB\xBF") text.remove_prefix(3);
    Section* current = nullptr;
    std::size_t number = 0;
    while (!text.empty()) {
      ++number;
      const std::size_t newline = text.find('\n');
      std::string_view raw = text.substr(0, newline);
      text.remove_prefix(newline == std::string_view::npos ? text.size() : newline + 1);
      if (!raw.empty() && raw.back() == '\r') raw.remove_suffix(1);
      std::vector<Token> tokens = tokenize(raw, number);
      if (tokens.empty()) continue;
      if (tokens.size() >= 2 && tokens[0].kind == Token::Kind::Name && tokens[1].kind == Token::Kind::Colon) {
        static const char* const known[] = {"alphabet", "states", "final", "trap", "trans"};
        if (std::find(std::begin(known), std::end(known), tokens[0].text) == std::end(known)) {
          throw ParseError("unknown section '" + tokens[0].text + "'", number, tokens[0].column);
        }
        auto [it, inserted] = sections_.emplace(tokens[0].text, Section{number, {}});
        if (!inserted) throw ParseError("duplicate section '" + tokens[0].text + "'", number, tokens[0].column);
        current = &it->second;
        tokens.erase(tokens.begin(), tokens.begin() + 2);
        if (tokens.empty()) continue;
      }
      if (!current) throw ParseError("content before the first section header", number, tokens[0].column);
      current->lines.push_back({number, std::move(tokens), raw.size() + 1});
    }
  }

  const Section& require(const std::string& name) {
    auto it = sections_.find(name);
    if (it == sections_.end()) throw ParseError("missing section '" + name + ":'", 0, 0);
    return it->second;
  }

  RankedAlphabet parse_alphabet(const Section& section) {
    RankedAlphabet alphabet;
    for (const Line& line : section.lines) {
      const auto& t = line.tokens;
      std::size_t i = 0;
      while (i < t.size()) {
        if (t[i].kind == Token::Kind::Comma) {
          ++i;
          continue;
        }
        if (i + 2 >= t.size() || t[i].kind != Token::Kind::Name || t[i + 1].kind != Token::Kind::Slash ||
            t[i + 2].kind != Token::Kind::Name) {
          throw ParseError("expected symbol/arity", line.number, t[i].column);
        }
        int arity = -1;
        const std::string& digits = t[i + 2].text;
        if (!digits.empty() && digits.size() <= 6 && std::all_of(digits.begin(), digits.end(), [](char c) { return c >= '0' && c <= '9'; })) {
          arity = std::stoi(digits);
        }
        if (arity < 0) throw ParseError("invalid arity '" + digits + "'", line.number, t[i + 2].column);
        try {
          alphabet.add(t[i].text, arity);
        } catch (const ModelError& e) {
          throw ParseError(e.what(), line.number, t[i].column);
        }
        i += 3;
      }
    }
    return alphabet;
  }

  static std::vector<Named> names_in(const Section& section) {
    std::vector<Named> out;
    for (const Line& line : section.lines) {
      for (const Token& token : line.tokens) {
        if (token.kind == Token::Kind::Comma) continue;
        if (token.kind != Token::Kind::Name) {
          throw ParseError("expected a state name, got '" + token.text + "'", line.number, token.column);
        }
        out.push_back({token.text, token.column, line.number});
      }
    }
    return out;
  }

  static StateId state(const Dba::Builder& builder, const std::string& name, std::size_t line, std::size_t column) {
    auto id = builder.find_state(name);
    if (!id) throw ParseError("undeclared state '" + name + "'", line, column);
    return *id;
  }

  void parse_transition(Dba::Builder& builder, const RankedAlphabet& alphabet, const Line& line) {
    const auto& t = line.tokens;
    std::size_t i = 0;
    const auto expect = [&](Token::Kind kind, const char* what) -> const Token& {
      if (i >= t.size()) throw ParseError(std::string("expected ") + what, line.number, line.end_column);
      if (t[i].kind != kind) {
        throw ParseError(std::string("expected ") + what + ", got '" + t[i].text + "'", line.number, t[i].column);
      }
      return t[i++];
    };

    const Token& symbol = expect(Token::Kind::Name, "a symbol");
    auto arity = alphabet.arity(symbol.text);
    if (!arity) throw ParseError("undeclared symbol '" + symbol.text + "'", line.number, symbol.column);
    StateTuple args;
    if (i < t.size() && t[i].kind == Token::Kind::LParen) {
      ++i;
      for (;;) {
        const Token& arg = expect(Token::Kind::Name, "a state");
        args.push_back(checked_state(builder, arg, line.number));
        if (i < t.size() && t[i].kind == Token::Kind::Comma) {
          ++i;
          continue;
        }
        expect(Token::Kind::RParen, "',' or ')'");
        break;
      }
    }
    if (args.size() != static_cast<std::size_t>(*arity)) {
      throw ParseError("symbol '" + symbol.text + "' has arity " + std::to_string(*arity) + " but " +
                           std::to_string(args.size()) + " arguments were given",
                       line.number, symbol.column);
    }
    expect(Token::Kind::Arrow, "'->'");
    const Token& target_token = expect(Token::Kind::Name, "a target state");
    const StateId target = checked_state(builder, target_token, line.number);
    if (i != t.size()) throw ParseError("unexpected '" + t[i].text + "' after transition", line.number, t[i].column);
    try {
      builder.add_transition(symbol.text, std::move(args), target);
    } catch (const ModelError& e) {
      throw ParseError(e.what(), line.number, symbol.column);
    }
  }

  StateId checked_state(const Dba::Builder& builder, const Token& token, std::size_t line) const {
    const StateId id = state(builder, token.text, line, token.column);
    if (trap_ && *trap_ == id) {
      throw ParseError("trap state '" + token.text + "' must not occur in explicit transitions", line, token.column);
    }
    return id;
  }

  std::map<std::string, Section> sections_;
  std::vector<std::string> final_names_;
  std::optional<StateId> trap_;
};

std::string join_names(std::span<const std::string> names) {
  std::string out;
  for (const auto& name : names) out += " " + name;
  return out;
}

std::string alphabet_line(const RankedAlphabet& alphabet) {
  std::string out = "alphabet:";
  for (const auto& [name, arity] : alphabet.symbols()) out += " " + name + "/" + std::to_string(arity);
  return out + "\n";
}

}  // namespace

Dba parse_dba(std::string_view text) { return DbaParser(text).parse(); }

std::string render_dba(const Dba& automaton) {
  std::ostringstream out;
  out << alphabet_line(automaton.alphabet());
  out << "states:" << join_names(automaton.state_names()) << "\n";
  out << "final:";
  for (StateId q : automaton.finals()) out << " " << automaton.state_name(q);
  out << "\n";
  if (automaton.trap()) out << "trap: " << automaton.state_name(*automaton.trap()) << "\n";
  out << "trans:\n";
  for (const Transition& t : automaton.transitions()) {
    out << automaton.symbol_name(t.symbol);
    if (!t.args.empty()) {
      out << "(";
      for (std::size_t i = 0; i < t.args.size(); ++i) out << (i ? "," : "") << automaton.state_name(t.args[i]);
      out << ")";
    }
    out << " -> " << automaton.state_name(t.target) << "\n";
  }
  return out.str();
}

std::string render_dta(const Dta& automaton) {
  std::ostringstream out;
  out << alphabet_line(automaton.alphabet());
  out << "states:" << join_names(automaton.state_names()) << "\n";
  out << "initial: " << automaton.state_name(automaton.initial()) << "\n";
  out << "trans:\n";
  for (const DtaEntry& entry : automaton.entries()) {
    out << automaton.state_name(entry.source) << " --" << automaton.symbol_name(entry.symbol) << "-->";
    if (entry.targets.empty()) out << " .";
    for (StateId target : entry.targets) out << " " << automaton.state_name(target);
    out << "\n";
  }
  return out.str();
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

Dba load_dba(const std::filesystem::path& path) {
  try {
    return parse_dba(read_file(path));
  } catch (const ParseError& e) {
    throw e.from(path.string());
  }
}

}  // namespace topdown
