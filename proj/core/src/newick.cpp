#include "rootrecon/newick.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace rootrecon {

namespace {

class Newick_parser {
 public:
  explicit Newick_parser(std::string_view text) : text_{text} {}

  auto parse() -> Tree {
    nodes_.clear();
    subtree(no_vertex);
    skip_space();
    expect(';');
    skip_space();
    if (pos_ != text_.size()) {
      fail("trailing characters after ';'");
    }
    return Tree{std::move(nodes_)};
  }

 private:
  // Returns the index of the parsed vertex.
  auto subtree(Vertex parent) -> Vertex {
    auto self = static_cast<Vertex>(nodes_.size());
    nodes_.push_back({"", parent, 0.0});
    skip_space();
    if (peek() == '(') {
      ++pos_;
      do {
        subtree(self);
        skip_space();
      } while (consume(','));
      expect(')');
    }
    skip_space();
    nodes_[self].name = label();
    skip_space();
    if (consume(':')) {
      nodes_[self].length = number();
    } else if (parent != no_vertex) {
      fail("missing branch length for '" + nodes_[self].name + "'");
    }
    return self;
  }

  auto label() -> std::string {
    if (peek() == '\'') {
      ++pos_;
      auto out = std::string{};
      while (true) {
        if (pos_ >= text_.size()) {
          fail("unterminated quoted label");
        }
        auto c = text_[pos_++];
        if (c == '\'') {
          if (peek() == '\'') {
            out += '\'';
            ++pos_;
            continue;
          }
          return out;
        }
        out += c;
      }
    }
    auto start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) {
      ++pos_;
    }
    return std::string{text_.substr(start, pos_ - start)};
  }

  auto number() -> double {
    skip_space();
    auto start = pos_;
    while (pos_ < text_.size() && !is_delimiter(text_[pos_])) {
      ++pos_;
    }
    auto token = std::string{text_.substr(start, pos_ - start)};
    auto value = 0.0;
    auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
      fail("bad branch length '" + token + "'");
    }
    return value;
  }

  static auto is_delimiter(char c) -> bool {
    return c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || std::isspace(static_cast<unsigned char>(c));
  }

  auto peek() const -> char { return pos_ < text_.size() ? text_[pos_] : '\0'; }

  auto consume(char c) -> bool {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!consume(c)) {
      fail(std::string{"expected '"} + c + "'");
    }
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("newick: " + what + " at offset " + std::to_string(pos_));
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::vector<Node_spec> nodes_;
};

auto quote_if_needed(const std::string& name) -> std::string {
  auto plain = !name.empty();
  for (auto c : name) {
    if (c == '(' || c == ')' || c == ',' || c == ':' || c == ';' || c == '\'' ||
        std::isspace(static_cast<unsigned char>(c))) {
      plain = false;
    }
  }
  if (plain || name.empty()) {
    return name;
  }
  auto out = std::string{"'"};
  for (auto c : name) {
    out += c;
    if (c == '\'') {
      out += '\'';
    }
  }
  return out + "'";
}

void write_subtree(const Tree& tree, Vertex v, std::string& out) {
  auto kids = tree.children(v);
  if (!kids.empty()) {
    out += '(';
    for (auto i = std::size_t{0}; i < kids.size(); ++i) {
      if (i > 0) {
        out += ',';
      }
      write_subtree(tree, kids[i], out);
    }
    out += ')';
  }
  out += quote_if_needed(tree.name(v));
  if (v != tree.root()) {
    char buf[32];
    std::snprintf(buf, sizeof buf, ":%.17g", tree.edge_length(v));
    out += buf;
  }
}

}  // namespace

auto parse_newick(std::string_view text) -> Tree { return Newick_parser{text}.parse(); }

auto to_newick(const Tree& tree) -> std::string {
  auto out = std::string{};
  write_subtree(tree, tree.root(), out);
  out += ';';
  return out;
}

auto read_family_file(const std::string& path) -> Nested_family {
  auto in = std::ifstream{path};
  if (!in) {
    throw std::runtime_error("cannot open family file '" + path + "'");
  }
  auto family = Nested_family{};
  auto line = std::string{};
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') {
      continue;
    }
    family.push_back(parse_newick(line));
  }
  return family;
}

auto read_newick_file(const std::string& path) -> Tree {
  auto in = std::ifstream{path};
  if (!in) {
    throw std::runtime_error("cannot open tree file '" + path + "'");
  }
  auto buffer = std::stringstream{};
  buffer << in.rdbuf();
  return parse_newick(buffer.str());
}

}  // namespace rootrecon
