#include "gptwalk/textio.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace gptwalk {

bool TextNode::has(const std::string& k) const { return find(k) != nullptr; }

const TextNode* TextNode::find(const std::string& k) const {
  for (const auto& c : children)
    if (c.key == k) return &c;
  return nullptr;
}

const TextNode& TextNode::child(const std::string& k) const {
  const TextNode* c = find(k);
  if (!c)
    throw ParseError("line " + std::to_string(line) + ": missing entry '" + k +
                     "' in block '" + key + "'");
  return *c;
}

std::vector<const TextNode*> TextNode::all(const std::string& k) const {
  std::vector<const TextNode*> out;
  for (const auto& c : children)
    if (c.key == k) out.push_back(&c);
  return out;
}

Scalar TextNode::num(int i) const {
  if (i >= static_cast<int>(args.size()))
    throw ParseError("line " + std::to_string(line) + ": entry '" + key +
                     "' needs at least " + std::to_string(i + 1) + " values");
  char* end = nullptr;
  const std::string& s = args[i];
  Scalar v = std::strtod(s.c_str(), &end);
  if (end == s.c_str() || *end != '\0')
    throw ParseError("line " + std::to_string(line) + ": '" + s +
                     "' is not a number");
  return v;
}

const std::string& TextNode::str(int i) const {
  if (i >= static_cast<int>(args.size()))
    throw ParseError("line " + std::to_string(line) + ": entry '" + key +
                     "' needs at least " + std::to_string(i + 1) + " values");
  return args[i];
}

VecX TextNode::vec() const {
  VecX v(args.size());
  for (int i = 0; i < v.size(); ++i) v(i) = num(i);
  return v;
}

Scalar TextNode::get_num(const std::string& k) const { return child(k).num(); }

Scalar TextNode::get_num(const std::string& k, Scalar dflt) const {
  const TextNode* c = find(k);
  return c ? c->num() : dflt;
}

std::string TextNode::get_str(const std::string& k) const {
  return child(k).str();
}

std::string TextNode::get_str(const std::string& k,
                              const std::string& dflt) const {
  const TextNode* c = find(k);
  return c ? c->str() : dflt;
}

TextNode parse_text(const std::string& content, const std::string& origin) {
  TextNode root;
  root.key = origin;
  std::vector<TextNode*> stack{&root};
  std::istringstream in(content);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> toks;
    std::string t;
    while (ls >> t) toks.push_back(t);
    if (toks.empty()) continue;
    if (toks.size() == 1 && toks[0] == "}") {
      if (stack.size() < 2)
        throw ParseError(origin + ":" + std::to_string(lineno) +
                         ": unmatched '}'");
      stack.pop_back();
      continue;
    }
    bool opens = toks.back() == "{";
    if (opens) toks.pop_back();
    if (toks.empty())
      throw ParseError(origin + ":" + std::to_string(lineno) +
                       ": block needs a name");
    TextNode node;
    node.key = toks[0];
    node.args.assign(toks.begin() + 1, toks.end());
    node.line = lineno;
    stack.back()->children.push_back(std::move(node));
    if (opens) stack.push_back(&stack.back()->children.back());
  }
  if (stack.size() != 1)
    throw ParseError(origin + ": unterminated block '" + stack.back()->key +
                     "' opened at line " + std::to_string(stack.back()->line));
  return root;
}

TextNode load_text_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_text(ss.str(), path);
}

std::string fmt_num(Scalar v) {
  if (v == 0.0) v = 0.0;  // normalize -0
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  // Trim to the shortest representation that round-trips.
  for (int prec = 1; prec < 17; ++prec) {
    char shorter[40];
    std::snprintf(shorter, sizeof(shorter), "%.*g", prec, v);
    if (std::strtod(shorter, nullptr) == v) return shorter;
  }
  return buf;
}

static void write_node(std::ostream& os, const TextNode& n, int depth) {
  for (int i = 0; i < depth; ++i) os << "  ";
  os << n.key;
  for (const auto& a : n.args) os << ' ' << a;
  if (!n.children.empty()) {
    os << " {\n";
    for (const auto& c : n.children) write_node(os, c, depth + 1);
    for (int i = 0; i < depth; ++i) os << "  ";
    os << "}";
  }
  os << "\n";
}

std::string format_text(const TextNode& root) {
  std::ostringstream os;
  for (const auto& c : root.children) write_node(os, c, 0);
  return os.str();
}

void save_text_file(const std::string& path, const TextNode& root) {
  std::ofstream f(path);
  if (!f) throw Error("cannot write file: " + path);
  f << format_text(root);
}

}  // namespace gptwalk
