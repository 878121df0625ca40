#ifndef GPTWALK_TEXTIO_HPP
#define GPTWALK_TEXTIO_HPP

#include <string>
#include <vector>

#include "gptwalk/types.hpp"

namespace gptwalk {

// Line-based structured text: "key tok1 tok2 ..." entries, "#" comments,
// nested blocks opened by a trailing "{" and closed by "}".
struct TextNode {
  std::string key;
  std::vector<std::string> args;
  std::vector<TextNode> children;
  int line = 0;

  bool has(const std::string& k) const;
  const TextNode& child(const std::string& k) const;  // throws ParseError
  const TextNode* find(const std::string& k) const;
  std::vector<const TextNode*> all(const std::string& k) const;

  Scalar num(int i = 0) const;
  const std::string& str(int i = 0) const;
  VecX vec() const;  // all args as numbers

  // Scalar/string lookups on a child entry, with defaults.
  Scalar get_num(const std::string& k) const;
  Scalar get_num(const std::string& k, Scalar dflt) const;
  std::string get_str(const std::string& k) const;
  std::string get_str(const std::string& k, const std::string& dflt) const;
};

TextNode parse_text(const std::string& content, const std::string& origin);
TextNode load_text_file(const std::string& path);
std::string format_text(const TextNode& root);
void save_text_file(const std::string& path, const TextNode& root);

// Deterministic numeric formatting used by all writers (%.17g, with
// "-0" normalized and integral values kept compact).
std::string fmt_num(Scalar v);

}  // namespace gptwalk

#endif
