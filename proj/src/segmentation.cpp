#include "hrl/segmentation.hpp"

#include <algorithm>
#include <cctype>

#include "hrl/errors.hpp"

namespace hrl::segmentation {

namespace {

// Decodes one UTF-8 codepoint starting at `i`; advances `i` past it.
// Malformed bytes decode as themselves (latin-1 style) so nothing is lost.
char32_t next_codepoint(const std::string& s, size_t& i) {
  const unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    ++i;
    return c;
  }
  size_t len = (c >= 0xF0) ? 4 : (c >= 0xE0) ? 3 : (c >= 0xC0) ? 2 : 1;
  if (i + len > s.size()) len = 1;
  char32_t cp = 0;
  switch (len) {
    case 2: cp = c & 0x1F; break;
    case 3: cp = c & 0x0F; break;
    case 4: cp = c & 0x07; break;
    default:
      ++i;
      return c;
  }
  for (size_t k = 1; k < len; ++k) {
    const unsigned char cc = static_cast<unsigned char>(s[i + k]);
    if ((cc & 0xC0) != 0x80) {
      ++i;
      return c;
    }
    cp = (cp << 6) | (cc & 0x3F);
  }
  i += len;
  return cp;
}

bool is_cjk_punct(char32_t cp) {
  switch (cp) {
    case U'。':  // 。
    case U'！':  // ！
    case U'？':  // ？
    case U'，':  // ，
    case U'；':  // ；
    case U'、':  // 、
    case U'：':  // ：
      return true;
    default:
      return false;
  }
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return std::isalnum(static_cast<int>(cp)) != 0;
  }
  return !is_cjk_punct(cp);
}

bool is_terminator(const std::string& tok) {
  return tok == "." || tok == "!" || tok == "?" || tok == "。" || tok == "！" ||
         tok == "？";
}

bool is_pause(const std::string& tok) {
  return tok == "," || tok == ";" || tok == "，" || tok == "；" || tok == "、";
}

bool is_punct_token(const std::string& tok) {
  size_t i = 0;
  const char32_t cp = next_codepoint(tok, i);
  return i >= tok.size() && !is_word_char(cp);
}

}  // namespace

std::vector<Token> tokenize_spans(const std::string& text) {
  std::vector<Token> out;
  size_t i = 0;
  while (i < text.size()) {
    const size_t start = i;
    const char32_t cp = next_codepoint(text, i);
    if (cp < 0x80 && std::isspace(static_cast<int>(cp))) continue;
    if (!is_word_char(cp)) {
      out.push_back({text.substr(start, i - start), start, i});
      continue;
    }
    // Consume a run of word characters.
    size_t end = i;
    while (end < text.size()) {
      size_t probe = end;
      const char32_t nc = next_codepoint(text, probe);
      if (nc < 0x80 && std::isspace(static_cast<int>(nc))) break;
      if (!is_word_char(nc)) break;
      end = probe;
    }
    std::string tok = text.substr(start, end - start);
    for (char& c : tok) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    out.push_back({std::move(tok), start, end});
    i = end;
  }
  return out;
}

std::vector<std::string> tokenize(const std::string& text) {
  std::vector<std::string> out;
  for (auto& t : tokenize_spans(text)) out.push_back(std::move(t.text));
  return out;
}

std::vector<ClauseBoundary> split_clauses(const std::vector<Token>& tokens,
                                          const std::vector<std::string>& connectives) {
  std::vector<ClauseBoundary> clauses;
  auto is_connective = [&](const std::string& tok) {
    return std::find(connectives.begin(), connectives.end(), tok) != connectives.end();
  };

  size_t begin = 0;
  size_t words = 0;
  for (size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i].text;
    if (is_connective(tok) && words >= 2) {
      clauses.push_back({begin, i});
      begin = i;
      words = 0;
    }
    if (!is_punct_token(tok)) ++words;
    if (is_terminator(tok) || (is_pause(tok) && words >= 2)) {
      clauses.push_back({begin, i + 1});
      begin = i + 1;
      words = 0;
    }
  }
  if (begin < tokens.size()) clauses.push_back({begin, tokens.size()});

  // Clauses below two tokens merge left (the first merges right).
  std::vector<ClauseBoundary> merged;
  for (const auto& c : clauses) {
    if (c.token_end - c.token_begin < 2 && !merged.empty()) {
      merged.back().token_end = c.token_end;
    } else {
      merged.push_back(c);
    }
  }
  if (merged.size() >= 2 && merged.front().token_end - merged.front().token_begin < 2) {
    merged[1].token_begin = merged.front().token_begin;
    merged.erase(merged.begin());
  }
  return merged;
}

std::vector<std::vector<std::string>> split_clauses_text(
    const std::string& text, const std::vector<std::string>& connectives) {
  const auto tokens = tokenize_spans(text);
  if (tokens.empty()) throw DomainError("split_clauses: input holds no tokens");
  const auto bounds = split_clauses(tokens, connectives);
  std::vector<std::vector<std::string>> out;
  out.reserve(bounds.size());
  for (const auto& b : bounds) {
    std::vector<std::string> clause;
    clause.reserve(b.token_end - b.token_begin);
    for (size_t i = b.token_begin; i < b.token_end; ++i) clause.push_back(tokens[i].text);
    out.push_back(std::move(clause));
  }
  return out;
}

std::vector<std::string> default_connectives() {
  return {"but", "and", "although", "while", "because"};
}

}  // namespace hrl::segmentation
