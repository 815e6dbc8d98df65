#include "hrl/corpus.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "hrl/errors.hpp"
#include "hrl/rng.hpp"

namespace hrl {

using nlohmann::json;

namespace {

json spec_aspect_to_json(const SyntheticSpec::Aspect& a) {
  json j;
  j["name"] = a.name;
  j["keywords"] = a.keywords;
  json sw = json::object();
  for (size_t r = 0; r < a.sentiment_words.size(); ++r) {
    sw[std::to_string(r + 1)] = a.sentiment_words[r];
  }
  j["sentiment_words"] = sw;
  return j;
}

}  // namespace

SyntheticSpec SyntheticSpec::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("synthetic spec: cannot open '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw FormatError("synthetic spec '" + path + "': " + e.what());
  }
  SyntheticSpec spec;
  try {
    spec.num_documents = j.at("num_documents").get<int>();
    spec.clauses_per_doc = {j.at("clauses_per_doc").at(0).get<int>(),
                            j.at("clauses_per_doc").at(1).get<int>()};
    spec.words_per_clause = {j.at("words_per_clause").at(0).get<int>(),
                             j.at("words_per_clause").at(1).get<int>()};
    spec.noise_clause_ratio = j.at("noise_clause_ratio").get<double>();
    spec.noise_word_ratio = j.at("noise_word_ratio").get<double>();
    spec.num_classes = j.at("num_classes").get<int>();
    spec.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("fillers")) spec.fillers = j.at("fillers").get<std::vector<std::string>>();
    for (const auto& ja : j.at("aspects")) {
      SyntheticSpec::Aspect a;
      a.name = ja.at("name").get<std::string>();
      a.keywords = ja.at("keywords").get<std::vector<std::string>>();
      a.sentiment_words.resize(static_cast<size_t>(spec.num_classes));
      for (int r = 1; r <= spec.num_classes; ++r) {
        a.sentiment_words[static_cast<size_t>(r - 1)] =
            ja.at("sentiment_words").at(std::to_string(r)).get<std::vector<std::string>>();
      }
      spec.aspects.push_back(std::move(a));
    }
  } catch (const json::exception& e) {
    throw FormatError("synthetic spec '" + path + "': " + e.what());
  }
  spec.validate();
  return spec;
}

std::string SyntheticSpec::to_json() const {
  json j;
  j["num_documents"] = num_documents;
  j["clauses_per_doc"] = {clauses_per_doc[0], clauses_per_doc[1]};
  j["words_per_clause"] = {words_per_clause[0], words_per_clause[1]};
  j["noise_clause_ratio"] = noise_clause_ratio;
  j["noise_word_ratio"] = noise_word_ratio;
  j["num_classes"] = num_classes;
  j["seed"] = seed;
  j["fillers"] = fillers;
  json as = json::array();
  for (const auto& a : aspects) as.push_back(spec_aspect_to_json(a));
  j["aspects"] = as;
  return j.dump(2);
}

void SyntheticSpec::validate() const {
  if (num_documents < 1) throw DomainError("synthetic spec: num_documents must be >= 1");
  if (clauses_per_doc[0] < 1 || clauses_per_doc[1] < clauses_per_doc[0]) {
    throw DomainError("synthetic spec: bad clauses_per_doc range");
  }
  if (words_per_clause[0] < 2 || words_per_clause[1] < words_per_clause[0]) {
    throw DomainError("synthetic spec: bad words_per_clause range (min 2)");
  }
  if (num_classes < 2) throw DomainError("synthetic spec: num_classes must be >= 2");
  if (aspects.empty()) throw DomainError("synthetic spec: at least one aspect required");
  for (const auto& a : aspects) {
    if (a.keywords.empty()) {
      throw DomainError("synthetic spec: aspect '" + a.name + "' has no keywords");
    }
    if (a.sentiment_words.size() != static_cast<size_t>(num_classes)) {
      throw DomainError("synthetic spec: aspect '" + a.name +
                        "' needs sentiment words for every rating level");
    }
    for (const auto& words : a.sentiment_words) {
      if (words.empty()) {
        throw DomainError("synthetic spec: aspect '" + a.name +
                          "' has a rating level with no sentiment words");
      }
    }
  }
}

namespace data {

std::vector<AspectInfo> load_aspects_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("aspects file: cannot open '" + path + "'");
  std::vector<AspectInfo> out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream is(line);
    AspectInfo info;
    if (!(is >> info.name)) continue;  // blank line
    std::string kw;
    while (is >> kw) info.keywords.push_back(kw);
    if (info.keywords.empty()) {
      throw FormatError("aspects file line " + std::to_string(lineno) + ": aspect '" +
                        info.name + "' lists no keywords");
    }
    out.push_back(std::move(info));
  }
  if (out.empty()) throw FormatError("aspects file '" + path + "': no aspects");
  return out;
}

std::vector<int> assign_splits(size_t count, std::uint64_t seed) {
  std::vector<size_t> order(count);
  std::iota(order.begin(), order.end(), size_t(0));
  Rng rng(mix_seed(seed ^ 0x73706c6974ULL));  // "split"
  for (size_t i = count; i > 1; --i) {
    const size_t j = static_cast<size_t>(rng.uniform_int(0, i - 1));
    std::swap(order[i - 1], order[j]);
  }
  const size_t n_dev = count / 10;
  const size_t n_test = count / 10;
  const size_t n_train = count - n_dev - n_test;
  std::vector<int> split(count, static_cast<int>(Split::kTrain));
  for (size_t i = 0; i < count; ++i) {
    if (i >= n_train && i < n_train + n_dev) split[order[i]] = static_cast<int>(Split::kDev);
    if (i >= n_train + n_dev) split[order[i]] = static_cast<int>(Split::kTest);
  }
  return split;
}

namespace {

std::vector<std::uint8_t> mask_from_json(const json& arr, const char* field, size_t lineno) {
  std::vector<std::uint8_t> mask;
  for (const auto& v : arr) {
    const int x = v.get<int>();
    if (x != 0 && x != 1) {
      throw FormatError("corpus line " + std::to_string(lineno) + ": field '" + field +
                        "' holds a value outside {0,1}");
    }
    mask.push_back(static_cast<std::uint8_t>(x));
  }
  return mask;
}

}  // namespace

Corpus load_corpus(const std::string& path, const Config& cfg, const Vocab* fixed_vocab) {
  std::ifstream in(path);
  if (!in) throw FormatError("corpus: cannot open '" + path + "'");

  Corpus corpus;
  if (fixed_vocab != nullptr) corpus.vocab = *fixed_vocab;
  const bool grow_vocab = fixed_vocab == nullptr;
  auto token_id = [&](const std::string& tok) {
    return grow_vocab ? corpus.vocab.add(tok) : corpus.vocab.id(tok);
  };

  const auto connectives = cfg.connective_list();
  std::string line;
  size_t lineno = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw FormatError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
    try {
      if (!header_seen) {
        if (!j.contains("header") || !j.at("header").get<bool>()) {
          throw FormatError("corpus line 1: expected the header record");
        }
        corpus.num_classes = j.at("num_classes").get<int>();
        const std::string aspects_file = j.at("aspects_file").get<std::string>();
        const auto dir = std::filesystem::path(path).parent_path();
        corpus.aspects = load_aspects_file((dir / aspects_file).string());
        for (const auto& a : corpus.aspects) {
          for (const auto& kw : a.keywords) token_id(kw);
        }
        header_seen = true;
        continue;
      }

      Document doc;
      doc.id = j.at("id").get<std::string>();
      if (j.contains("clauses")) {
        for (const auto& jc : j.at("clauses")) {
          Clause c;
          for (const auto& jt : jc) c.token_ids.push_back(token_id(jt.get<std::string>()));
          if (c.token_ids.empty()) {
            throw FormatError("corpus line " + std::to_string(lineno) +
                              ": field 'clauses' holds an empty clause");
          }
          doc.clauses.push_back(std::move(c));
        }
      } else if (j.contains("text")) {
        const auto tokens = segmentation::tokenize_spans(j.at("text").get<std::string>());
        if (tokens.empty()) {
          throw FormatError("corpus line " + std::to_string(lineno) +
                            ": field 'text' holds no tokens");
        }
        for (const auto& b : segmentation::split_clauses(tokens, connectives)) {
          Clause c;
          c.char_begin = tokens[b.token_begin].begin;
          c.char_end = tokens[b.token_end - 1].end;
          for (size_t t = b.token_begin; t < b.token_end; ++t) {
            c.token_ids.push_back(token_id(tokens[t].text));
          }
          doc.clauses.push_back(std::move(c));
        }
      } else {
        throw FormatError("corpus line " + std::to_string(lineno) +
                          ": document needs field 'clauses' or 'text'");
      }
      if (doc.clauses.empty()) {
        throw FormatError("corpus line " + std::to_string(lineno) + ": document has no clauses");
      }

      for (const auto& ja : j.at("aspects")) {
        AspectQuery q;
        const std::string name = ja.at("name").get<std::string>();
        q.aspect_index = corpus.aspect_index(name);
        if (q.aspect_index < 0) {
          throw FormatError("corpus line " + std::to_string(lineno) + ": unknown aspect '" +
                            name + "'");
        }
        q.rating = ja.at("rating").get<int>();
        if (q.rating < 1 || q.rating > corpus.num_classes) {
          throw FormatError("corpus line " + std::to_string(lineno) + ": rating " +
                            std::to_string(q.rating) + " outside [1, " +
                            std::to_string(corpus.num_classes) + "]");
        }
        doc.queries.push_back(q);
      }
      if (doc.queries.empty()) {
        throw FormatError("corpus line " + std::to_string(lineno) + ": document has no aspects");
      }

      if (j.contains("gold_clause_mask")) {
        doc.gold_clause_mask = mask_from_json(j.at("gold_clause_mask"), "gold_clause_mask", lineno);
        if (doc.gold_clause_mask.size() != doc.clauses.size()) {
          throw FormatError("corpus line " + std::to_string(lineno) +
                            ": gold_clause_mask length differs from the clause count");
        }
      }
      if (j.contains("gold_word_masks")) {
        for (const auto& jm : j.at("gold_word_masks")) {
          doc.gold_word_masks.push_back(mask_from_json(jm, "gold_word_masks", lineno));
        }
        if (doc.gold_word_masks.size() != doc.clauses.size()) {
          throw FormatError("corpus line " + std::to_string(lineno) +
                            ": gold_word_masks count differs from the clause count");
        }
        for (size_t i = 0; i < doc.clauses.size(); ++i) {
          if (doc.gold_word_masks[i].size() != doc.clauses[i].token_ids.size()) {
            throw FormatError("corpus line " + std::to_string(lineno) + ": gold_word_masks[" +
                              std::to_string(i) + "] length differs from the clause length");
          }
        }
      }
      corpus.docs.push_back(std::move(doc));
    } catch (const json::exception& e) {
      throw FormatError("corpus line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  if (!header_seen || corpus.docs.empty()) throw FormatError("corpus '" + path + "': empty corpus");
  corpus.split = assign_splits(corpus.docs.size(), cfg.seed);
  return corpus;
}

void save_corpus(const Corpus& corpus, const std::string& corpus_path,
                 const std::string& aspects_path) {
  {
    std::ofstream out(aspects_path);
    if (!out) throw FormatError("aspects file: cannot write '" + aspects_path + "'");
    for (const auto& a : corpus.aspects) {
      out << a.name;
      for (const auto& kw : a.keywords) out << ' ' << kw;
      out << '\n';
    }
  }
  std::ofstream out(corpus_path);
  if (!out) throw FormatError("corpus: cannot write '" + corpus_path + "'");
  json header;
  header["header"] = true;
  header["num_classes"] = corpus.num_classes;
  header["aspects_file"] =
      std::filesystem::path(aspects_path).filename().string();
  out << header.dump() << '\n';
  for (const auto& doc : corpus.docs) {
    json j;
    j["id"] = doc.id;
    json clauses = json::array();
    for (const auto& c : doc.clauses) {
      json tokens = json::array();
      for (int id : c.token_ids) tokens.push_back(corpus.vocab.token(id));
      clauses.push_back(tokens);
    }
    j["clauses"] = clauses;
    json aspects = json::array();
    for (const auto& q : doc.queries) {
      json a;
      a["name"] = corpus.aspects[static_cast<size_t>(q.aspect_index)].name;
      a["rating"] = q.rating;
      aspects.push_back(a);
    }
    j["aspects"] = aspects;
    if (!doc.gold_clause_mask.empty()) {
      j["gold_clause_mask"] = std::vector<int>(doc.gold_clause_mask.begin(),
                                               doc.gold_clause_mask.end());
    }
    if (!doc.gold_word_masks.empty()) {
      json masks = json::array();
      for (const auto& m : doc.gold_word_masks) {
        masks.push_back(std::vector<int>(m.begin(), m.end()));
      }
      j["gold_word_masks"] = masks;
    }
    out << j.dump() << '\n';
  }
}

SyntheticSpec default_spec(int num_documents, int num_aspects, int num_classes,
                           double noise_clause_ratio, double noise_word_ratio,
                           std::uint64_t seed) {
  static const char* kAspectNames[] = {"location", "room",    "service", "value",
                                       "food",     "cleanliness", "staff"};
  static const char* kTones[] = {"awful", "poor", "okay", "good", "superb",
                                 "dire",  "weak", "fair", "fine", "stellar"};
  SyntheticSpec spec;
  spec.num_documents = num_documents;
  spec.num_classes = num_classes;
  spec.noise_clause_ratio = noise_clause_ratio;
  spec.noise_word_ratio = noise_word_ratio;
  spec.seed = seed;
  spec.fillers = {"the", "a",  "it",    "was",  "is",   "we",   "they", "this",
                  "that", "of", "in",    "for",  "with", "on",   "at",   "there",
                  "here", "so", "quite", "just", "then", "also", "some", "one"};
  for (int ai = 0; ai < num_aspects; ++ai) {
    SyntheticSpec::Aspect a;
    a.name = ai < 7 ? kAspectNames[ai] : "aspect" + std::to_string(ai);
    a.keywords = {a.name, a.name + "s", a.name + "side"};
    a.sentiment_words.resize(static_cast<size_t>(num_classes));
    for (int r = 1; r <= num_classes; ++r) {
      const std::string tone = r <= 10 ? kTones[(r - 1) % 10] : "tone" + std::to_string(r);
      a.sentiment_words[static_cast<size_t>(r - 1)] = {tone + "_" + a.name,
                                                       tone + "ly_" + a.name};
    }
    spec.aspects.push_back(std::move(a));
  }
  return spec;
}

Corpus generate_synthetic(const SyntheticSpec& spec) {
  spec.validate();
  Rng rng(mix_seed(spec.seed ^ 0x73796e7468ULL));  // "synth"

  Corpus corpus;
  corpus.num_classes = spec.num_classes;
  for (const auto& a : spec.aspects) corpus.aspects.push_back({a.name, a.keywords});

  // Deterministic vocab: keywords, sentiment words, then fillers.
  for (const auto& a : spec.aspects) {
    for (const auto& kw : a.keywords) corpus.vocab.add(kw);
    for (const auto& level : a.sentiment_words) {
      for (const auto& w : level) corpus.vocab.add(w);
    }
  }
  std::vector<std::string> fillers = spec.fillers;
  if (fillers.empty()) fillers = {"the", "a", "it", "was", "of", "in"};
  for (const auto& f : fillers) corpus.vocab.add(f);

  const int num_aspects = static_cast<int>(spec.aspects.size());
  auto pick = [&rng](const std::vector<std::string>& v) -> const std::string& {
    return v[static_cast<size_t>(rng.uniform_int(0, v.size() - 1))];
  };

  for (int di = 0; di < spec.num_documents; ++di) {
    const int ai = di % num_aspects;  // balanced aspect coverage
    const auto& aspect = spec.aspects[static_cast<size_t>(ai)];
    const int rating = static_cast<int>(rng.uniform_int(1, spec.num_classes));

    const int n = static_cast<int>(
        rng.uniform_int(spec.clauses_per_doc[0], spec.clauses_per_doc[1]));
    int n_noise = static_cast<int>(std::lround(spec.noise_clause_ratio * n));
    if (n_noise >= n) n_noise = n - 1;  // at least one gold clause
    const int n_gold = n - n_noise;

    struct Built {
      std::vector<std::string> tokens;
      std::vector<std::uint8_t> word_mask;
      bool gold = false;
    };
    std::vector<Built> built;

    for (int g = 0; g < n_gold; ++g) {
      Built c;
      c.gold = true;
      const int len = static_cast<int>(
          rng.uniform_int(spec.words_per_clause[0], spec.words_per_clause[1]));
      const int n_fill = std::min(len - 2,
                                  static_cast<int>(std::lround(spec.noise_word_ratio * len)));
      const int n_rel = len - n_fill;  // >= 2: keyword + sentiment word
      c.tokens.push_back(pick(aspect.sentiment_words[static_cast<size_t>(rating - 1)]));
      for (int t = 1; t < n_rel; ++t) {
        c.tokens.push_back(aspect.keywords[static_cast<size_t>(t - 1) % aspect.keywords.size()]);
      }
      for (int t = 0; t < n_fill; ++t) c.tokens.push_back(pick(fillers));
      // Shuffle positions; the mask follows the sentiment word.
      std::vector<size_t> order(c.tokens.size());
      std::iota(order.begin(), order.end(), size_t(0));
      for (size_t i = order.size(); i > 1; --i) {
        std::swap(order[i - 1], order[static_cast<size_t>(rng.uniform_int(0, i - 1))]);
      }
      std::vector<std::string> shuffled(c.tokens.size());
      c.word_mask.assign(c.tokens.size(), 0);
      for (size_t i = 0; i < order.size(); ++i) {
        shuffled[i] = c.tokens[order[i]];
        if (order[i] == 0) c.word_mask[i] = 1;  // token 0 is the sentiment word
      }
      c.tokens = std::move(shuffled);
      built.push_back(std::move(c));
    }

    for (int x = 0; x < n_noise; ++x) {
      Built c;
      const int len = static_cast<int>(
          rng.uniform_int(spec.words_per_clause[0], spec.words_per_clause[1]));
      c.word_mask.assign(static_cast<size_t>(len), 0);
      const bool other_aspect = num_aspects > 1 && rng.bernoulli(0.7);
      if (other_aspect) {
        int oi = static_cast<int>(rng.uniform_int(0, num_aspects - 2));
        if (oi >= ai) ++oi;
        const auto& other = spec.aspects[static_cast<size_t>(oi)];
        c.tokens.push_back(pick(other.keywords));
      } else {
        c.tokens.push_back(pick(fillers));
      }
      while (static_cast<int>(c.tokens.size()) < len) c.tokens.push_back(pick(fillers));
      built.push_back(std::move(c));
    }

    // Shuffle clause order.
    for (size_t i = built.size(); i > 1; --i) {
      std::swap(built[i - 1], built[static_cast<size_t>(rng.uniform_int(0, i - 1))]);
    }

    Document doc;
    doc.id = "syn-" + std::to_string(di);
    for (auto& b : built) {
      Clause clause;
      for (const auto& tok : b.tokens) clause.token_ids.push_back(corpus.vocab.add(tok));
      doc.clauses.push_back(std::move(clause));
      doc.gold_clause_mask.push_back(b.gold ? 1 : 0);
      doc.gold_word_masks.push_back(std::move(b.word_mask));
    }
    doc.queries.push_back({ai, rating});
    corpus.docs.push_back(std::move(doc));
  }

  corpus.split = assign_splits(corpus.docs.size(), spec.seed);
  return corpus;
}

}  // namespace data
}  // namespace hrl
