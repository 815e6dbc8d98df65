#include <doctest.h>

#include "hrl/errors.hpp"
#include "hrl/segmentation.hpp"

using namespace hrl;
using namespace hrl::segmentation;

TEST_CASE("tokenize") {
  CHECK(tokenize("Very Convenient") == std::vector<std::string>{"very", "convenient"});
  CHECK(tokenize("don't") == std::vector<std::string>{"don", "'", "t"});
  CHECK(tokenize("").empty());
  CHECK(tokenize("  \t\n ").empty());
  CHECK(tokenize("a,b") == std::vector<std::string>{"a", ",", "b"});
  CHECK(tokenize("Hello!") == std::vector<std::string>{"hello", "!"});
}

TEST_CASE("token spans reconstruct the source token sequence") {
  const std::string text = "Good location, bad room. Don't miss it!";
  const auto tokens = tokenize_spans(text);
  const auto bounds = split_clauses(tokens, default_connectives());
  // Clause token ranges partition [0, tokens.size()).
  size_t next = 0;
  for (const auto& b : bounds) {
    CHECK(b.token_begin == next);
    CHECK(b.token_end > b.token_begin);
    next = b.token_end;
  }
  CHECK(next == tokens.size());
}

TEST_CASE("split_clauses basics") {
  auto clauses = split_clauses_text("good location, bad room.", default_connectives());
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0] == std::vector<std::string>{"good", "location", ","});
  CHECK(clauses[1] == std::vector<std::string>{"bad", "room", "."});

  clauses = split_clauses_text("great!", default_connectives());
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0] == std::vector<std::string>{"great", "!"});

  CHECK_THROWS_AS(split_clauses_text("   ", default_connectives()), DomainError);
}

TEST_CASE("the six-clause review splits on its marked boundaries") {
  const std::string review =
      "This hotel is close to railway station and very convenient to eat around but room of "
      "Hilton is a little uncomfortable. I'm often nitpicking for room decoration. Besides, "
      "the price is very expensive although the staff service is professional.";
  const auto clauses = split_clauses_text(review, default_connectives());
  REQUIRE(clauses.size() == 6);
  CHECK(clauses[0].front() == "this");
  CHECK(clauses[0].back() == "station");
  CHECK(clauses[1].front() == "and");
  CHECK(clauses[1].back() == "around");
  CHECK(clauses[2].front() == "but");
  CHECK(clauses[2].back() == ".");
  CHECK(clauses[2][clauses[2].size() - 2] == "uncomfortable");
  CHECK(clauses[3].front() == "i");
  CHECK(clauses[4].front() == "besides");
  CHECK(clauses[4].back() == "expensive");
  CHECK(clauses[5].front() == "although");
  CHECK(clauses[5][clauses[5].size() - 2] == "professional");
}

TEST_CASE("segmentation is idempotent on single clauses") {
  const std::string review =
      "This hotel is close to railway station and very convenient to eat around, "
      "while the room was bad.";
  const auto first = split_clauses_text(review, default_connectives());
  for (const auto& clause : first) {
    std::string joined;
    for (const auto& tok : clause) {
      if (!joined.empty()) joined += ' ';
      joined += tok;
    }
    const auto again = split_clauses_text(joined, default_connectives());
    REQUIRE(again.size() == 1);
    CHECK(again[0] == clause);
  }
}

TEST_CASE("short fragments merge into the preceding clause") {
  // The lone "!" and the lone "really" both fall below two tokens.
  auto clauses = split_clauses_text("wow!! really", default_connectives());
  REQUIRE(clauses.size() == 1);
  CHECK(clauses[0] == std::vector<std::string>{"wow", "!", "!", "really"});

  clauses = split_clauses_text("wow!! really bad", default_connectives());
  REQUIRE(clauses.size() == 2);
  CHECK(clauses[0] == std::vector<std::string>{"wow", "!", "!"});
  CHECK(clauses[1] == std::vector<std::string>{"really", "bad"});
}

TEST_CASE("cjk terminators split clauses") {
  const auto clauses = split_clauses_text(
      "\xE4\xBD\x8D\xE7\xBD\xAE\xE5\xBE\x88\xE5\xA5\xBD\xE3\x80\x82\xE6\x88\xBF\xE9\x97\xB4"
      "\xE5\xBE\x88\xE5\xB7\xAE\xE3\x80\x82",
      default_connectives());  // two sentences ending in U+3002
  CHECK(clauses.size() == 2);
}
