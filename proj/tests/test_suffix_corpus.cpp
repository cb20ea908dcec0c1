#include "stinger/suffix_corpus.hpp"

#include "doctest.h"
#include "oracle_helpers.hpp"
#include "stinger/errors.hpp"

using namespace stinger;

namespace {

bool archives_equal(const SuffixArchive& a, const SuffixArchive& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    const SuffixRecord& ra = a.records()[i];
    const SuffixRecord& rb = b.records()[i];
    if (ra.suffix_id != rb.suffix_id || ra.raw_text != rb.raw_text ||
        ra.tokens != rb.tokens || ra.origin != rb.origin ||
        ra.created_at_ms != rb.created_at_ms ||
        ra.successes.size() != rb.successes.size()) {
      return false;
    }
    for (size_t j = 0; j < ra.successes.size(); ++j) {
      if (ra.successes[j].behavior_id != rb.successes[j].behavior_id ||
          ra.successes[j].victim_id != rb.successes[j].victim_id ||
          ra.successes[j].timestamp_ms != rb.successes[j].timestamp_ms) {
        return false;
      }
    }
  }
  return true;
}

}  // namespace

TEST_SUITE("load_seeds") {
  TEST_CASE("one record per non-empty line, file order") {
    oracle::TempDir dir("seeds");
    write_file(dir.str("seeds.txt"),
               "# reference suffixes\n"
               "alpha beta gamma\n"
               "\n"
               "delta epsilon\n"
               "zeta\n");
    const auto seeds = load_seeds(dir.str("seeds.txt"));
    REQUIRE(seeds.size() == 3);
    CHECK(seeds[0].raw_text == "alpha beta gamma");
    CHECK(seeds[1].raw_text == "delta epsilon");
    CHECK(seeds[2].raw_text == "zeta");
    for (const auto& s : seeds) {
      CHECK(s.origin == SuffixOrigin::kSeed);
      CHECK(s.tokens == tokenize(s.raw_text));
    }
  }

  TEST_CASE("seven lines give seven records") {
    oracle::TempDir dir("seeds");
    std::string content;
    for (int i = 1; i <= 7; ++i) {
      content += "seed number " + std::to_string(i) + "\n";
    }
    write_file(dir.str("seeds.txt"), content);
    CHECK(load_seeds(dir.str("seeds.txt")).size() == 7);
  }

  TEST_CASE("single line is fine; count is data not code") {
    oracle::TempDir dir("seeds");
    write_file(dir.str("seeds.txt"), "only one\n");
    CHECK(load_seeds(dir.str("seeds.txt")).size() == 1);
  }

  TEST_CASE("empty or comment-only file is rejected") {
    oracle::TempDir dir("seeds");
    write_file(dir.str("empty.txt"), "");
    CHECK_THROWS_AS(load_seeds(dir.str("empty.txt")), EmptyFile);
    write_file(dir.str("comments.txt"), "# nothing here\n\n");
    CHECK_THROWS_AS(load_seeds(dir.str("comments.txt")), EmptyFile);
  }
}

TEST_SUITE("suffix_archive") {
  TEST_CASE("new suffix inserts a generated record") {
    FakeClock clock(1000);
    SuffixArchive archive(&clock);
    const auto& rec = archive.record_success("x y z", "b1", "v1");
    CHECK(archive.size() == 1);
    CHECK(rec.origin == SuffixOrigin::kGenerated);
    CHECK(rec.tokens == TokenSeq{"x", "y", "z"});
    CHECK(rec.successes.size() == 1);
  }

  TEST_CASE("same suffix for two behaviors dedups to one record") {
    FakeClock clock;
    SuffixArchive archive(&clock);
    archive.record_success("x y z", "b1", "v1");
    const auto& rec = archive.record_success("x y z", "b2", "v1");
    CHECK(archive.size() == 1);
    CHECK(rec.successes.size() == 2);
  }

  TEST_CASE("whitespace differences dedup to the same record") {
    FakeClock clock;
    SuffixArchive archive(&clock);
    archive.record_success("x y z", "b1", "v1");
    archive.record_success("x  y   z", "b2", "v1");
    CHECK(archive.size() == 1);
  }

  TEST_CASE("record_success is idempotent per (text, behavior, victim)") {
    FakeClock clock;
    SuffixArchive archive(&clock);
    archive.record_success("x y", "b1", "v1");
    archive.record_success("x y", "b1", "v1");
    CHECK(archive.records()[0].successes.size() == 1);
  }

  TEST_CASE("empty suffix is rejected") {
    FakeClock clock;
    SuffixArchive archive(&clock);
    CHECK_THROWS_AS(archive.record_success("   ", "b1", "v1"), EmptySuffix);
  }

  TEST_CASE("replaying the file reconstructs the archive exactly") {
    oracle::TempDir dir("arch");
    FakeClock clock(5000);
    const std::string path = dir.str("archive.jsonl");
    SuffixArchive archive(path, &clock);
    archive.record_success("one two three", "b1", "v1");
    clock.advance_ms(10);
    archive.record_success("four five", "b2", "v1");
    clock.advance_ms(10);
    archive.record_success("one two three", "b3", "v2");

    SuffixArchive replayed(path, &clock);
    CHECK(archives_equal(archive, replayed));
  }

  TEST_CASE("replay then append keeps growing the same file") {
    oracle::TempDir dir("arch");
    FakeClock clock;
    const std::string path = dir.str("archive.jsonl");
    {
      SuffixArchive archive(path, &clock);
      archive.record_success("first suffix", "b1", "v1");
    }
    {
      SuffixArchive archive(path, &clock);
      archive.record_success("second suffix", "b2", "v1");
      CHECK(archive.size() == 2);
    }
    SuffixArchive final_state(path, &clock);
    CHECK(final_state.size() == 2);
    // Fresh ids never collide with replayed ones.
    CHECK(final_state.records()[0].suffix_id !=
          final_state.records()[1].suffix_id);
  }
}

TEST_SUITE("top_k") {
  TEST_CASE("ranks by success count, then age, then id") {
    FakeClock clock(100);
    SuffixArchive archive(&clock);
    archive.record_success("old once", "b1", "v1");
    clock.advance_ms(50);
    archive.record_success("newer twice", "b1", "v1");
    archive.record_success("newer twice", "b2", "v1");
    clock.advance_ms(50);
    archive.record_success("newest once", "b3", "v1");

    const auto ranked = archive.top_k(10);
    REQUIRE(ranked.size() == 3);
    CHECK(ranked[0].raw_text == "newer twice");
    CHECK(ranked[1].raw_text == "old once");  // equal counts: earlier first
    CHECK(ranked[2].raw_text == "newest once");
  }

  TEST_CASE("k truncates and short archives return everything") {
    FakeClock clock;
    SuffixArchive archive(&clock);
    for (int i = 0; i < 50; ++i) {
      archive.record_success("suffix number " + std::to_string(i),
                             "b" + std::to_string(i), "v1");
    }
    CHECK(archive.top_k(38).size() == 38);
    SuffixArchive small(&clock);
    small.record_success("a b", "b1", "v1");
    small.record_success("c d", "b2", "v1");
    CHECK(small.top_k(5).size() == 2);
  }

  TEST_CASE("victim filter restricts the counted successes") {
    FakeClock clock;
    SuffixArchive archive(&clock);
    archive.record_success("works on v2", "b1", "v2");
    archive.record_success("works on v2", "b2", "v2");
    clock.advance_ms(5);
    archive.record_success("works on v1", "b1", "v1");

    const auto for_v1 = archive.top_k(10, std::string("v1"));
    REQUIRE(for_v1.size() == 2);
    CHECK(for_v1[0].raw_text == "works on v1");
  }

  TEST_CASE("top_k(k1) is a prefix of top_k(k2) for k1 <= k2") {
    std::mt19937_64 rng(8);
    FakeClock clock;
    SuffixArchive archive(&clock);
    for (int i = 0; i < 30; ++i) {
      const auto seq = oracle::random_token_seq(rng, 5, 5);
      if (seq.empty()) continue;
      archive.record_success(oracle::join_tokens(seq),
                             "b" + std::to_string(rng() % 10),
                             "v" + std::to_string(rng() % 3));
      clock.advance_ms(1);
    }
    for (size_t k1 = 1; k1 + 1 < archive.size(); k1 += 3) {
      const auto small = archive.top_k(k1);
      const auto large = archive.top_k(k1 + 2);
      REQUIRE(small.size() <= large.size());
      for (size_t i = 0; i < small.size(); ++i) {
        CHECK(small[i].suffix_id == large[i].suffix_id);
      }
    }
  }
}

TEST_SUITE("suffix_corpus") {
  TEST_CASE("references are seeds followed by archive records") {
    oracle::TempDir dir("corpus");
    write_file(dir.str("seeds.txt"), "seed one\nseed two\n");
    FakeClock clock;
    SuffixCorpus corpus(load_seeds(dir.str("seeds.txt")),
                        SuffixArchive(&clock));
    corpus.archive().record_success("generated thing", "b1", "v1");
    const auto refs = corpus.references();
    REQUIRE(refs.size() == 3);
    CHECK(refs[0].raw_text == "seed one");
    CHECK(refs[1].raw_text == "seed two");
    CHECK(refs[2].raw_text == "generated thing");
  }
}
