// Copyright 2026 The dialsum Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <random>

#include "dialsum/principal.hpp"
#include "oracles.hpp"

namespace dialsum {
namespace {

Dialogue make_dialogue(const std::vector<std::string>& texts,
                       std::string id = "d") {
  Dialogue d;
  d.id = std::move(id);
  for (const auto& t : texts) d.turns.push_back({std::nullopt, t});
  return d;
}

const Dialogue kThreeTurns =
    make_dialogue({"alpha beta", "gamma delta", "alpha beta gamma"});
const GeneratedSummary kThreeTurnsSummary{"d", "alpha beta gamma"};

TEST(ComputeM, Fixtures) {
  EXPECT_EQ(compute_m(10, 0.15), 2u);
  EXPECT_EQ(compute_m(2, 0.15), 1u);
  EXPECT_EQ(compute_m(20, 0.15), 3u);
  EXPECT_EQ(compute_m(10, 0.99), 9u);  // upper clamp
  EXPECT_EQ(compute_m(3, 0.01), 1u);   // lower clamp
  EXPECT_THROW(compute_m(1, 0.15), RangeError);
  EXPECT_THROW(compute_m(10, 0.0), RangeError);
}

TEST(ComputeM, MonotoneInRatio) {
  for (std::size_t n = 2; n < 60; ++n) {
    std::size_t prev = 0;
    for (double r = 0.05; r < 1.0; r += 0.05) {
      const std::size_t m = compute_m(n, r);
      ASSERT_GE(m, prev);
      ASSERT_GE(m, 1u);
      ASSERT_LE(m, n - 1);
      prev = m;
    }
  }
}

TEST(GsgPlus, SingleTurnFixture) {
  const PrincipalSelection s =
      select_principal_gsg_plus(kThreeTurns, kThreeTurnsSummary, 1);
  EXPECT_EQ(s.indices, std::vector<std::size_t>({2}));
  EXPECT_EQ(s.m, 1u);
  ASSERT_EQ(s.trace.size(), 1u);
  EXPECT_EQ(s.trace[0].index, 2u);
  EXPECT_DOUBLE_EQ(s.trace[0].f1, 1.0);
}

TEST(GsgPlus, TieBreaksToLowerIndex) {
  const PrincipalSelection s =
      select_principal_gsg_plus(kThreeTurns, kThreeTurnsSummary, 2);
  EXPECT_EQ(s.indices, std::vector<std::size_t>({0, 2}));
  ASSERT_EQ(s.trace.size(), 2u);
  EXPECT_EQ(s.trace[1].index, 0u);
  EXPECT_NEAR(s.trace[1].f1, 0.75, 1e-12);
}

TEST(GsgPlus, EmptySummaryCascadesTies) {
  const Dialogue d = make_dialogue({"a", "b", "c", "d", "e"});
  const PrincipalSelection s =
      select_principal_gsg_plus(d, GeneratedSummary{"d", ""}, 3);
  EXPECT_EQ(s.indices, std::vector<std::size_t>({0, 1, 2}));
  for (const auto& step : s.trace) EXPECT_EQ(step.f1, 0.0);
}

TEST(GsgPlus, RejectsBadArguments) {
  EXPECT_THROW(select_principal_gsg_plus(kThreeTurns, kThreeTurnsSummary, 0),
               RangeError);
  EXPECT_THROW(select_principal_gsg_plus(kThreeTurns, kThreeTurnsSummary, 3),
               RangeError);
  EXPECT_THROW(
      select_principal_gsg_plus(kThreeTurns, GeneratedSummary{"x", "a"}, 1),
      RangeError);
}

TEST(GsgPlus, IgnoresSpeakersAndPunctuation) {
  Dialogue d = kThreeTurns;
  d.turns[0].speaker = "gamma";
  d.turns[1].text = "Gamma, DELTA!";
  EXPECT_EQ(select_principal_gsg_plus(d, kThreeTurnsSummary, 2).indices,
            std::vector<std::size_t>({0, 2}));
}

TEST(GsgPlus, MatchesBruteForceGreedy) {
  std::mt19937_64 gen(41);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 5;
    std::vector<std::string> turns;
    for (std::size_t i = 0; i < n; ++i) {
      std::string t;
      const std::size_t len = 1 + gen() % 4;
      for (std::size_t k = 0; k < len; ++k) {
        if (k) t += ' ';
        t += static_cast<char>('a' + gen() % 5);
      }
      turns.push_back(t);
    }
    std::string g;
    for (std::size_t k = gen() % 6; k > 0; --k) {
      g += static_cast<char>('a' + gen() % 5);
      g += ' ';
    }
    const std::size_t m = 1 + gen() % std::min<std::size_t>(3, n - 1);
    const Dialogue d = make_dialogue(turns);
    std::vector<double> wins;
    const auto expected = oracle::gsg_plus(turns, g, m, &wins);
    const PrincipalSelection s =
        select_principal_gsg_plus(d, GeneratedSummary{"d", g}, m);
    ASSERT_EQ(s.indices, expected) << "trial " << trial;
    ASSERT_EQ(s.trace.size(), wins.size());
    for (std::size_t k = 0; k < wins.size(); ++k) {
      ASSERT_EQ(s.trace[k].f1, wins[k]);
    }
  }
}

TEST(GsgPlus, TokenPermutationWithinTurnsIsInvisible) {
  std::mt19937_64 gen(42);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> turns;
    const std::size_t n = 3 + gen() % 5;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<std::string> w;
      for (std::size_t k = 1 + gen() % 5; k > 0; --k) {
        w.push_back(std::string(1, static_cast<char>('a' + gen() % 6)));
      }
      std::string t;
      for (auto& x : w) t += x + " ";
      turns.push_back(t);
    }
    const GeneratedSummary g{"d", "a b c d"};
    const std::size_t m = 1 + gen() % (n - 1);
    const auto before = select_principal_gsg_plus(make_dialogue(turns), g, m);
    for (auto& t : turns) {
      auto w = oracle::split(t);
      std::shuffle(w.begin(), w.end(), gen);
      t.clear();
      for (auto& x : w) t += x + " ";
    }
    const auto after = select_principal_gsg_plus(make_dialogue(turns), g, m);
    ASSERT_EQ(before.indices, after.indices);
  }
}

TEST(GsgPlus, SelectionShapeInvariants) {
  std::mt19937_64 gen(43);
  for (int trial = 0; trial < 300; ++trial) {
    std::vector<std::string> turns;
    const std::size_t n = 2 + gen() % 12;
    for (std::size_t i = 0; i < n; ++i) {
      turns.push_back(std::string(1, static_cast<char>('a' + gen() % 4)) +
                      " x");
    }
    const std::size_t m = 1 + gen() % (n - 1);
    const auto s =
        select_principal_gsg_plus(make_dialogue(turns), {"d", "a b"}, m);
    ASSERT_EQ(s.indices.size(), m);
    ASSERT_TRUE(std::is_sorted(s.indices.begin(), s.indices.end()));
    ASSERT_EQ(std::adjacent_find(s.indices.begin(), s.indices.end()),
              s.indices.end());
    ASSERT_LT(s.indices.back(), n);
  }
}

TEST(GsgStar, Fixtures) {
  const Dialogue d = make_dialogue({"a b", "a b", "z"});
  const PrincipalSelection s = select_principal_gsg_star(d, 1);
  EXPECT_EQ(s.indices, std::vector<std::size_t>({0}));
  EXPECT_NEAR(s.trace[0].f1, 0.8, 1e-12);

  // m = n - 1 leaves out exactly the lowest scorer.
  EXPECT_EQ(select_principal_gsg_star(d, 2).indices,
            std::vector<std::size_t>({0, 1}));

  const Dialogue twins = make_dialogue({"same words", "same words"});
  EXPECT_EQ(select_principal_gsg_star(twins, 1).indices,
            std::vector<std::size_t>({0}));
  EXPECT_THROW(select_principal_gsg_star(twins, 2), RangeError);
}

TEST(GsgStar, MatchesBruteForce) {
  std::mt19937_64 gen(44);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 2 + gen() % 6;
    std::vector<std::string> turns;
    for (std::size_t i = 0; i < n; ++i) {
      std::string t;
      for (std::size_t k = 1 + gen() % 4; k > 0; --k) {
        t += static_cast<char>('a' + gen() % 5);
        t += ' ';
      }
      turns.push_back(t);
    }
    const std::size_t m = 1 + gen() % (n - 1);
    ASSERT_EQ(select_principal_gsg_star(make_dialogue(turns), m).indices,
              oracle::gsg_star(turns, m));
  }
}

TEST(RenderPrincipal, Orders) {
  const PrincipalSelection s =
      select_principal_gsg_plus(kThreeTurns, kThreeTurnsSummary, 2);
  EXPECT_EQ(render_principal(kThreeTurns, s, PrincipalOrder::kDialogue),
            "alpha beta\nalpha beta gamma");
  EXPECT_EQ(render_principal(kThreeTurns, s, PrincipalOrder::kScore),
            "alpha beta gamma\nalpha beta");

  const PrincipalSelection one =
      select_principal_gsg_plus(kThreeTurns, kThreeTurnsSummary, 1);
  EXPECT_EQ(render_principal(kThreeTurns, one, PrincipalOrder::kDialogue),
            render_principal(kThreeTurns, one, PrincipalOrder::kScore));
}

TEST(RenderPrincipal, SpeakersOptional) {
  Dialogue d = kThreeTurns;
  d.turns[2].speaker = "Ann";
  const auto s = select_principal_gsg_plus(d, kThreeTurnsSummary, 1);
  EXPECT_EQ(render_principal(d, s, PrincipalOrder::kDialogue),
            "Ann: alpha beta gamma");
  EXPECT_EQ(render_principal(d, s, PrincipalOrder::kDialogue, false),
            "alpha beta gamma");
}

}  // namespace
}  // namespace dialsum
