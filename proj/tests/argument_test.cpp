// Copyright 2026 the argnet authors
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

#include <cmath>
#include <random>

#include "argnet/argument.hpp"
#include "argnet/errors.hpp"
#include "test_support.hpp"

using namespace argnet;
using argnet::testing::data_path;

namespace {

KnowledgeBase necklace() { return load_kb_file(data_path("necklace.kb")); }

CausalLink link(std::string cause, std::string effect, double p, double q) {
    return {std::move(cause), std::move(effect), p, q};
}

}  // namespace

TEST(Qualifier, SingleLinkGivesTwoRowTable) {
    std::vector<CausalLink> links{link("bird", "flies", 0.9, 0.01)};
    Qualifier q = qualifier_from_causal_strength(links);
    ASSERT_TRUE(q.is_full_table());
    EXPECT_EQ(q.full_table().rows, (std::vector<double>{0.01, 0.9}));
    EXPECT_EQ(q.arity(), 1u);
    EXPECT_EQ(q.prob_true(1), 0.9);
}

TEST(Qualifier, SeveralLinksGiveNoisyOr) {
    std::vector<CausalLink> links{link("a", "e", 0.8, 0.05), link("b", "e", 0.6, 0.05)};
    Warnings w;
    Qualifier q = qualifier_from_causal_strength(links, &w);
    ASSERT_TRUE(q.is_noisy_or());
    EXPECT_EQ(q.noisy_or().leak, 0.05);
    EXPECT_TRUE(w.empty());
    // Both causes on: 1 - 0.95 * 0.2 * 0.4
    EXPECT_NEAR(q.prob_true(3), 1.0 - 0.95 * 0.2 * 0.4, 1e-15);
}

TEST(Qualifier, DisagreeingBaselinesWarn) {
    std::vector<CausalLink> links{link("a", "e", 0.8, 0.05), link("b", "e", 0.6, 0.2)};
    Warnings w;
    Qualifier q = qualifier_from_causal_strength(links, &w);
    EXPECT_EQ(q.noisy_or().leak, 0.2);
    EXPECT_EQ(w.size(), 1u);
}

TEST(Qualifier, RejectsBadInput) {
    EXPECT_THROW(qualifier_from_causal_strength({}), ArgumentError);
    std::vector<CausalLink> mixed{link("a", "e", 0.8, 0.05), link("b", "f", 0.6, 0.05)};
    EXPECT_THROW(qualifier_from_causal_strength(mixed), ArgumentError);
    EXPECT_THROW(Qualifier(FullTable{{0.1, 0.2, 0.3}}), ArgumentError);
    EXPECT_THROW(Qualifier(FullTable{{1.2}}), ArgumentError);
    EXPECT_THROW(Qualifier(NoisyOr{{0.5}, -0.1}), ArgumentError);
}

TEST(Qualifier, ParametersAndPerturbation) {
    Qualifier no(NoisyOr{{0.7, 0.4}, 0.1});
    EXPECT_EQ(no.parameters(), (std::vector<double>{0.7, 0.4, 0.1}));
    EXPECT_EQ(no.with_parameter(2, 0.3).noisy_or().leak, 0.3);
    EXPECT_EQ(no.with_parameter(0, 0.2).noisy_or().link[0], 0.2);
    EXPECT_THROW(no.with_parameter(3, 0.3), ArgumentError);

    Qualifier t(FullTable{{0.1, 0.9}});
    EXPECT_EQ(t.with_parameter(1, 0.3).full_table().rows, (std::vector<double>{0.1, 0.3}));
}

// Expanded noisy-or against the textbook formula for random parameters.
TEST(Qualifier, NoisyOrExpansionMatchesFormula) {
    std::mt19937_64 rng(20261018);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t m = trial % 6;
        NoisyOr n;
        for (std::size_t i = 0; i < m; ++i) n.link.push_back(u(rng));
        n.leak = u(rng);
        const auto table = Qualifier(n).expand();
        ASSERT_EQ(table.size(), std::size_t{1} << m);
        for (std::uint64_t row = 0; row < table.size(); ++row) {
            double off = 1.0 - n.leak;
            for (std::size_t i = 0; i < m; ++i)
                if ((row >> (m - 1 - i)) & 1u) off *= 1.0 - n.link[i];
            EXPECT_NEAR(table[row], 1.0 - off, 1e-12);
            EXPECT_NEAR(noisy_or_row(n.link, n.leak, row), 1.0 - off, 1e-12);
        }
    }
}

TEST(Qualifier, NoisyOrDegenerateCases) {
    auto leak_only = Qualifier(NoisyOr{{}, 0.3}).expand();
    ASSERT_EQ(leak_only.size(), 1u);
    EXPECT_DOUBLE_EQ(leak_only[0], 0.3);
    auto t = Qualifier(NoisyOr{{1.0, 0.5}, 0.0}).expand();
    EXPECT_EQ(t[0], 0.0);
    EXPECT_EQ(t[2], 1.0);
    EXPECT_EQ(t[3], 1.0);
}

TEST(LikelihoodRatioQualifier, Conversion) {
    auto [p, q] = qualifier_from_likelihood_ratio(4.0, 0.2);
    EXPECT_DOUBLE_EQ(p, 0.8);
    EXPECT_DOUBLE_EQ(q, 0.2);
    EXPECT_THROW(qualifier_from_likelihood_ratio(10.0, 0.2), InfeasibleRatioError);
    EXPECT_THROW(qualifier_from_likelihood_ratio(0.0, 0.2), ArgumentError);
    EXPECT_THROW(qualifier_from_likelihood_ratio(2.0, 0.0), ArgumentError);
}

TEST(Construct, ForwardTweety) {
    auto kb = load_kb_file(data_path("tweety.kb"));
    auto acts = activate_forward(kb, {"bird"});
    ArgumentFrame f = construct_argument(acts.at(0), kb);
    EXPECT_EQ(f.id, "flight:bird=>flies");
    EXPECT_EQ(f.grounds, std::vector<std::string>{"bird"});
    EXPECT_EQ(f.claim, "flies");
    EXPECT_EQ(f.warrant, "flight");
    EXPECT_FALSE(f.backing.has_value());
    EXPECT_TRUE(f.rebuttals.empty());
    EXPECT_EQ(f.qualifier.prob_true(1), 0.9);
    EXPECT_FALSE(f.likelihood_ratio.has_value());
}

TEST(Construct, BackwardNecklaceCarriesRebuttal) {
    auto kb = necklace();
    auto acts = activate_backward(kb, "necklace-missing");
    std::vector<ArgumentFrame> frames;
    for (const auto& a : acts)
        for (auto& f : construct_arguments(a, kb)) frames.push_back(std::move(f));
    ASSERT_EQ(frames.size(), 2u);
    const ArgumentFrame& theft = frames[1];
    EXPECT_EQ(theft.id, "theft:necklace-missing~>maid-dishonest");
    EXPECT_EQ(theft.direction, Direction::diagnostic);
    EXPECT_EQ(theft.effect(), "necklace-missing");
    EXPECT_EQ(theft.causes(), std::vector<std::string>{"maid-dishonest"});
    EXPECT_EQ(theft.rebuttals, std::vector<std::string>{"necklace-misplaced"});
    ASSERT_TRUE(theft.likelihood_ratio.has_value());
    EXPECT_DOUBLE_EQ(theft.likelihood_ratio->ratio, 40.0);
    EXPECT_TRUE(frames[0].rebuttals.empty());
}

TEST(Construct, ExactlyOneRequired) {
    auto kb = load_kb_file(data_path("coin.kb"));
    auto acts = activate_forward(kb, {"coin"});
    EXPECT_EQ(construct_arguments(acts.at(0), kb).size(), 10u);
    EXPECT_THROW(construct_argument(acts.at(0), kb), ArgumentError);
    SchemaActivation empty{"tosses", Direction::causal, {}, {}};
    EXPECT_THROW(construct_arguments(empty, kb), ArgumentError);
}

TEST(Validate, SlotInvariants) {
    auto kb = necklace();
    auto frame = construct_arguments(activate_backward(kb, "necklace-missing").at(1), kb).at(0);
    EXPECT_NO_THROW(validate_frame(frame, kb));

    auto bad = frame;
    bad.direction = Direction::causal;
    EXPECT_THROW(validate_frame(bad, kb), ArgumentError);

    bad = frame;
    bad.rebuttals = {"maid-dishonest"};
    EXPECT_THROW(validate_frame(bad, kb), ArgumentError);

    bad = frame;
    bad.qualifier = Qualifier(FullTable{{0.1, 0.2, 0.3, 0.4}});
    EXPECT_THROW(validate_frame(bad, kb), ArgumentError);

    bad = frame;
    bad.grounds = {};
    EXPECT_THROW(validate_frame(bad, kb), ArgumentError);

    bad = frame;
    bad.grounds = {"ghost"};
    EXPECT_THROW(validate_frame(bad, kb), UnknownIdError);

    // A ground on each side of the claim.
    ArgumentFrame mixed;
    mixed.id = "x";
    mixed.warrant = "theft";
    mixed.grounds = {"children-playing", "necklace-missing"};
    mixed.claim = "necklace-misplaced";
    mixed.qualifier = Qualifier(FullTable{{0.1, 0.2, 0.3, 0.4}});
    mixed.direction = Direction::causal;
    EXPECT_THROW(validate_frame(mixed, kb), ArgumentError);
}

TEST(FrameFormat, RoundTrip) {
    auto kb = load_kb_file(data_path("backing.kb"));
    ActivationOptions deep;
    deep.depth = 3;
    std::vector<ArgumentFrame> frames;
    for (const auto& a : activate_forward(kb, {"cold-weather"}, deep))
        for (auto& f : construct_arguments(a, kb)) frames.push_back(std::move(f));
    for (const auto& a : activate_backward(kb, "car-starts"))
        for (auto& f : construct_arguments(a, kb)) frames.push_back(std::move(f));
    const std::string text = format_frames(frames);
    EXPECT_EQ(parse_frames(text), frames);
    EXPECT_EQ(format_frames(parse_frames(text)), text);
}

TEST(FrameFormat, Errors) {
    EXPECT_THROW(parse_frames("frame x\n"), ParseError);
    EXPECT_THROW(parse_frames("argnet-frames 1\nframe x\ndirection sideways\nend\n"), ParseError);
    EXPECT_THROW(parse_frames("argnet-frames 1\nframe x\nwarrant w\n"), ParseError);
    EXPECT_TRUE(parse_frames("argnet-frames 1\n").empty());
}
