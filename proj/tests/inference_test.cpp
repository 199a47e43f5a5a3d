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

#include "argnet/errors.hpp"
#include "argnet/inference.hpp"
#include "test_support.hpp"

using namespace argnet;
using argnet::testing::data_path;
using argnet::testing::read_text;
namespace oracle = argnet::testing::oracle;

namespace {

BayesNet compiled(const std::string& kb_name, const std::set<std::string>& grounds, const std::string& claim = "") {
    auto kb = load_kb_file(data_path(kb_name));
    std::vector<ArgumentFrame> frames;
    auto take = [&](const std::vector<SchemaActivation>& acts) {
        for (const auto& a : acts)
            for (auto& f : construct_arguments(a, kb)) frames.push_back(std::move(f));
    };
    if (!grounds.empty()) take(activate_forward(kb, grounds));
    if (!claim.empty()) take(activate_backward(kb, claim));
    return compile(frames, kb).net;
}

}  // namespace

TEST(Inference, TweetyFromKb) {
    BayesNet net = compiled("tweety.kb", {"bird"});
    EXPECT_NEAR(posterior(net, "flies", {{"bird", true}}), 0.9, 1e-12);
    EXPECT_NEAR(posterior(net, "flies", {{"bird", false}}), 0.01, 1e-12);
}

TEST(Inference, TweetyContext) {
    BayesNet net = parse_network(read_text(data_path("tweety-context.net")));
    EXPECT_NEAR(posterior(net, "flies", {{"bird", true}}), 0.9, 1e-12);
    EXPECT_NEAR(posterior(net, "flies", {{"bird", true}, {"turkey", true}}), 0.05, 1e-12);
}

TEST(Inference, CoinLikelihood) {
    BayesNet net = compiled("coin.kb", {"coin"});
    Evidence heads = parse_evidence(read_text(data_path("coin-heads.ev")));
    EXPECT_NEAR(evidence_probability(net, heads), std::pow(0.9, 10), 1e-12);
    Evidence tails = parse_evidence(read_text(data_path("coin-tails.ev")));
    EXPECT_NEAR(evidence_probability(net, tails), std::pow(0.1, 10), 1e-22);
}

TEST(Inference, ExplainingAwayOnNecklace) {
    BayesNet net = compiled("necklace.kb", {}, "necklace-missing");
    const double missing = posterior(net, "maid-dishonest", {{"necklace-missing", true}});
    const double both = posterior(net, "maid-dishonest", {{"necklace-missing", true}, {"children-playing", true}});
    EXPECT_NEAR(missing, oracle::posterior(net, "maid-dishonest", {{"necklace-missing", true}}), 1e-12);
    EXPECT_GT(missing - both, 1e-3);
}

// Explaining away holds for any v-structure with noisy-or links above the leak.
TEST(Inference, ExplainingAwayProperty) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.01, 0.99);
    for (int trial = 0; trial < 200; ++trial) {
        const double leak = u(rng) / 2;
        std::uniform_real_distribution<double> above(leak + 0.01, 0.99);
        NetNode c1{"c1", 0, {}, Qualifier::prior(u(rng))};
        NetNode c2{"c2", 0, {}, Qualifier::prior(u(rng))};
        NetNode e{"e", 1, {"c1", "c2"}, Qualifier(NoisyOr{{above(rng), above(rng)}, leak})};
        BayesNet net = BayesNet::from_nodes({c1, c2, e});
        EXPECT_GT(posterior(net, "c1", {{"e", true}}), posterior(net, "c1", {{"e", true}, {"c2", true}}));
    }
}

TEST(Inference, MatchesEnumerationOnRandomNets) {
    std::mt19937_64 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        BayesNet net = argnet::testing::random_net(rng, 1 + rng() % 12);
        Evidence ev = argnet::testing::random_evidence(rng, net, 4);
        const double pe = oracle::evidence_probability(net, ev);
        EXPECT_NEAR(evidence_probability(net, ev), pe, 1e-12);
        EXPECT_NEAR(enumerate_oracle(net, std::nullopt, ev), pe, 1e-12);
        for (const auto& n : net.nodes()) {
            if (ev.count(n.id)) continue;
            const double want = oracle::posterior(net, n.id, ev);
            EXPECT_NEAR(posterior(net, n.id, ev), want, 1e-9);
            EXPECT_NEAR(enumerate_oracle(net, n.id, ev), want, 1e-9);
        }
    }
}

TEST(Inference, PosteriorsNormalize) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 30; ++trial) {
        BayesNet net = argnet::testing::random_net(rng, 2 + rng() % 8);
        Evidence ev = argnet::testing::random_evidence(rng, net, 3);
        for (const auto& n : net.nodes()) {
            if (ev.count(n.id)) continue;
            Evidence t = ev, f = ev;
            t[n.id] = true;
            f[n.id] = false;
            const double pt = evidence_probability(net, t), pf = evidence_probability(net, f);
            EXPECT_NEAR(pt / (pt + pf) + pf / (pt + pf), 1.0, 1e-12);
            EXPECT_NEAR(posterior(net, n.id, ev), pt / (pt + pf), 1e-12);
        }
    }
}

TEST(Inference, JointTableMatchesOracle) {
    std::mt19937_64 rng(14);
    Engine engine;
    for (int trial = 0; trial < 30; ++trial) {
        BayesNet net = argnet::testing::random_net(rng, 3 + rng() % 7);
        std::vector<std::string> keep{net.node(0).id, net.node(net.size() - 1).id};
        Factor f = engine.joint_table(net, keep, {});
        ASSERT_EQ(f.values.size(), 4u);
        for (std::size_t r = 0; r < 4; ++r) {
            Evidence ev{{keep[0], (r >> 1) & 1}, {keep[1], r & 1}};
            EXPECT_NEAR(f.values[r], oracle::evidence_probability(net, ev), 1e-12);
        }
    }
}

TEST(Inference, AllPosteriors) {
    BayesNet net = compiled("necklace.kb", {}, "necklace-missing");
    auto post = Engine{}.all_posteriors(net, {{"necklace-missing", true}});
    EXPECT_EQ(post.size(), 3u);
    EXPECT_EQ(post.at("necklace-missing"), 1.0);
    EXPECT_NEAR(post.at("children-playing"),
                oracle::posterior(net, "children-playing", {{"necklace-missing", true}}), 1e-12);
}

TEST(Inference, Errors) {
    BayesNet net = compiled("necklace.kb", {}, "necklace-missing");
    EXPECT_THROW(posterior(net, "ghost", {}), UnknownIdError);
    EXPECT_THROW(evidence_probability(net, {{"ghost", true}}), UnknownIdError);
    EXPECT_THROW(posterior(net, "maid-dishonest", {{"maid-dishonest", true}}), InferenceError);

    NetNode sure{"sure", 0, {}, Qualifier::prior(1.0)};
    NetNode dep{"dep", 1, {"sure"}, Qualifier(FullTable{{0.5, 1.0}})};
    BayesNet certain = BayesNet::from_nodes({sure, dep});
    EXPECT_EQ(evidence_probability(certain, {{"sure", false}}), 0.0);
    EXPECT_THROW(posterior(certain, "dep", {{"sure", false}}), ImpossibleEvidenceError);
    EXPECT_THROW(enumerate_oracle(certain, std::string("dep"), {{"sure", false}}), ImpossibleEvidenceError);
}

TEST(Inference, OracleRefusesLargeNets) {
    std::mt19937_64 rng(15);
    BayesNet big = argnet::testing::random_net(rng, 21, 2);
    EXPECT_THROW(enumerate_oracle(big, std::nullopt, {}), SizeError);
    // Variable elimination has no such cap.
    EXPECT_NEAR(evidence_probability(big, {}), 1.0, 1e-12);
}

TEST(Inference, EmptyEvidenceGivesPriorMarginal) {
    BayesNet net = compiled("tweety.kb", {"bird"});
    EXPECT_NEAR(posterior(net, "flies", {}), 0.5 * 0.9 + 0.5 * 0.01, 1e-12);
    EXPECT_EQ(evidence_probability(net, {}), 1.0);
}

TEST(EvidenceFormat, ParseAndFormat) {
    Evidence ev = parse_evidence("# note\na = true\n\nb = false  # trailing\n");
    EXPECT_EQ(ev, (Evidence{{"a", true}, {"b", false}}));
    EXPECT_EQ(format_evidence(ev), "a = true\nb = false\n");
    EXPECT_EQ(parse_evidence(format_evidence(ev)), ev);
    EXPECT_TRUE(parse_evidence(read_text(data_path("empty.ev"))).empty());
}

TEST(EvidenceFormat, Errors) {
    auto line_of = [](std::string_view s) -> std::size_t {
        try {
            parse_evidence(s);
        } catch (const ParseError& e) {
            return e.line();
        }
        return 0;
    };
    EXPECT_EQ(line_of("a = yes\n"), 1u);
    EXPECT_EQ(line_of("a = true\nb true\n"), 2u);
    EXPECT_EQ(line_of("a = true\na = false\n"), 2u);
    EXPECT_EQ(line_of("a = true extra\n"), 1u);
    EXPECT_EQ(line_of("a b = true\n"), 1u);
}
