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

#include <random>

#include "argnet/errors.hpp"
#include "argnet/inference.hpp"
#include "argnet/network.hpp"
#include "test_support.hpp"

using namespace argnet;
using argnet::testing::data_path;
using argnet::testing::golden_path;
using argnet::testing::read_text;
namespace oracle = argnet::testing::oracle;

namespace {

std::vector<ArgumentFrame> frames_for(const KnowledgeBase& kb, const std::vector<SchemaActivation>& acts) {
    std::vector<ArgumentFrame> out;
    for (const auto& a : acts)
        for (auto& f : construct_arguments(a, kb)) out.push_back(std::move(f));
    return out;
}

BayesNet necklace_net() {
    auto kb = load_kb_file(data_path("necklace.kb"));
    return compile(frames_for(kb, activate_backward(kb, "necklace-missing")), kb).net;
}

NetNode node(std::string id, std::vector<std::string> parents) {
    NetNode n;
    n.id = std::move(id);
    FullTable t;
    t.rows.assign(std::size_t{1} << parents.size(), 0.5);
    n.parents = std::move(parents);
    n.cpt = Qualifier(t);
    return n;
}

bool has_arc(const std::vector<NetNode>& nodes, const std::string& from, const std::string& to) {
    for (const auto& n : nodes)
        if (n.id == to) return std::find(n.parents.begin(), n.parents.end(), from) != n.parents.end();
    return false;
}

}  // namespace

TEST(Compile, NecklaceThreeNodeNet) {
    BayesNet net = necklace_net();
    ASSERT_EQ(net.size(), 3u);
    EXPECT_EQ(net.arc_count(), 2u);
    const NetNode& missing = net.node("necklace-missing");
    EXPECT_EQ(missing.parents, (std::vector<std::string>{"children-playing", "maid-dishonest"}));
    ASSERT_TRUE(missing.cpt.is_noisy_or());
    EXPECT_EQ(missing.cpt.noisy_or().link, (std::vector<double>{0.3, 0.8}));
    EXPECT_EQ(missing.cpt.noisy_or().leak, 0.02);
    EXPECT_EQ(net.node("maid-dishonest").cpt.prob_true(0), 0.1);
    EXPECT_TRUE(arcs_follow_tiers(net));
    EXPECT_EQ(net.provenance().at("necklace-missing").size(), 2u);
}

TEST(Compile, TweetyTwoNodes) {
    auto kb = load_kb_file(data_path("tweety.kb"));
    BayesNet net = compile(frames_for(kb, activate_forward(kb, {"bird"})), kb).net;
    EXPECT_EQ(net.size(), 2u);
    EXPECT_EQ(net.arc_count(), 1u);
}

TEST(Compile, OrderOfFramesDoesNotMatter) {
    auto kb = load_kb_file(data_path("necklace.kb"));
    auto frames = frames_for(kb, activate_backward(kb, "necklace-missing"));
    auto a = compile(frames, kb).net;
    std::reverse(frames.begin(), frames.end());
    frames.push_back(frames.front());
    EXPECT_EQ(compile(frames, kb).net, a);
}

TEST(Compile, Errors) {
    auto kb = load_kb_file(data_path("necklace.kb"));
    EXPECT_THROW(compile(std::vector<ArgumentFrame>{}, kb), ArgumentError);

    auto frames = frames_for(kb, activate_backward(kb, "necklace-missing"));
    auto clash = frames;
    clash[0].qualifier = Qualifier(FullTable{{0.02, 0.9}});
    clash.push_back(frames[0]);
    EXPECT_THROW(compile(clash, kb), ConflictingArgumentsError);

    // Same cause, different strength, different ids.
    auto twin = frames[1];
    twin.id = "other";
    twin.qualifier = Qualifier(FullTable{{0.02, 0.5}});
    auto with_twin = frames;
    with_twin.push_back(twin);
    EXPECT_THROW(compile(with_twin, kb), ConflictingArgumentsError);

    // Cut the play schema, and with it the only prior for children-playing.
    const std::string source = read_text(data_path("necklace.kb"));
    auto kb2 = load_kb(source.substr(0, source.find("[schema play]")));
    ArgumentFrame orphan;
    orphan.grounds = {"necklace-missing"};
    orphan.claim = "maid-dishonest";
    orphan.warrant = "theft";
    orphan.direction = Direction::diagnostic;
    orphan.qualifier = Qualifier(FullTable{{0.02, 0.8}});
    orphan.id = "o";
    EXPECT_NO_THROW(compile(std::vector{orphan}, kb2));
    orphan.claim = "children-playing";
    EXPECT_THROW(compile(std::vector{orphan}, kb2), MissingPriorError);
}

TEST(Compile, MergeKeepsLoneFrameAndUnionsByCause) {
    auto kb = load_kb_file(data_path("necklace.kb"));
    auto frames = frames_for(kb, activate_backward(kb, "necklace-missing"));
    auto lone = merge_arguments_noisy_or(std::span(frames).subspan(0, 1));
    EXPECT_EQ(lone.cpt, frames[0].qualifier);
    auto both = merge_arguments_noisy_or(frames);
    EXPECT_EQ(both.parents.size(), 2u);
    EXPECT_TRUE(both.warnings.empty());

    auto dup = frames;
    dup.push_back(frames[0]);
    EXPECT_EQ(merge_arguments_noisy_or(dup).cpt, both.cpt);
}

TEST(Dag, FromNodesRejectsCycles) {
    std::vector<NetNode> nodes{node("a", {"c"}), node("b", {"a"}), node("c", {"b"})};
    try {
        BayesNet::from_nodes(nodes);
        FAIL() << "expected a cycle error";
    } catch (const CycleError& e) {
        const auto& cyc = e.cycle();
        ASSERT_GE(cyc.size(), 2u);
        EXPECT_EQ(cyc.front(), cyc.back());
        for (std::size_t i = 0; i + 1 < cyc.size(); ++i) EXPECT_TRUE(has_arc(nodes, cyc[i], cyc[i + 1]));
    }
    BayesNet broken = BayesNet::from_nodes_unchecked(nodes);
    EXPECT_THROW(check_causal_order(broken), CycleError);
    EXPECT_TRUE(find_cycle(broken).has_value());
}

TEST(Dag, SelfLoopAndUnknownParent) {
    EXPECT_THROW(BayesNet::from_nodes({node("a", {"a"})}), CycleError);
    EXPECT_THROW(BayesNet::from_nodes({node("a", {"ghost"})}), UnknownIdError);
    EXPECT_THROW(BayesNet::from_nodes({node("a", {}), node("a", {})}), Error);
}

TEST(Dag, RandomCyclesAreReportedFaithfully) {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 10;
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("v" + std::to_string(i));
        std::vector<std::vector<std::string>> parents(n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                if (i != j && rng() % 4 == 0 && parents[i].size() < 4) parents[i].push_back(ids[j]);
        // Force one cycle through a random subset.
        std::vector<std::size_t> ring(n);
        for (std::size_t i = 0; i < n; ++i) ring[i] = i;
        std::shuffle(ring.begin(), ring.end(), rng);
        ring.resize(2 + rng() % (n - 1));
        for (std::size_t k = 0; k < ring.size(); ++k) {
            auto& ps = parents[ring[(k + 1) % ring.size()]];
            const auto& from = ids[ring[k]];
            if (std::find(ps.begin(), ps.end(), from) == ps.end()) ps.push_back(from);
        }
        std::vector<NetNode> nodes;
        for (std::size_t i = 0; i < n; ++i) nodes.push_back(node(ids[i], parents[i]));

        try {
            BayesNet::from_nodes(nodes);
            FAIL() << "cycle not detected";
        } catch (const CycleError& e) {
            const auto& cyc = e.cycle();
            ASSERT_GE(cyc.size(), 2u);
            EXPECT_EQ(cyc.front(), cyc.back());
            for (std::size_t i = 0; i + 1 < cyc.size(); ++i) EXPECT_TRUE(has_arc(nodes, cyc[i], cyc[i + 1]));
        }
    }
}

TEST(Dag, RandomDagsAccepted) {
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        BayesNet net = argnet::testing::random_net(rng, 1 + rng() % 12);
        EXPECT_FALSE(find_cycle(net).has_value());
    }
}

TEST(ArcReversal, VStructureGainsAnArc) {
    BayesNet net = parse_network(read_text(data_path("v-structure.net")));
    ASSERT_EQ(net.arc_count(), 2u);
    BayesNet rev = reverse_arc(net, "x", "z");
    EXPECT_EQ(rev.arc_count(), 3u);
    EXPECT_EQ(rev.node("x").parents, (std::vector<std::string>{"y", "z"}));
    EXPECT_EQ(rev.node("z").parents, std::vector<std::string>{"y"});
    EXPECT_GT(cpt_entry_count(rev), cpt_entry_count(net));

    const auto before = oracle::joint(net);
    const auto after = oracle::joint(rev);
    ASSERT_EQ(before.size(), after.size());
    for (std::size_t a = 0; a < before.size(); ++a) EXPECT_NEAR(before[a], after[a], 1e-12);
}

TEST(ArcReversal, PreservesJointOnRandomNets) {
    std::mt19937_64 rng(9);
    int reversed = 0;
    for (int trial = 0; trial < 200 && reversed < 60; ++trial) {
        BayesNet net = argnet::testing::random_net(rng, 2 + rng() % 7);
        for (const auto& n : net.nodes()) {
            if (n.parents.empty()) continue;
            const std::string from = n.parents[rng() % n.parents.size()];
            BayesNet rev;
            try {
                rev = reverse_arc(net, from, n.id);
            } catch (const CycleError&) {
                continue;  // another directed path from -> to exists
            }
            const auto a = oracle::joint(net);
            const auto b = oracle::joint(rev);
            for (std::size_t k = 0; k < a.size(); ++k) ASSERT_NEAR(a[k], b[k], 1e-12);
            ++reversed;
            break;
        }
    }
    EXPECT_GE(reversed, 30);
}

TEST(ArcReversal, MissingArc) {
    BayesNet net = parse_network(read_text(data_path("v-structure.net")));
    EXPECT_THROW(reverse_arc(net, "x", "y"), ArgumentError);
}

TEST(Formats, DotGolden) {
    EXPECT_EQ(export_dot(necklace_net()), read_text(golden_path("necklace.dot")));
}

TEST(Formats, NetGoldenAndRoundTrip) {
    BayesNet net = necklace_net();
    const std::string text = format_network(net);
    EXPECT_EQ(text, read_text(golden_path("necklace.net")));
    EXPECT_EQ(parse_network(text), net);

    std::mt19937_64 rng(10);
    for (int trial = 0; trial < 50; ++trial) {
        BayesNet r = argnet::testing::random_net(rng, 1 + rng() % 10);
        EXPECT_EQ(parse_network(format_network(r)), r);
    }
}

TEST(Formats, NetParseErrors) {
    EXPECT_THROW(parse_network(""), ParseError);
    EXPECT_THROW(parse_network("argnet-network 2\n"), ParseError);
    EXPECT_THROW(parse_network("argnet-network 1\nnode a 0\nparents\nend\n"), ParseError);
    EXPECT_THROW(parse_network("argnet-network 1\nnode a 0\nfull_table 0.5 0.5 0.5\nend\n"), ParseError);
    EXPECT_THROW(parse_network("argnet-network 1\nnode a 0\nparents b\nfull_table 0.5 0.5\nend\n"), ParseError);
    EXPECT_THROW(parse_network("argnet-network 1\nnode a 0\nparents b\nfull_table 0.5 0.5\nend\n"
                               "node b 0\nparents a\nfull_table 0.5 0.5\nend\n"),
                 CycleError);
}
