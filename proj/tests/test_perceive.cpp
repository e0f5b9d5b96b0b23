#include <gtest/gtest.h>

#include "flexnav/mocks.hpp"
#include "flexnav/perceive.hpp"
#include "test_support.hpp"

using namespace flexnav::perceive;
using flexnav::LambdaProvider;
using flexnav::ParseError;
using flexnav::ProviderError;
using flexnav::ScriptedProvider;
using flexnav::ValidationError;
using testsupport::chain_graph;
namespace envgraph = flexnav::envgraph;
namespace mocks = flexnav::mocks;

TEST(InferFloor, StoryRule) {
    EXPECT_EQ(infer_floor(0.0), 0);
    EXPECT_EQ(infer_floor(2.9), 0);
    EXPECT_EQ(infer_floor(3.1), 1);
    EXPECT_EQ(infer_floor(1.4), 0);
    EXPECT_EQ(infer_floor(-0.5), 0);  // clamped
    EXPECT_EQ(infer_floor(9.5), 3);
}

TEST(Buckets, SnapNearestMultipleOf90) {
    EXPECT_EQ(snap_to_bucket(0), 0);
    EXPECT_EQ(snap_to_bucket(90), 90);
    EXPECT_EQ(snap_to_bucket(100), 90);
    EXPECT_EQ(snap_to_bucket(136), 180);
    EXPECT_EQ(snap_to_bucket(350), 0);
    EXPECT_EQ(snap_to_bucket(-40), 0);
}

TEST(Buckets, LabelMappingIsFixed) {
    EXPECT_EQ(orientation_label(0), "front");
    EXPECT_EQ(orientation_label(90), "right");
    EXPECT_EQ(orientation_label(180), "back");
    EXPECT_EQ(orientation_label(270), "left");
    EXPECT_EQ(bucket_for_label("Left"), 270);
    EXPECT_THROW(bucket_for_label("north-ish"), ParseError);
}

TEST(DiscretizeViews, AlignedHeadings) {
    auto g = chain_graph(2);
    auto views0 = discretize_views(g, "c0", 0.0);
    EXPECT_EQ(views0[0].scene_text, "scene c0 0");
    EXPECT_EQ(views0[1].scene_text, "scene c0 90");

    auto views90 = discretize_views(g, "c0", 90.0);
    EXPECT_EQ(views90[0].scene_text, "scene c0 90");  // front at heading 90
}

TEST(DiscretizeViews, NearestBucketForOffAxisHeading) {
    auto g = chain_graph(2);
    auto views = discretize_views(g, "c0", 100.0);
    EXPECT_EQ(views[0].scene_text, "scene c0 90");
}

TEST(DiscretizeViews, RotationShiftsLabelsByOne) {
    auto g = chain_graph(2);
    for (double h : {0.0, 90.0, 135.0, 200.0}) {
        auto base = discretize_views(g, "c0", h);
        auto rotated = discretize_views(g, "c0", h + 90.0);
        for (int i = 0; i < 4; ++i)
            EXPECT_EQ(rotated[i].scene_text, base[(i + 1) % 4].scene_text);
    }
}

TEST(DiscretizeViews, MissingDescriptionsThrow) {
    envgraph::NavGraph g;
    envgraph::Viewpoint vp;
    vp.id = "bare";
    vp.pose = envgraph::Pose::at({0, 0, 0});
    g.add_viewpoint(vp);
    EXPECT_THROW(discretize_views(g, "bare", 0.0), ValidationError);
}

TEST(FormatObservation, MatchesSpelledOutTemplate) {
    Observation obs;
    obs.node = "x";
    obs.height_m = 2.5;
    obs.floor_index = 0;
    obs.position_desc = "in a hallway";
    obs.views = {{{0, "front", "a long hallway"},
                  {90, "right", "r"},
                  {180, "back", "b"},
                  {270, "left", "l"}}};
    obs.objects_in_3m = {"lamp"};
    EXPECT_EQ(format_observation(obs),
              "Height off ground is 2.5 meters. in a hallway. front: a long hallway. "
              "right: r. back: b. left: l. Objects in 3m: lamp.");
}

TEST(FormatObservation, EmptyObjectsRenderNone) {
    auto obs = testsupport::golden_observation();
    obs.objects_in_3m.clear();
    auto text = format_observation(obs);
    EXPECT_NE(text.find("Objects in 3m: none."), std::string::npos);
}

TEST(FormatObservation, GoldenFile) {
    auto obs = testsupport::golden_observation();
    EXPECT_EQ(format_observation(obs), testsupport::golden_text("observation.txt"));
}

TEST(FormatObservation, DeterministicAndDistinct) {
    auto a = testsupport::golden_observation();
    auto b = a;
    EXPECT_EQ(format_observation(a), format_observation(b));
    b.position_desc = "somewhere else";
    EXPECT_NE(format_observation(a), format_observation(b));
}

TEST(Perceive, MockEchoesStoredSceneTexts) {
    auto g = chain_graph(3, {1});
    mocks::MockScenePerceiver perceiver;
    auto obs = perceive(perceiver, g, "c1", 0.0);
    EXPECT_EQ(obs.node, "c1");
    EXPECT_EQ(obs.views[0].scene_text, "scene c1 0");
    EXPECT_EQ(obs.views[3].scene_text, "scene c1 270");
    EXPECT_EQ(obs.formatted_text, format_observation(obs));
}

TEST(Perceive, HeightAndFloorFromNode) {
    envgraph::NavGraph g;
    envgraph::Viewpoint vp;
    vp.id = "n";
    vp.pose = envgraph::Pose::at({0, 0, 1.4});
    std::map<int, std::string> scenes;
    for (int b : envgraph::kSceneBuckets) scenes[b] = "s";
    vp.scene_descriptions = scenes;
    g.add_viewpoint(vp);
    mocks::MockScenePerceiver perceiver;
    auto obs = perceive(perceiver, g, "n", 0.0);
    EXPECT_DOUBLE_EQ(obs.height_m, 1.4);
    EXPECT_EQ(obs.floor_index, 0);
}

TEST(Perceive, NoNearbyObjectsPrintsNone) {
    auto g = chain_graph(3);  // chain without objects
    mocks::MockScenePerceiver perceiver;
    auto obs = perceive(perceiver, g, "c0", 0.0);
    EXPECT_TRUE(obs.objects_in_3m.empty());
    EXPECT_NE(obs.formatted_text.find("Objects in 3m: none."), std::string::npos);
}

TEST(Perceive, ObjectsComeFromProximityQuery) {
    auto g = chain_graph(5, {2});
    mocks::MockScenePerceiver perceiver;
    auto obs = perceive(perceiver, g, "c2", 0.0);
    ASSERT_FALSE(obs.objects_in_3m.empty());
    EXPECT_EQ(obs.objects_in_3m[0], "lamp");
}

TEST(Perceive, ProviderFailurePropagates) {
    auto g = chain_graph(2);
    ScriptedProvider failing({ScriptedProvider::kFailToken});
    EXPECT_THROW(perceive(failing, g, "c0", 0.0), ProviderError);
}

TEST(Perceive, TwoRoundContract) {
    auto g = chain_graph(2);
    std::vector<std::string> rounds;
    LambdaProvider probe([&](const std::string& req) -> std::string {
        auto j = nlohmann::json::parse(req);
        rounds.push_back(std::to_string(j.at("round").get<int>()));
        if (j.at("round") == 1) {
            EXPECT_EQ(j.at("views").size(), 4u);  // all four views jointly
            return j.at("views").dump();
        }
        EXPECT_TRUE(j.contains("descriptions"));
        return "somewhere";
    });
    auto obs = perceive(probe, g, "c0", 0.0);
    EXPECT_EQ(rounds, (std::vector<std::string>{"1", "2"}));
    EXPECT_EQ(obs.position_desc, "somewhere");
}
