#include <gtest/gtest.h>

#include "tubemeasure/tubemeasure.hpp"

using namespace tubemeasure;
using io::json;

TEST(ShapeJson, ParsesEveryKind) {
  EXPECT_TRUE(io::shape_from_json(json::parse(R"({"dim":3,"kind":"ball","center":[0,0,0],"radius":{"num":1,"den":2}})"))
                  .is<Ball>());
  Shape c = io::shape_from_json(json::parse(R"({"dim":2,"kind":"cuboid","center":[0,0],"half_lengths":[1,2]})"));
  EXPECT_DOUBLE_EQ(c.get_if<Cuboid>()->volume(), 8.0);
  Shape p = io::shape_from_json(json::parse(R"({"dim":2,"kind":"polytope","points":[[0,0],[1,0],[0,1],[0.1,0.1]]})"));
  EXPECT_EQ(p.get_if<ConvexPolytope>()->vertices().size(), 3u);
  Shape pr = io::shape_from_json(
      json::parse(R"({"dim":3,"kind":"product","base":{"dim":2,"kind":"ball","center":[0,0],"radius":1}})"));
  EXPECT_TRUE(pr.is<ProductSet>());
  Shape u = io::shape_from_json(json::parse(
      R"({"dim":2,"kind":"union","members":[{"dim":2,"kind":"ball","center":[0,0],"radius":1},
                                             {"dim":2,"kind":"cloud","points":[[5,5]]}]})"));
  EXPECT_EQ(u.get_if<Union>()->members.size(), 2u);
}

TEST(ShapeJson, RejectsBadInput) {
  EXPECT_THROW(io::shape_from_json(json::parse(R"({"dim":3,"kind":"ball","center":[0,0,0],"radius":1,"x":1})")),
               ParseError);
  EXPECT_THROW(io::shape_from_json(json::parse(R"({"dim":3,"kind":"blob"})")), ParseError);
  EXPECT_THROW(io::shape_from_json(json::parse(R"({"dim":3,"kind":"ball","center":[0,0],"radius":1})")),
               DimensionError);
  EXPECT_THROW(io::shape_from_json(json::parse(R"({"dim":9,"kind":"ball","center":[0],"radius":1})")),
               DimensionError);
  EXPECT_THROW(io::shape_from_json(json::parse(R"({"kind":"ball"})")), ParseError);
  EXPECT_THROW(io::rational_from_json(json::parse(R"({"num":1,"den":0})")), ParseError);
}

TEST(ShapeJson, RoundTrip) {
  std::vector<Vector> vs{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
  Shape s = ConvexPolytope::from_vertices(vs);
  Shape back = io::shape_from_json(io::shape_to_json(s));
  EXPECT_NEAR(back.get_if<ConvexPolytope>()->volume(), 1.0 / 6.0, 1e-15);
  Shape c = Cuboid(Vector{1, 2}, Frame::from_axis(Direction(Vector{1, 1})), {0.5, 2.0});
  Shape cb = io::shape_from_json(io::shape_to_json(c));
  EXPECT_TRUE(contains(cb, Vector{1, 2}));
  EXPECT_DOUBLE_EQ(cb.get_if<Cuboid>()->volume(), 4.0);
}

TEST(CoverJson, RoundTripKeepsExactWidths) {
  TubeCover c({Tube(Vector{0, 0, 0}, Direction::axis(3, 2), 0.25),
               SquareTube(Frame::standard(3), Vector{1, 1, 0}, Rational(3, 8))});
  json j = io::to_json(c);
  EXPECT_EQ(j[1]["delta"]["num"], 3);
  EXPECT_EQ(j[1]["delta"]["den"], 8);
  TubeCover back = io::cover_from_json(j);
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(cover_cost(back), cover_cost(c));
  EXPECT_EQ(square_cover_cost(back), Rational(9, 16));
}

TEST(CoverJson, UnknownKindRejected) {
  EXPECT_THROW(io::cover_from_json(json::parse(R"([{"kind":"oval","point":[0,0]}])")), ParseError);
  EXPECT_THROW(io::cover_from_json(json::parse(R"([])")), ParseError);
}

TEST(PackingJson, ListsExactSquares) {
  json j = io::to_json(ball_square_packing(2, 1.0, 2));
  EXPECT_EQ(j["square_count"], 4);
  ASSERT_EQ(j["squares"].size(), 4u);
  for (const auto& sq : j["squares"]) {
    EXPECT_EQ(sq["half_width"]["num"], 1);
    EXPECT_EQ(sq["half_width"]["den"], 4);
    for (const auto& c : sq["center"]) {
      EXPECT_EQ(std::abs(c["num"].get<int>()), 1);
      EXPECT_EQ(c["den"], 4);
    }
  }
}

TEST(Csv, FlattensNestedKeys) {
  json j{{"a", 1}, {"b", {{"c", "x,y"}}}, {"d", json::array({1.5, 2})}};
  EXPECT_EQ(io::to_csv(j), "key,value\na,1\nb.c,\"x,y\"\nd.0,1.5\nd.1,2\n");
}
