#include <gtest/gtest.h>

#include "rcaus/geometry.hpp"
#include "support.hpp"

using namespace rcaus;

TEST(Geometry, CrossingsAreCenteredOnOrigin) {
  const auto g = test::small_array(16, 8);
  double sx = 0, sy = 0;
  for (int r = 0; r < g.row_count; ++r)
    for (int c = 0; c < g.col_count; ++c) {
      const Vec3 p = crossing_position(g, r, c);
      sx += p.x;
      sy += p.y;
      EXPECT_EQ(p.z, 0.0);
    }
  EXPECT_NEAR(sx, 0.0, 1e-15);
  EXPECT_NEAR(sy, 0.0, 1e-15);
}

TEST(Geometry, RowsRunAlongXColumnsAlongY) {
  const auto g = test::small_array();
  const auto row = row_centerline(g, 3);
  const auto col = column_centerline(g, 5);
  EXPECT_EQ(row.direction, (Vec3{1, 0, 0}));
  EXPECT_EQ(col.direction, (Vec3{0, 1, 0}));
  EXPECT_DOUBLE_EQ(row.point.y, g.row_y(3));
  EXPECT_DOUBLE_EQ(col.point.x, g.col_x(5));
  EXPECT_DOUBLE_EQ(crossing_position(g, 3, 5).x, g.col_x(5));
  EXPECT_DOUBLE_EQ(crossing_position(g, 3, 5).y, g.row_y(3));
}

TEST(Geometry, PitchSetsNeighbourSpacingAndWidth) {
  const auto g = test::small_array(32, 32);
  EXPECT_NEAR(g.col_x(1) - g.col_x(0), 250e-6, 1e-18);
  EXPECT_NEAR(g.row_y(31) - g.row_y(30), 250e-6, 1e-18);
  EXPECT_DOUBLE_EQ(g.width_x(), 8e-3);
  EXPECT_DOUBLE_EQ(g.width_y(), 8e-3);
}

TEST(Geometry, ValidationRejectsBadArrays) {
  EXPECT_THROW((ArrayGeometry{0, 4, 1e-4, 0, 1e6}.validate()), std::invalid_argument);
  EXPECT_THROW((ArrayGeometry{4, 4, 1e-4, 1e-4, 1e6}.validate()), std::invalid_argument);
  EXPECT_THROW((ArrayGeometry{4, 4, 1e-4, -1e-6, 1e6}.validate()), std::invalid_argument);
  EXPECT_THROW((ArrayGeometry{4, 4, 1e-4, 0, 0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW(test::small_array().validate());
  EXPECT_THROW((MediumSpec{0, 50e6}.validate()), std::invalid_argument);
}

TEST(Geometry, IndicesAreChecked) {
  const auto g = test::small_array(4, 4);
  EXPECT_THROW(crossing_position(g, 4, 0), std::out_of_range);
  EXPECT_THROW(row_centerline(g, -1), std::out_of_range);
  EXPECT_THROW(column_centerline(g, 4), std::out_of_range);
}
