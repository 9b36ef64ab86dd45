// SPDX-License-Identifier: Apache-2.0
#include <random>

#include <catch2/catch_amalgamated.hpp>

#include "layoutkit/geometry.hpp"

using namespace layoutkit;

TEST_CASE("iou basics", "[geometry]") {
    const BBox a{0, 0, 10, 10};
    CHECK(iou(a, a) == 1.0);
    CHECK(iou(a, BBox{20, 20, 30, 30}) == 0.0);
    // inter = 50, union = 150
    CHECK_THAT(iou(a, BBox{5, 0, 15, 10}),
               Catch::Matchers::WithinAbs(1.0 / 3.0, 1e-12));
}

TEST_CASE("iou with one degenerate box is zero", "[geometry]") {
    CHECK(iou(BBox{0, 0, 10, 10}, BBox{5, 5, 5, 5}) == 0.0);
}

TEST_CASE("iou of two degenerate boxes is undefined", "[geometry]") {
    CHECK_THROWS_AS(iou(BBox{1, 1, 1, 1}, BBox{2, 2, 2, 2}), GeometryError);
}

TEST_CASE("containment fraction", "[geometry]") {
    CHECK(containment_fraction(BBox{0, 0, 10, 10}, BBox{0, 0, 100, 100}) == 1.0);
    CHECK(containment_fraction(BBox{0, 0, 10, 10}, BBox{5, 0, 15, 10}) == 0.5);
    CHECK(containment_fraction(BBox{0, 0, 10, 10}, BBox{50, 50, 60, 60}) == 0.0);
    CHECK_THROWS_AS(containment_fraction(BBox{3, 3, 3, 3}, BBox{0, 0, 10, 10}),
                    GeometryError);
}

TEST_CASE("union_bbox", "[geometry]") {
    CHECK(union_bbox({BBox{0, 0, 10, 10}}) == BBox{0, 0, 10, 10});
    CHECK(union_bbox({BBox{10, 10, 50, 20}, BBox{10, 25, 60, 35}}) ==
          BBox{10, 10, 60, 35});
    CHECK(union_bbox({BBox{0, 0, 1, 1}, BBox{99, 99, 100, 100}}) ==
          BBox{0, 0, 100, 100});
    CHECK_THROWS_AS(union_bbox(std::span<const BBox>{}), EmptyInputError);
}

TEST_CASE("geometry properties over random boxes", "[geometry]") {
    std::mt19937 rng(20077);
    std::uniform_real_distribution<double> coord(0.0, 200.0);
    std::uniform_real_distribution<double> side(0.5, 80.0);
    auto random_box = [&] {
        const double x = coord(rng), y = coord(rng);
        return BBox{x, y, x + side(rng), y + side(rng)};
    };
    for (int i = 0; i < 500; ++i) {
        const BBox a = random_box();
        const BBox b = random_box();
        const double ab = iou(a, b);
        CHECK(ab >= 0.0);
        CHECK(ab <= 1.0);
        CHECK(ab == iou(b, a));  // symmetric
        CHECK(iou(a, a) == 1.0);

        const BBox u = union_bbox({a, b});
        CHECK(containment_fraction(a, u) == 1.0);
        CHECK(containment_fraction(b, u) == 1.0);

        // translation invariance
        const double dx = coord(rng) - 100.0;
        const double dy = coord(rng) - 100.0;
        const BBox at = a.translated(dx, dy);
        const BBox bt = b.translated(dx, dy);
        CHECK_THAT(iou(at, bt), Catch::Matchers::WithinAbs(ab, 1e-9));
        CHECK_THAT(containment_fraction(at, bt),
                   Catch::Matchers::WithinAbs(containment_fraction(a, b), 1e-9));
        const BBox ut = union_bbox({at, bt});
        CHECK_THAT(ut.left, Catch::Matchers::WithinAbs(u.left + dx, 1e-9));
        CHECK_THAT(ut.top, Catch::Matchers::WithinAbs(u.top + dy, 1e-9));
    }
}
