#include <catch2/catch_amalgamated.hpp>

#include <string>

#include "echelon/errors.hpp"
#include "echelon/svg.hpp"

using namespace echelon;

TEST_CASE("line plots carry title, axes, and polylines", "[svg]") {
    svg::LinePlot plot("Demand over time", "day", "units");
    plot.add({"observed", {40.0, 55.0, 50.0, 45.0}, {}, {}, ""});
    plot.add({"forecast", {42.0, 52.0, 51.0, 44.0}, {}, {}, "#000000"});
    const auto doc = plot.render();
    REQUIRE(doc.find("<svg") == 0);
    REQUIRE(doc.find("Demand over time") != std::string::npos);
    REQUIRE(doc.find("day") != std::string::npos);
    REQUIRE(doc.find("units") != std::string::npos);
    REQUIRE(doc.find("observed") != std::string::npos);
    REQUIRE(doc.find("forecast") != std::string::npos);
    REQUIRE(doc.find("<polyline") != std::string::npos);
    REQUIRE(doc.find("#000000") != std::string::npos);
    REQUIRE(doc.find("</svg>") != std::string::npos);
}

TEST_CASE("bands render as shaded polygons", "[svg]") {
    svg::LinePlot plot("Profit", "day", "value");
    plot.add({"mean", {10.0, 12.0, 11.0}, {8.0, 9.0, 10.0}, {12.0, 15.0, 12.0}, ""});
    const auto doc = plot.render();
    REQUIRE(doc.find("<polygon") != std::string::npos);
    REQUIRE(doc.find("fill-opacity") != std::string::npos);

    svg::LinePlot flat("Flat", "x", "y");
    flat.add({"s", {3.0, 3.0, 3.0}, {}, {}, ""});
    REQUIRE_NOTHROW(flat.render());
}

TEST_CASE("x offsets shift the tick labels", "[svg]") {
    svg::LinePlot plot("Validation", "day", "value");
    plot.set_x_start(220.0);
    plot.add({"s", {1.0, 2.0, 3.0, 4.0, 5.0, 6.0}, {}, {}, ""});
    const auto doc = plot.render();
    REQUIRE(doc.find(">220<") != std::string::npos);
    REQUIRE(doc.find(">225<") != std::string::npos);
}

TEST_CASE("line plot inputs are validated", "[svg]") {
    svg::LinePlot plot("t", "x", "y");
    REQUIRE_THROWS_AS(plot.render(), DomainError);
    REQUIRE_THROWS_AS(plot.add({"empty", {}, {}, {}, ""}), DomainError);
    REQUIRE_THROWS_AS(plot.add({"bad band", {1.0, 2.0}, {0.5}, {1.5}, ""}), DomainError);
}

TEST_CASE("bar charts render grouped rects with a legend", "[svg]") {
    svg::BarChart chart("Robustness", "profit");
    chart.set_categories({"level 0", "level 0.5", "level 1"});
    chart.add("retailer", {100.0, 90.0, 70.0});
    chart.add("distributor", {80.0, 75.0, 60.0});
    const auto doc = chart.render();
    REQUIRE(doc.find("<svg") == 0);
    REQUIRE(doc.find("Robustness") != std::string::npos);
    REQUIRE(doc.find("level 0.5") != std::string::npos);
    REQUIRE(doc.find("retailer") != std::string::npos);
    REQUIRE(doc.find("distributor") != std::string::npos);
    const auto first_rect = doc.find("<rect x=");
    REQUIRE(first_rect != std::string::npos);
    REQUIRE(doc.find("<rect x=", first_rect + 1) != std::string::npos);

    svg::BarChart negatives("Mixed", "v");
    negatives.set_categories({"a"});
    negatives.add("s", {-5.0});
    REQUIRE_NOTHROW(negatives.render());
}

TEST_CASE("bar chart inputs are validated", "[svg]") {
    svg::BarChart chart("t", "y");
    REQUIRE_THROWS_AS(chart.render(), DomainError);
    chart.set_categories({"a", "b"});
    REQUIRE_THROWS_AS(chart.add("s", {1.0}), DomainError);
}
