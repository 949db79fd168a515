#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "quakeml/csv.hpp"
#include "quakeml/errors.hpp"
#include "quakeml/rng.hpp"

using namespace quakeml;

TEST_CASE("read_triggers: well-formed input") {
    std::istringstream in(
        "id,lat,lon,t\n"
        "a,-12.01,-77.02,0.5\n"
        ",-11.99,-76.98,1.25\n"
        "\n"
        "c,-12.1,-77.1,3\n");
    const auto tr = read_triggers(in);
    REQUIRE(tr.size() == 3);
    CHECK(tr[0].id == "a");
    CHECK(tr[0].location.lat == -12.01);
    CHECK(tr[1].id.empty());
    CHECK(tr[1].time_s == 1.25);
    CHECK(tr[2].time_s == 3.0);
}

TEST_CASE("read_triggers: crlf line endings") {
    std::istringstream in("id,lat,lon,t\r\na,-12,-77,1\r\n");
    const auto tr = read_triggers(in);
    REQUIRE(tr.size() == 1);
    CHECK(tr[0].time_s == 1.0);
}

TEST_CASE("read_triggers: error diagnostics carry line numbers") {
    auto line_of = [](const std::string& text) -> std::size_t {
        std::istringstream in(text);
        try {
            read_triggers(in);
        } catch (const ParseError& e) {
            return e.line;
        }
        return 0;
    };
    CHECK(line_of("") == 1);
    CHECK(line_of("lat,lon,t\n") == 1);                       // wrong header
    CHECK(line_of("id,lat,lon,t\n") == 1);                    // no data rows
    CHECK(line_of("id,lat,lon,t\na,-12,-77\n") == 2);         // missing field
    CHECK(line_of("id,lat,lon,t\na,-12,-77,1\nb,x,-77,2\n") == 3);
    CHECK(line_of("id,lat,lon,t\na,-95,-77,1\n") == 2);       // lat range
    CHECK(line_of("id,lat,lon,t\na,-12,-185,1\n") == 2);      // lon range
    CHECK(line_of("id,lat,lon,t\na,-12,-77,nan\n") == 2);     // non-finite
}

TEST_CASE("read_roster: well-formed input and errors") {
    std::istringstream in("id,lat,lon\np0,-12.3,-77.0\np1,-11.8,-76.7\n");
    const auto roster = read_roster(in);
    REQUIRE(roster.size() == 2);
    CHECK(roster[0].id == "p0");
    CHECK(roster[1].active);

    std::istringstream bad("id,lat,lon,t\np0,-12.3,-77.0,1\n");
    CHECK_THROWS_AS(read_roster(bad), ParseError);
}

TEST_CASE("trigger round-trip preserves values exactly") {
    Rng rng(21);
    std::vector<Trigger> tr;
    for (int i = 0; i < 50; ++i)
        tr.push_back({"t" + std::to_string(i),
                      {rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 180.0)},
                      rng.uniform(-100.0, 100.0)});
    std::ostringstream out;
    write_triggers(out, tr);
    std::istringstream in(out.str());
    const auto back = read_triggers(in);
    REQUIRE(back.size() == tr.size());
    for (std::size_t i = 0; i < tr.size(); ++i) {
        CHECK(back[i].id == tr[i].id);
        CHECK(back[i].location.lat == tr[i].location.lat);
        CHECK(back[i].location.lon == tr[i].location.lon);
        CHECK(back[i].time_s == tr[i].time_s);
    }
}

TEST_CASE("roster round-trip preserves values exactly") {
    Rng rng(22);
    std::vector<Smartphone> roster;
    for (int i = 0; i < 30; ++i)
        roster.push_back({"p" + std::to_string(i),
                          {rng.uniform(-90.0, 90.0), rng.uniform(-180.0, 180.0)},
                          true});
    std::ostringstream out;
    write_roster(out, roster);
    std::istringstream in(out.str());
    const auto back = read_roster(in);
    REQUIRE(back.size() == roster.size());
    for (std::size_t i = 0; i < roster.size(); ++i) {
        CHECK(back[i].location.lat == roster[i].location.lat);
        CHECK(back[i].location.lon == roster[i].location.lon);
    }
}

TEST_CASE("format_double: shortest round-trip text") {
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(0.5) == "0.5");
    CHECK(format_double(-12.39) == "-12.39");
    for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, -77.123456789012}) {
        double back;
        std::sscanf(format_double(v).c_str(), "%lf", &back);
        CHECK(back == v);
    }
}

TEST_CASE("missing file raises a parse error") {
    CHECK_THROWS_AS(read_triggers_file("/nonexistent/x.csv"), ParseError);
    CHECK_THROWS_AS(read_roster_file("/nonexistent/x.csv"), ParseError);
}
