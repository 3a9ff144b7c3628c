#include "doctest.h"
#include "helpers.hpp"

using namespace enforcemint;
using testing_util::tr;

TEST_CASE("actions parse and print by kind") {
    CHECK(Action::parse("s:l1").kind() == Kind::Sensor);
    CHECK(Action::parse("a:on1").kind() == Kind::Actuator);
    CHECK(Action::parse("c!open").kind() == Kind::Send);
    CHECK(Action::parse("c?open").kind() == Kind::Recv);
    CHECK(Action::parse("tick").is_tick());
    CHECK(Action::parse("end").is_end());
    CHECK(Action::parse("c!open").complement() == Action::parse("c?open"));
    CHECK(Action::parse("s:l1").str() == "s:l1");
    CHECK_FALSE(Action::try_parse("q:x"));
    CHECK(Action::parse("s:l1") == Action::sensor("l1"));
}

TEST_CASE("erase_tau drops silent steps only") {
    Trace t{Action::tau(), Action::sensor("l1"), Action::tau(), Action::end()};
    CHECK(erase_tau(t) == tr("s:l1 end"));
    CHECK(erase_tau({}).empty());
    CHECK(erase_tau(tr("tick end")) == tr("tick end"));
}

TEST_CASE("is_prefix") {
    CHECK(is_prefix(tr("s:l1"), tr("s:l1 end")));
    CHECK(is_prefix({}, tr("tick s:l1")));
    CHECK_FALSE(is_prefix(tr("end"), tr("s:l1 end")));
    CHECK_FALSE(is_prefix(tr("s:l1 end tick"), tr("s:l1 end")));
}

TEST_CASE("trace text accepts commas and comments") {
    CHECK(parse_trace("tick, s:l1, # reading\n end") == tr("tick s:l1 end"));
    CHECK_THROWS_AS(parse_trace("tick bogus"), ParseError);
    CHECK(to_string(tr("tick end")) == "tick end");
}

TEST_CASE("alphabets are sorted sets without tau") {
    Alphabet p = parse_alphabet("end, s:x, s:x, tick");
    CHECK(p.size() == 3);
    CHECK(contains(p, Action::sensor("x")));
    CHECK_FALSE(contains(p, Action::actuator("x")));
    CHECK_THROWS(parse_alphabet("s:x tau"));
}
