#include "doctest.h"
#include "enforcemint/property.hpp"
#include "enforcemint/property_parser.hpp"
#include "helpers.hpp"

using namespace enforcemint;
using testing_util::tr;
using testing_util::traces;

namespace {
Action sx() { return Action::sensor("x"); }
Action l1() { return Action::sensor("l1"); }
}  // namespace

TEST_CASE("parser maps the concrete syntax onto terms") {
    Global g = parse_property("(s:l1 . end)*");
    CHECK(g == prop::star(prop::prefix(l1(), prop::event(Action::end()))));
    CHECK(parse_property("(end)* & (end)*") ==
          prop::inter(prop::star(prop::event(Action::end())), prop::star(prop::event(Action::end()))));
    CHECK_THROWS_AS(parse_property("(s:l1 . )"), ParseError);
    CHECK_THROWS_AS(parse_property("(end)"), ParseError);
    CHECK_THROWS_AS(parse_property(""), ParseError);
}

TEST_CASE("unions, sequencing and local intersection") {
    Global g = parse_property("(s:a.end + s:b.tick.end)*");
    REQUIRE(g->body->kind == LKind::Union);
    CHECK(g->body->branches.size() == 2);
    Global h = parse_property("((s:a.end) & (s:a.end + s:b.end); end)*");
    CHECK(h->body->kind == LKind::Inter);
    CHECK(h->body->rhs->kind == LKind::Seq);
}

TEST_CASE("printing round-trips and keeps the size") {
    for (const char* text : {"(s:l1.end)*", "(end)* & (s:x.end + s:y.tick.end)*", "((s:a.end) & (s:a.end); end)*",
                             "(eps; s:a.(end + tick.end))*"}) {
        Global g = parse_property(text);
        Global back = parse_property(to_string(g));
        CHECK(back == g);
        CHECK(prop_size(back) == prop_size(g));
        CHECK(prop_size(g) >= 1);
    }
}

TEST_CASE("well_formed") {
    CHECK(well_formed(prop::event(Action::end())));
    CHECK_FALSE(well_formed(prop::event(l1())));
    CHECK(well_formed(prop::star(prop::prefix(l1(), prop::event(Action::end())))));
    CHECK_FALSE(well_formed(parse_property("(s:x.end + s:y)*")));
    // an end in the middle of a cycle is allowed as long as the tail closes
    CHECK(well_formed(parse_property("(s:x.end.s:y.end)*")));
    CHECK_FALSE(well_formed(parse_property("(eps)*")));
}

TEST_CASE("prop_size") {
    CHECK(prop_size(prop::eps()) == 1);
    CHECK(prop_size(prop::event(Action::end())) == 2);
    CHECK(prop_size(prop::inter(prop::eps(), prop::eps())) == 3);
    CHECK(derivative_bound(2, 0) == 2);
    CHECK(derivative_bound(5, 1) == 25);
    CHECK(derivative_bound(1ULL << 40, 3) == UINT64_MAX);
}

TEST_CASE("events_of") {
    CHECK(events_of(prop::event(Action::end())) == make_alphabet({Action::end()}));
    CHECK(events_of(parse_property("(s:l1.end)*")) == make_alphabet({l1(), Action::end()}));
    CHECK(events_of(prop::eps()).empty());
}

TEST_CASE("is_deterministic") {
    CHECK(is_deterministic(parse_property("(s:l1.end + s:h1.end)*")));
    CHECK_FALSE(is_deterministic(parse_property("(s:l1.end + s:l1.tick.end)*")));
    CHECK(is_deterministic(parse_property("(end)*")));
}

TEST_CASE("NFA oracle") {
    Global ends = parse_property("(end)*");
    auto n = to_nfa(ends);
    CHECK(enumerate(n, 3) == traces({"", "end", "end end", "end end end"}));

    auto both = to_nfa(parse_property("(end)* & (s:l1.end)*"));
    CHECK(enumerate(both, 4) == traces({""}));
    CHECK(lang_member({}, to_nfa(parse_property("((eps); end)*"))));

    CHECK(lang_member(tr("end"), ends));
    CHECK(lang_member({}, ends));
    Global g = parse_property("(s:l1.end)*");
    CHECK_FALSE(lang_member(tr("s:l1"), g));
    CHECK(lang_prefix(tr("s:l1"), g));
    CHECK_FALSE(lang_prefix(tr("end"), g));
    CHECK_THROWS_AS(lang_member({Action::tau()}, g), std::invalid_argument);
}

TEST_CASE("members of well-formed local properties end with end, once") {
    for (const char* text : {"(s:a.end + s:b.(s:a.end + end))*", "((s:a.end) & (s:a.end + s:b.end); tick.end)*"}) {
        Global g = parse_property(text);
        REQUIRE(well_formed(g));
        for (const auto& t : enumerate(to_nfa(g->body), 10)) {
            REQUIRE_FALSE(t.empty());
            CHECK(t.back().is_end());
            CHECK(std::count(t.begin(), t.end(), Action::end()) == 1);
        }
        for (const auto& t : enumerate(to_nfa(g), 8))
            for (std::size_t i = 0; i <= t.size(); ++i) CHECK(lang_prefix(Trace(t.begin(), t.begin() + i), g));
    }
}

TEST_CASE("bounded_diff finds a separating word") {
    auto a = to_nfa(parse_property("(s:x.end)*"));
    auto b = to_nfa(parse_property("(s:x.end + end)*"));
    Alphabet sigma = make_alphabet({sx(), Action::end()});
    auto d = bounded_diff(view(a), view(b), sigma, 4);
    REQUIRE(d);
    CHECK(d->witness == tr("end"));
    CHECK_FALSE(bounded_diff(view(a), view(a), sigma, 6));
    CHECK_FALSE(bounded_not_included(view(a), view(b), sigma, 6));
    CHECK(bounded_not_included(view(b), view(a), sigma, 6));
}
