#include "doctest.h"
#include "enforcemint/combinators.hpp"
#include "enforcemint/property_parser.hpp"
#include "enforcemint/synthesis.hpp"
#include "helpers.hpp"

using namespace enforcemint;

namespace {
Action sx() { return Action::sensor("x"); }
Action ay() { return Action::actuator("y"); }
Action e() { return Action::end(); }
}  // namespace

TEST_CASE("single-cycle end property") {
    Alphabet p = make_alphabet({sx(), e(), Action::tick()});
    auto got = synthesize(parse_property("(end)*"), p);
    AutomatonBuilder b;
    int z = b.fresh();
    b.add_arm(z, EditLabel::allow(e()), z);
    b.add_arm(z, EditLabel::suppress(sx()), z);
    b.mark_accepting(z);
    CHECK(structurally_equal(got, b.finish(z, p, true)));
}

TEST_CASE("one sensor then end") {
    Alphabet p = make_alphabet({sx(), ay(), e(), Action::tick()});
    Global g = parse_property("(s:x.end)*");
    auto got = synthesize(g, p);

    AutomatonBuilder b;
    int z = b.fresh(), z1 = b.fresh();
    b.add_arm(z, EditLabel::allow(sx()), z1);
    b.add_arm(z, EditLabel::insert(e(), sx()), z1);
    b.add_arm(z, EditLabel::suppress(ay()), z);
    b.add_arm(z1, EditLabel::allow(e()), z);
    b.add_arm(z1, EditLabel::suppress(sx()), z1);
    b.add_arm(z1, EditLabel::suppress(ay()), z1);
    b.mark_accepting(z);
    CHECK(structurally_equal(got, b.finish(z, p, true)));
    CHECK_FALSE(bounded_diff(allowed_language(got), view(to_nfa(g)), p, 8));
}

TEST_CASE("global intersection is the product of the parts") {
    Alphabet p = make_alphabet({sx(), ay(), e(), Action::tick()});
    Global l = parse_property("(s:x.end + end)*");
    Global r = parse_property("(s:x.end + a:y.end)*");
    auto got = synthesize(prop::inter(l, r), p);
    auto want = cross_product(synthesize(l, p), synthesize(r, p), p);
    CHECK(structurally_equal(got, want));
}

TEST_CASE("eps compiles to its continuation") {
    Alphabet p = make_alphabet({sx(), e()});
    SynthContext ctx(p);
    int k = ctx.builder().fresh("X");
    CHECK(ctx.synthesize_local(prop::eps(), k) == k);
}

TEST_CASE("synthesis preconditions") {
    Alphabet p = make_alphabet({sx(), e(), Action::tick()});
    auto kind_of = [&](const char* text) {
        try {
            synthesize(parse_property(text), p);
        } catch (const SynthError& err) {
            return static_cast<int>(err.kind);
        }
        return -1;
    };
    CHECK(kind_of("(s:x.end + tick)*") == SynthError::IllFormed);
    CHECK(kind_of("(s:x.end + s:x.tick.end)*") == SynthError::Nondeterministic);
    CHECK(kind_of("(a:q.end)*") == SynthError::AlphabetMismatch);
    CHECK(kind_of("(s:x.end)*") == -1);
}

TEST_CASE("derivative bound") {
    Alphabet p = make_alphabet({sx(), e(), Action::tick()});
    auto r1 = check_derivative_bound(parse_property("(end)*"), p);
    CHECK(r1.m == 2);
    CHECK(r1.k == 0);
    CHECK(r1.bound == 2);
    CHECK(r1.ok);
    auto r2 = check_derivative_bound(parse_property("(end)* & (end)*"), p);
    CHECK(r2.m == 5);
    CHECK(r2.k == 1);
    CHECK(r2.bound == 25);
    CHECK(r2.ok);
}

TEST_CASE("synthesized languages match the oracle") {
    Alphabet p = parse_alphabet("s:a s:b a:c end tick");
    auto env = CombinatorEnv::from_alphabet(p, 3);
    for (const char* text :
         {"(s:a.end + s:b.a:c.end)*", "((s:a.end + s:b.end) & (s:a.end); tick.end)*", "(BE(s:a, 2))*",
          "(CBP(s:a, a:c, 1, 2))* & (BA(s:b, 1))*", "(BME({s:a, s:b}, 2))*", "(CASE{s:a: a:c.end, s:b: end})*",
          "(tick.end + s:a.(a:c.end + end))*"}) {
        CAPTURE(text);
        Global g = parse_property(text, &env);
        auto a = synthesize(g, p);
        CHECK_FALSE(bounded_diff(allowed_language(a), view(to_nfa(g)), p, 7));
        CHECK(check_derivative_bound(g, p).ok);
    }
}
