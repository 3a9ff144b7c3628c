#include "doctest.h"
#include "enforcemint/combinators.hpp"
#include "enforcemint/property.hpp"
#include "enforcemint/property_parser.hpp"
#include "helpers.hpp"

using namespace enforcemint;
using testing_util::tr;
using testing_util::traces;

namespace {
Action sx() { return Action::sensor("x"); }
Action sy() { return Action::sensor("y"); }
Action e() { return Action::end(); }

std::set<Trace> lang(Local p, std::size_t n) { return enumerate(to_nfa(p), n); }

CombinatorEnv env_xy(std::uint32_t maxa) { return CombinatorEnv::from_alphabet(make_alphabet({sx(), sy(), e()}), maxa); }
}  // namespace

TEST_CASE("power_upto") {
    CHECK(power_upto(make_alphabet({sx()}), 0) == prop::event(e()));
    CHECK(lang(power_upto(make_alphabet({sx()}), 1), 4) == traces({"end", "s:x end"}));
    CHECK(power_upto({}, 2) == prop::event(e()));
}

TEST_CASE("conditional") {
    Local c = conditional(CondKind::Cond, {{sx(), prop::event(e())}}, 1, env_xy(1));
    CHECK(lang(c, 3) == traces({"end", "s:x end", "s:y end"}));
    CHECK(well_formed(c));

    auto env = env_xy(2);
    Local body = bounded(BoundKind::Eventually, sy(), 1, env);
    Local cnd = conditional(CondKind::Cond, {{sx(), body}}, 1, env);
    Local pcnd = conditional(CondKind::Persistent, {{sx(), body}}, 1, env);
    CHECK_FALSE(bounded_diff(view(to_nfa(prop::star(cnd))), view(to_nfa(prop::star(pcnd))), env.pevents, 8));

    Local scan = conditional(CondKind::Case, {}, 1, env);
    CHECK(lang(scan, 3) == traces({"end", "s:x end", "s:y end", "s:x s:x end", "s:x s:y end", "s:y s:x end",
                                   "s:y s:y end"}));

    CHECK_THROWS_AS(conditional(CondKind::Persistent, {{sx(), body}}, 0, env), CombinatorError);
    CHECK_THROWS_AS(conditional(CondKind::Cond, {{e(), body}}, 1, env), CombinatorError);
    CHECK_THROWS_AS(conditional(CondKind::Cond, {{Action::tick(), body}}, 1, env), CombinatorError);
}

TEST_CASE("bounded") {
    CHECK(lang(bounded(BoundKind::Absence, sx(), 1, env_xy(2)), 3) == traces({"end", "s:y end", "s:y s:y end"}));
    CHECK(lang(bounded(BoundKind::Eventually, sx(), 1, env_xy(1)), 3).count(tr("s:x end")));
    CHECK_FALSE(lang(bounded(BoundKind::Persistency, sx(), 1, env_xy(1)), 3).count(tr("end")));
    CHECK_THROWS_AS(bounded(BoundKind::Eventually, sx(), 0, env_xy(1)), CombinatorError);
    for (std::uint32_t m = 1; m <= 3; ++m)
        for (auto k : {BoundKind::Eventually, BoundKind::Persistency, BoundKind::Absence}) {
            Local p = bounded(k, sx(), m, env_xy(2));
            CHECK(well_formed(p));
            CHECK(is_deterministic(p));
        }
}

TEST_CASE("cond_bounded reduces to its definitions") {
    auto env = env_xy(2);
    Local cbe = cond_bounded(BoundKind::Eventually, sx(), sy(), 1, 1, env);
    Local ref = conditional(CondKind::Cond, {{sx(), bounded(BoundKind::Eventually, sy(), 1, env)}}, 1, env);
    CHECK_FALSE(bounded_diff(view(to_nfa(prop::star(cbe))), view(to_nfa(prop::star(ref))), env.pevents, 8));

    Local cba = cond_bounded(BoundKind::Absence, sx(), sy(), 2, 3, env);
    Local ref2 = conditional(
        CondKind::Cond,
        {{sx(), repeat_then(power_upto(env.pevents, env.maxa), 1, bounded(BoundKind::Absence, sy(), 2, env))}}, 1,
        env);
    CHECK_FALSE(bounded_diff(view(to_nfa(prop::star(cba))), view(to_nfa(prop::star(ref2))), env.pevents, 8));

    CHECK_THROWS_AS(cond_bounded(BoundKind::Eventually, sx(), sy(), 0, 1, env), CombinatorError);
    CHECK_THROWS_AS(cond_bounded(BoundKind::Eventually, sx(), sy(), 3, 2, env), CombinatorError);
}

TEST_CASE("CBE over a channel and an actuator") {
    Alphabet p = parse_alphabet("c?close a:close_v s:h1 end tick");
    auto env = CombinatorEnv::from_alphabet(p, 4);
    Global g = prop::star(cond_bounded(BoundKind::Eventually, Action::parse("c?close"), Action::parse("a:close_v"), 1, 1, env));
    CHECK(lang_member(tr("c?close a:close_v end"), g));
    CHECK_FALSE(lang_member(tr("c?close end"), g));
}

TEST_CASE("duration families") {
    auto env = env_xy(1);
    Alphabet p = make_alphabet({sx(), sy(), Action::sensor("z"), e()});
    auto env3 = CombinatorEnv::from_alphabet(p, 1);
    Local mind = duration(DurKind::MinDur, sx(), sy(), std::nullopt, 1, 1, env);
    Local cbp = cond_bounded(BoundKind::Persistency, sx(), sy(), 1, 2, env);
    CHECK_FALSE(bounded_not_included(view(to_nfa(prop::star(cbp))), view(to_nfa(prop::star(mind))), env.pevents, 10));

    Action z = Action::sensor("z");
    Local br = duration(DurKind::Response, sx(), sy(), z, 1, 2, env3);
    Local ref = conditional(CondKind::Cond,
                            {{sx(), conditional(CondKind::Persistent, {{sy(), bounded(BoundKind::Eventually, z, 2, env3)}},
                                                1, env3)}},
                            1, env3);
    CHECK_FALSE(bounded_diff(view(to_nfa(prop::star(br))), view(to_nfa(prop::star(ref))), env3.pevents, 8));

    Local bi = duration(DurKind::Invariance, sx(), sy(), z, 1, 1, env3);
    Local bi_ref = conditional(
        CondKind::Cond,
        {{sx(), conditional(CondKind::Persistent, {{sy(), bounded(BoundKind::Persistency, z, 1, env3)}}, 1, env3)}}, 1,
        env3);
    CHECK_FALSE(bounded_diff(view(to_nfa(prop::star(bi))), view(to_nfa(prop::star(bi_ref))), env3.pevents, 8));

    CHECK_THROWS_AS(duration(DurKind::Response, sx(), sy(), std::nullopt, 1, 1, env3), CombinatorError);
}

TEST_CASE("mutual exclusion") {
    Alphabet p = parse_alphabet("a:open_v a:close_v s:l1 end tick");
    auto env = CombinatorEnv::from_alphabet(p, 4);
    Action o = Action::parse("a:open_v"), c = Action::parse("a:close_v");
    Global g = prop::star(mutual_exclusion({o, c}, 1, env));
    CHECK_FALSE(lang_member(tr("a:open_v a:close_v end"), g));
    CHECK(lang_member(tr("end"), g));
    CHECK(lang_member(tr("a:open_v end"), g));
    for (std::uint32_t m = 1; m <= 3; ++m)
        for (std::uint32_t k = 1; k <= 4; ++k)
            CHECK(well_formed(mutual_exclusion({o, c}, m, CombinatorEnv::from_alphabet(p, k))));
    CHECK_THROWS_AS(mutual_exclusion({o}, 1, env), CombinatorError);
}

TEST_CASE("expansion stays within the documented size bound") {
    auto env = env_xy(3);
    for (std::uint32_t m = 1; m <= 3; ++m)
        for (std::uint32_t n = m; n <= 4; ++n) {
            Local p = cond_bounded(BoundKind::Persistency, sx(), sy(), m, n, env);
            CHECK(dag_size(p) <= kExpansionConstant * (env.maxa + 1) * (m + n + 1) * env.pevents.size());
            CHECK(well_formed(p));
        }
}

TEST_CASE("sleeping shifts every trace by the leading ticks") {
    Local p = parse_property("(s:x.end + end)*")->body;
    for (std::uint32_t k = 1; k <= 3; ++k) {
        auto base = lang(p, 4);
        std::set<Trace> shifted;
        for (const auto& t : base) {
            Trace u(k - 1, Action::tick());
            u.insert(u.end(), t.begin(), t.end());
            shifted.insert(u);
        }
        auto got = lang(sleeping(k, p), 4 + k - 1);
        CHECK(got == shifted);
    }
}

TEST_CASE("combinators in the surface syntax") {
    Alphabet p = parse_alphabet("s:x s:y a:z end tick");
    auto env = CombinatorEnv::from_alphabet(p, 2);
    Global g = parse_property("(BE(s:x, 2))* & (CBP(s:x, a:z, 1, 2))* & (BME({s:x, s:y}, 1))*", &env);
    CHECK(well_formed(g));
    CHECK_THROWS_AS(parse_property("(BE(s:x, 2))*"), ParseError);
    CHECK_THROWS_AS(parse_property("(BE(s:x, 0))*", &env), ParseError);
    CHECK(parse_property("(CASE{s:x: end, s:y: tick.end})*", &env));
    CHECK(parse_property("(POW({s:x}, 2))*", &env));
    CHECK(parse_property("(SLEEP(2, s:x.end))*", &env));
}
