#include "doctest.h"
#include "enforcemint/automaton.hpp"
#include "enforcemint/property_parser.hpp"
#include "enforcemint/synthesis.hpp"
#include "helpers.hpp"
#include "json.hpp"

using namespace enforcemint;
using testing_util::tr;

namespace {
Action sx() { return Action::sensor("x"); }
Action sy() { return Action::sensor("y"); }
Action ay() { return Action::actuator("y"); }
Action e() { return Action::end(); }

// one sum state with the given arms looping to itself
EditAutomaton single(std::vector<EditLabel> labels, const Alphabet& p) {
    AutomatonBuilder b;
    int s = b.fresh();
    for (const auto& l : labels) b.add_arm(s, l, s);
    return b.finish(s, p, false);
}
}  // namespace

TEST_CASE("enabled and step") {
    Alphabet p = make_alphabet({sx(), e()});
    auto go = EditAutomaton::go_automaton(p);
    auto en = enabled(go, go.initial);
    CHECK(en.size() == 2);
    CHECK(std::find(en.begin(), en.end(), EditLabel::allow(sx())) != en.end());
    CHECK(step(go, go.initial, EditLabel::allow(e())) == go.initial);

    auto sup = single({EditLabel::suppress(ay())}, p);
    CHECK(enabled(sup, sup.initial) == std::vector<EditLabel>{EditLabel::suppress(ay())});

    AutomatonBuilder b;
    int x = b.fresh("X"), z = b.fresh("Z"), g = b.fresh("G");
    b.set_go(g);
    b.add_arm(z, EditLabel::allow(sx()), g);
    b.alias(x, z);
    auto a = b.finish(x, p, false);
    CHECK(step(a, a.initial, EditLabel::allow(sx())) != a.initial);
    CHECK_THROWS_AS(step(a, a.initial, EditLabel::allow(Action::actuator("missing"))), AutomatonError);

    AutomatonBuilder b2;
    int r = b2.fresh("R"), gg = b2.fresh("G");
    b2.set_go(gg);
    b2.alias(r, gg);
    auto ag = b2.finish(r, p, false);
    CHECK(enabled(ag, ag.initial) == enabled(go, go.initial));
}

TEST_CASE("is_suppress_all") {
    Alphabet p = make_alphabet({sx(), ay(), e(), Action::tick()});
    CHECK(is_suppress_all(suppress_all_automaton(p), 0, p));
    auto go = EditAutomaton::go_automaton(p);
    CHECK_FALSE(is_suppress_all(go, go.initial, p));
    auto one = single({EditLabel::allow(sx()), EditLabel::suppress(ay())}, p);
    CHECK_FALSE(is_suppress_all(one, one.initial, p));
}

TEST_CASE("cross products") {
    Alphabet p = make_alphabet({sx(), sy(), e(), Action::tick()});
    auto a = synthesize(parse_property("(end)*"), p);
    auto prod = cross_product(a, a, p);
    auto ref = to_nfa(parse_property("(end)*"));
    CHECK_FALSE(bounded_diff(allowed_language(prod), view(ref), p, 6));

    auto ax = synthesize(parse_property("(s:x.end)*"), p);
    auto ay_ = synthesize(parse_property("(s:y.end)*"), p);
    auto none = cross_product(ax, ay_, p);
    CHECK(is_suppress_all(none, none.initial, p));
    for (const auto& arm : none.states[none.initial].arms) CHECK(arm.label.op == EditOp::Suppress);

    auto go = EditAutomaton::go_automaton(p);
    auto with_go = cross_product(ax, go, p);
    CHECK_FALSE(bounded_diff(allowed_language(with_go), allowed_language(ax), p, 6));

    auto two = synthesize(parse_property("(s:x.end + s:y.end)*"), p);
    auto both = cross_product(ax, two, p);
    CHECK(reachable_state_count(both) <= reachable_state_count(ax) * reachable_state_count(two));
}

TEST_CASE("a product keeps only cycles both factors can close") {
    // the left factor lets a cycle start with a that the right can only
    // follow by committing to a.end b.end, which the left never closes
    Alphabet p = make_alphabet({Action::sensor("a"), Action::sensor("b"), e(), Action::tick()});
    Global l = parse_property("(s:a.end + s:b.end.s:a.end)*");
    Global r = parse_property("(s:a.end + s:b.end)*");
    auto prod = cross_product(synthesize(l, p), synthesize(r, p), p);
    auto ref = product(to_nfa(l), to_nfa(r));
    CHECK_FALSE(bounded_diff(allowed_language(prod), view(ref), p, 8));
}

TEST_CASE("state counts") {
    Alphabet p = make_alphabet({sx(), e(), Action::tick()});
    CHECK(reachable_state_count(EditAutomaton::go_automaton(p)) == 1);
    CHECK(reachable_state_count(synthesize(parse_property("(end)*"), p)) <= 2);
}

TEST_CASE("json and dot export") {
    Alphabet p = make_alphabet({sx(), e()});
    auto go = EditAutomaton::go_automaton(p);
    auto j = nlohmann::json::parse(export_json(go));
    CHECK(j["states"].size() == 1);
    CHECK(j["states"].begin().value()["kind"] == "go");

    Alphabet q = make_alphabet({sx(), ay(), e(), Action::tick()});
    auto a = synthesize(parse_property("(s:x.end)*"), q);
    REQUIRE(a.size() == 2);
    std::string dot = export_dot(a);
    CHECK(dot.find("\"q0\" [") != std::string::npos);
    CHECK(dot.find("\"q1\" [") != std::string::npos);
    CHECK(dot.find("\"q2\" [") == std::string::npos);

    auto back = import_json(export_json(a));
    CHECK(structurally_equal(a, back));
    CHECK_THROWS_AS(import_json("{\"states\": 3}"), AutomatonError);
}
