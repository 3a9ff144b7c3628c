#include "doctest.h"
#include "enforcemint/property_parser.hpp"
#include "enforcemint/runtime.hpp"
#include "enforcemint/synthesis.hpp"
#include "helpers.hpp"

using namespace enforcemint;
using testing_util::tr;

namespace {
std::shared_ptr<const Controller> ctrl(const char* text, bool raw = false) {
    return std::make_shared<const Controller>(parse_controller(text, raw));
}
std::shared_ptr<const EditAutomaton> aut(EditAutomaton a) { return std::make_shared<const EditAutomaton>(std::move(a)); }

Network single(std::shared_ptr<const EditAutomaton> a, std::shared_ptr<const Controller> c) {
    Network n;
    n.nodes.push_back({"plc", std::move(a), std::move(c)});
    return n;
}
}  // namespace

TEST_CASE("mstep allow, suppress and insert") {
    auto c = ctrl("X = tick . sens{ l1 -> act a:on1 . end . X } else end . X");
    Alphabet p = validate(*c).alphabet;
    auto go = Monitored::make(aut(EditAutomaton::go_automaton(p)), c);
    go.proc = ctrl_steps(go.proc, *c)[0].second;
    auto moves = mstep(go);
    bool saw = false;
    for (const auto& m : moves)
        if (m.action == Action::sensor("l1")) {
            saw = true;
            CHECK(m.rule == Rule::Allow);
        }
    CHECK(saw);

    // a one-state monitor that suppresses a:on1 and inserts a:close_v at end
    Alphabet q = make_alphabet({Action::actuator("on1"), Action::actuator("close_v"), Action::end(), Action::tick()});
    AutomatonBuilder b;
    int s = b.fresh(), t = b.fresh();
    b.add_arm(s, EditLabel::suppress(Action::actuator("on1")), s);
    b.add_arm(s, EditLabel::insert(Action::end(), Action::actuator("close_v")), t);
    b.add_arm(t, EditLabel::allow(Action::end()), t);
    auto a = aut(b.finish(s, q, false));

    Monitored m;
    m.aut = a;
    m.ctrl = c;
    m.state = a->initial;
    m.proc = proc::act(Action::actuator("on1"), proc::end("X"));
    auto sup = mstep(m);
    REQUIRE(sup.size() == 1);
    CHECK(sup[0].action.is_tau());
    CHECK(sup[0].rule == Rule::Suppress);
    CHECK(sup[0].proc == proc::end("X"));

    m.proc = proc::end("X");
    auto ins = mstep(m);
    REQUIRE(ins.size() == 1);
    CHECK(ins[0].action == Action::actuator("close_v"));
    CHECK(ins[0].rule == Rule::Insert);
    CHECK(ins[0].proc == m.proc);
    m.state = ins[0].state;
    auto after = mstep(m);
    REQUIRE(after.size() == 1);
    CHECK(after[0].rule == Rule::Allow);
}

TEST_CASE("network steps") {
    auto tx = ctrl("X = tick . out c!go . end . X else end . X");
    auto rx = ctrl("Y = tick . in{ c?go -> end . Y } else end . Y");
    Network n;
    n.nodes.push_back({"tx", nullptr, tx});
    n.nodes.push_back({"rx", nullptr, rx});
    NetState s = n.initial();
    auto t0 = n.steps(s);
    REQUIRE(t0.size() == 1);
    CHECK(t0[0].rule == Rule::TimeSync);
    s = t0[0].next;
    auto t1 = n.steps(s);
    bool sync = false, tick = false;
    for (const auto& st : t1) {
        sync |= st.rule == Rule::ChnSync;
        tick |= st.action.is_tick();
    }
    CHECK(sync);
    CHECK_FALSE(tick);
    CHECK(n.tau_enabled(s));

    Network one = single(nullptr, ctrl("X = tick . sens{ l1 -> end . X } else end . X"));
    NetState u = one.steps(one.initial())[0].next;
    bool l1 = false;
    for (const auto& st : one.steps(u)) l1 |= st.action == Action::sensor("l1");
    CHECK(l1);

    n.mode = ChannelMode::Closed;
    for (const auto& st : n.steps(s)) CHECK_FALSE(st.action.is_channel());
}

TEST_CASE("run") {
    auto c = ctrl("X = tick . end . X");
    Alphabet p = validate(*c).alphabet;
    auto log = run(single(aut(EditAutomaton::go_automaton(p)), c), {}, 2);
    CHECK(log.global == tr("tick end tick end"));
    CHECK_FALSE(log.stuck);
    CHECK(project(log, 0) == log.global);

    auto monitored = run(single(aut(synthesize(parse_property("(tick.end)*"), p)), c), {}, 3);
    auto plain = run(single(nullptr, c), {}, 3);
    CHECK(monitored.global == plain.global);
    CHECK(lang_member(monitored.global, parse_property("(tick.end)*")));

    // a:on3 is forbidden; the monitor suppresses it and closes the cycle
    auto bad = ctrl("X = tick . act a:on3 . end . X");
    Alphabet q = validate(*bad).alphabet;
    auto fixed = run(single(aut(synthesize(parse_property("(tick.end)*"), q)), bad), {}, 1);
    CHECK(fixed.rows.at(1).rule == Rule::Suppress);
    CHECK(erase_tau(fixed.global) == tr("tick end"));

    auto csv = to_csv(fixed);
    CHECK(csv.rfind("step,clock_tick,node,rule,action,inserted_for\n", 0) == 0);
    CHECK(csv.find(",suppress,") != std::string::npos);
}

TEST_CASE("insertion completes a cycle") {
    // the property wants a:on3 before end; the controller never sends it
    auto c = ctrl("X = tick . end . X");
    Alphabet q = make_alphabet({Action::actuator("on3"), Action::end(), Action::tick()});
    auto a = aut(synthesize(parse_property("(tick.a:on3.end)*"), q));
    auto log = run(single(a, c), {}, 1);
    CHECK(log.global == tr("tick a:on3 end"));
    REQUIRE(log.rows.size() == 3);
    CHECK(log.rows[1].rule == Rule::Insert);
    CHECK(log.rows[1].inserted_for == Action::end());
}

TEST_CASE("seeded runs are reproducible") {
    auto c = ctrl("X = tick . sens{ l1 -> end . X, h1 -> end . X } else end . X");
    SchedulerPolicy p{7, SchedulerPolicy::SeededRandom};
    auto a = run(single(nullptr, c), p, 20);
    auto b = run(single(nullptr, c), p, 20);
    CHECK(a.global == b.global);
    CHECK(a.timesync_with_tau == 0);
}

TEST_CASE("stuck networks are reported") {
    // a monitor that allows nothing the controller can do
    auto c = ctrl("X = tick . end . X");
    Alphabet q = make_alphabet({Action::sensor("x"), Action::end(), Action::tick()});
    AutomatonBuilder b;
    int s = b.fresh();
    b.add_arm(s, EditLabel::allow(Action::sensor("x")), s);
    auto log = run(single(aut(b.finish(s, q, false)), c), {}, 3);
    CHECK(log.stuck);
    CHECK(log.global.empty());
}
