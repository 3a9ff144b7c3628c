#include <algorithm>

#include "doctest.h"
#include "enforcemint/swat.hpp"
#include "helpers.hpp"

using namespace enforcemint;
using namespace enforcemint::swat;

namespace {

// Follows one controller path: at each step takes the move on `a`.
Proc follow(const Controller& c, Proc p, std::initializer_list<const char*> actions) {
    for (const char* a : actions) {
        Action want = Action::parse(a);
        Proc next = nullptr;
        for (const auto& [x, q] : ctrl_steps(p, c))
            if (x == want) next = q;
        REQUIRE_MESSAGE(next != nullptr, "no move on " << a);
        p = next;
    }
    return p;
}

std::vector<Action> offered(const Controller& c, Proc p) {
    std::vector<Action> out;
    for (const auto& [x, q] : ctrl_steps(p, c)) out.push_back(x);
    return out;
}

bool offers(const Controller& c, Proc p, const char* a) {
    auto v = offered(c, p);
    return std::find(v.begin(), v.end(), Action::parse(a)) != v.end();
}

Proc at(const Controller& c, const std::string& eq) {
    Proc p = c.lookup(eq);
    REQUIRE(p != nullptr);
    return p;
}

}  // namespace

TEST_CASE("plant dynamics") {
    PlantConfig cfg;
    PlantState s;
    s.level = {50, 50, 50};
    PlantState n = plant_tick(s, cfg);
    CHECK(n.level[0] == doctest::Approx(50));
    CHECK(n.level[1] == doctest::Approx(50 - cfg.drain2 / cfg.capacity[1] * 100));
    CHECK(n.level[2] > 50);

    s.pump1 = s.pump2 = true;
    CHECK(plant_tick(s, cfg).level[0] > 50);
    s.valve = true;
    CHECK(plant_tick(s, cfg).level[0] > 50);  // inflow beats the valve

    PlantState full;
    full.level = {50, 100, 50};
    full.valve = true;
    CHECK_FALSE(full.overflow[1]);
    PlantState after = plant_tick(full, cfg);
    CHECK(after.overflow[1]);
    after.valve = false;
    for (int i = 0; i < 50; ++i) after = plant_tick(after, cfg);
    CHECK(after.overflow[1]);  // latched
    CHECK(after.level[1] < 100);

    PlantState dry;
    dry.level = {50, 50, 1};
    dry.pump3 = true;
    CHECK(plant_tick(dry, cfg).pump3_dry);
    CHECK(plant_tick(dry, cfg).level[2] >= 0);
}

TEST_CASE("plant constraints are checked") {
    SensorThresholds t;
    PlantConfig ok;
    CHECK_NOTHROW(validate(ok, t));
    PlantConfig slow = ok;
    slow.in1 = slow.in2 = 0.5;
    CHECK_THROWS_AS(validate(slow, t), ScenarioError);
    PlantConfig big3 = ok;
    big3.capacity[2] = 50;
    CHECK_THROWS_AS(validate(big3, t), ScenarioError);
    SensorThresholds inverted;
    inverted.low[1] = 90;
    CHECK_THROWS_AS(validate(ok, inverted), ScenarioError);
}

TEST_CASE("sensor sampling and the boundary rule") {
    CHECK(signal_for(10, 20, 80) == 'l');
    CHECK(signal_for(50, 20, 80) == 'm');
    CHECK(signal_for(80, 20, 80) == 'm');
    CHECK(signal_for(20, 20, 80) == 'm');
    CHECK(signal_for(80.01, 20, 80) == 'h');

    PlantState s;
    s.level = {10, 50, 95};
    auto got = sample_sensors(s, SensorThresholds{});
    CHECK(got[0] == Action::sensor("l1"));
    CHECK(got[1] == Action::sensor("m2"));
    CHECK(got[2] == Action::sensor("h3"));

    CHECK(offset_reading(50, -30, 30, 80) == 'l');
    CHECK(offset_reading(95, -30, 20, 80) == 'm');
}

TEST_CASE("the three PLC programs") {
    Controller p1 = build_plc(1), p2 = build_plc(2), p3 = build_plc(3);
    CHECK(validate(p1).ok());
    CHECK(validate(p1).maxa == 7);
    CHECK(validate(p2).maxa == 4);
    CHECK(validate(p3).maxa == 4);

    // PLC1 at l1: both pumps on, valve closed
    Proc q = follow(p1, p1.start(), {"tick", "s:l1", "a:on1", "a:on2", "a:close_v", "end"});
    CHECK(q == proc::var("On"));

    // PLC2 filling at h2: a close request under timeout
    Proc r = follow(p2, p2.start(), {"tick", "s:h2"});
    CHECK(r->kind == PKind::ChanOut);
    CHECK(offers(p2, r, "c!close"));
    CHECK(offers(p2, r, "tick"));
    CHECK(follow(p2, r, {"c!close", "end"}) == proc::var("Down"));

    // PLC3 off at h3: pump on, then the on-equation
    CHECK(follow(p3, p3.start(), {"tick", "s:h3", "a:on3", "end"}) == proc::var("On"));

    // PLC1 without a request closes the valve after the timeout
    Proc w = follow(p1, p1.start(), {"tick", "s:m1", "tick", "a:off1", "a:off2", "a:close_v", "end"});
    CHECK(w == proc::var("Off"));
}

TEST_CASE("attack timings scale with the reference cycle counts") {
    AttackSpec a = AttackSpec::standard(1, 0.1);
    CHECK(a.target == 1);
    CHECK(a.silent == 500);
    AttackSpec b = AttackSpec::standard(3, 0.1);
    CHECK(b.periodic());
    CHECK(b.standby == 70);
    CHECK(b.active == 30);
    CHECK(AttackSpec::standard(5, 0.1).target == 3);
    CHECK(AttackSpec::standard(2, 1.0).silent == 5000);
    CHECK_THROWS_AS(AttackSpec::standard(6, 0.1), ScenarioError);
}

TEST_CASE("attack 1 drops valve closures after the silent phase") {
    AttackSpec a = AttackSpec::standard(1, 0.1);
    a.silent = 3;
    Controller c = apply_attack(build_plc(1), a, SensorThresholds{});
    CHECK(validate(c, true).time_guarded);
    CHECK(c.eqs.size() == 8);

    Proc before = follow(c, at(c, "Off_0"), {"tick", "s:l1", "a:on1", "a:on2"});
    CHECK(offers(c, before, "a:close_v"));
    Proc after = follow(c, at(c, "Off_3"), {"tick", "s:l1", "a:on1", "a:on2"});
    CHECK_FALSE(offers(c, after, "a:close_v"));
    CHECK(offers(c, after, "end"));
    // the compromised phase loops on itself
    CHECK(follow(c, after, {"end"}) == proc::var("On_3"));
}

TEST_CASE("attack 2 shifts PLC2's reading by the offset") {
    SensorThresholds t;
    t.low[1] = 30;
    AttackSpec a = AttackSpec::standard(2, 0.1);
    a.silent = 1;
    Controller c = apply_attack(build_plc(2), a, t);
    // emptying, a true m2 is read as l2 and asks to open
    Proc p = follow(c, at(c, "Down_1"), {"tick", "s:m2"});
    CHECK(offers(c, p, "c!open"));
    CHECK_FALSE(offers(c, p, "c!close"));
    // filling, a true h2 no longer asks to close
    Proc q = follow(c, at(c, "Up_1"), {"tick", "s:h2"});
    CHECK(offers(c, q, "c!open"));
    // before the attack starts the code is untouched
    CHECK(offers(c, follow(c, at(c, "Up_0"), {"tick", "s:h2"}), "c!close"));
}

TEST_CASE("attacks 3 and 4 alternate in their active phase") {
    AttackSpec a = AttackSpec::standard(3, 0.1);
    a.standby = 2;
    a.active = 2;
    Controller c = apply_attack(build_plc(1), a, SensorThresholds{});
    auto cmd = [&](const std::string& eq) {
        Proc p = follow(c, at(c, eq), {"tick", "s:m1", "c?open", "a:off1", "a:off2"});
        return offered(c, p).front();
    };
    CHECK(cmd("Off_0") == Action::actuator("open_v"));
    CHECK(cmd("Off_2") == Action::actuator("open_v"));
    CHECK(cmd("Off_3") == Action::actuator("close_v"));
    CHECK(follow(c, at(c, "Off_3"), {"tick", "s:m1", "c?open", "a:off1", "a:off2", "a:close_v", "end"}) ==
          proc::var("Off_0"));

    AttackSpec b = AttackSpec::standard(4, 0.1);
    b.standby = 1;
    b.active = 2;
    Controller d = apply_attack(build_plc(2), b, SensorThresholds{});
    CHECK(offers(d, follow(d, at(d, "Up_1"), {"tick", "s:m2"}), "c!open"));
    CHECK(offers(d, follow(d, at(d, "Up_2"), {"tick", "s:m2"}), "c!close"));
}

TEST_CASE("attack 5 turns pump3 on regardless of the level") {
    AttackSpec a = AttackSpec::standard(5, 0.1);
    a.silent = 1;
    Controller c = apply_attack(build_plc(3), a, SensorThresholds{});
    Proc p = follow(c, at(c, "Off_1"), {"tick", "s:l3"});
    CHECK(offered(c, p) == std::vector<Action>{Action::actuator("on3")});
    CHECK_THROWS_AS(apply_attack(build_plc(3), AttackSpec{}, SensorThresholds{}), ScenarioError);
}

TEST_CASE("property parameters keep the strict margins") {
    PlantConfig p;
    SensorThresholds t;
    DerivedParams d = derive_params(p, t, 0.1);
    CHECK(d.bme == 10);

    // T1 drained from high with pumps off and the valve open still reads
    // above low after m cycles
    PlantState s;
    s.level = {t.high[0], 50, 50};
    s.valve = true;
    for (std::uint32_t i = 0; i < d.m; ++i) s = plant_tick(s, p);
    CHECK(signal_for(s.level[0], t.low[0], t.high[0]) != 'l');

    PlantState r;
    r.level = {50, 50, t.low[2]};
    for (std::uint32_t i = 0; i < d.w_low; ++i) r = plant_tick(r, p);
    CHECK(signal_for(r.level[2], t.low[2], t.high[2]) != 'h');

    CHECK(substitute("CBP(s:l3, a:off3, 1, $w_low) $w $m $u $bme", d) ==
          "CBP(s:l3, a:off3, 1, " + std::to_string(d.w_low) + ") " + std::to_string(d.w) + " " +
              std::to_string(d.m) + " " + std::to_string(d.u) + " 10");
}

TEST_CASE("config files") {
    ScenarioConfig c = parse_config(R"(
plant:
  in1: 2.0
  initial: {levels: [40, 60, 30], valve: true}
thresholds:
  low: 25
run:
  horizon: 300
  enforce: [e3p]
  expect: {overflow_T2: false}
attack:
  id: 5
)");
    CHECK(c.plant.in1 == 2.0);
    CHECK(c.initial.level[1] == 60);
    CHECK(c.initial.valve);
    CHECK(c.thresholds.low[2] == 25);
    CHECK(c.horizon == 300);
    REQUIRE(c.attack);
    CHECK(c.attack->id == 5);
    CHECK(c.attack->silent == 500);
    CHECK(c.enforce == std::vector<std::string>{"e3p"});

    CHECK_THROWS_AS(parse_config("plant: [1, 2"), ScenarioError);
    CHECK_THROWS_AS(parse_config("plant: {flow: 3}"), ScenarioError);
    CHECK_THROWS_AS(parse_config("run: {enforce: [nope]}"), ScenarioError);
    CHECK_THROWS_AS(parse_config("run: {expect: {flooded: true}}"), ScenarioError);
    CHECK_THROWS_AS(parse_config("plant: {in1: 0.1, in2: 0.1}"), ScenarioError);
    CHECK_THROWS_AS(parse_config("attack: {id: 9}"), ScenarioError);
}

TEST_CASE("a property outside its PLC's alphabet is rejected") {
    ScenarioConfig c = default_config();
    c.properties["bad"] = {3, "(CBP(s:h1, a:off3, 1, 2))*"};
    c.enforce = {"bad"};
    c.horizon = 10;
    try {
        run_scenario(c);
        FAIL("expected a property error");
    } catch (const ScenarioError& e) {
        CHECK(e.kind == ScenarioError::Property);
        CHECK(e.cause == SynthError::AlphabetMismatch);
    }
}

TEST_CASE("baseline run stays within the thresholds") {
    ScenarioConfig c = default_config();
    ScenarioReport r = run_scenario(c);
    CHECK_FALSE(r.log.stuck);
    CHECK(r.log.ticks == c.horizon);
    CHECK(r.history.size() == c.horizon + 1);
    const double margin = 5;
    for (const auto& s : r.history)
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(s.level[i] >= c.thresholds.low[i] - margin);
            CHECK(s.level[i] <= c.thresholds.high[i] + margin);
        }
    CHECK(r.overflow == std::array<bool, 3>{});
    CHECK_FALSE(r.pump3_dry);
    CHECK(r.chattering == 0);
}

TEST_CASE("commands reach the plant at the next tick") {
    ScenarioConfig c = default_config();
    c.initial.level = {10, 50, 50};  // l1: PLC1 starts both pumps in the first cycle
    c.horizon = 3;
    ScenarioReport r = run_scenario(c);
    REQUIRE(r.history.size() >= 3);
    // slot 0 is the first tick; the reading happens in slot 1
    CHECK_FALSE(r.history[1].pump1);
    CHECK(r.history[2].pump1);
    CHECK(r.history[1].level[0] == doctest::Approx(10));
    CHECK(r.history[2].level[0] > 10);
}

TEST_CASE("enforcement on the baseline is transparent") {
    ScenarioConfig base = default_config();
    base.horizon = 1000;
    ScenarioReport plain = run_scenario(base);
    for (const char* name : {"e1", "e1p", "e2", "e3", "e3p"}) {
        CAPTURE(name);
        ScenarioConfig c = base;
        c.enforce = {name};
        ScenarioReport r = run_scenario(c);
        for (std::size_t i = 0; i < 3; ++i) {
            CHECK(r.suppressed[i] == 0);
            CHECK(r.inserted[i] == 0);
            CHECK(project(r.log, i) == project(plain.log, i));
        }
    }
    // the mutual exclusion window holds back a valve reversal until the
    // window closes; the plant stays safe
    ScenarioConfig c = base;
    c.enforce = {"e1pp"};
    ScenarioReport r = run_scenario(c);
    CHECK(r.suppressed[0] > 0);
    CHECK(r.overflow == std::array<bool, 3>{});
    CHECK(r.chattering == 0);
}

TEST_CASE("attack outcomes") {
    ScenarioConfig base = default_config();
    auto with = [&](int id, std::vector<std::string> props) {
        ScenarioConfig c = base;
        c.attack = AttackSpec::standard(id, c.scale);
        c.enforce = std::move(props);
        return run_scenario(c);
    };
    ScenarioReport a1 = with(1, {});
    CHECK(a1.overflow[1]);
    ScenarioReport a1e = with(1, {"e1", "e2", "e3"});
    CHECK(a1e.overflow[1]);  // e1 alone does not force the closure
    ScenarioReport a1p = with(1, {"e1p", "e2", "e3"});
    CHECK_FALSE(a1p.overflow[1]);
    CHECK(a1p.inserted[0] > 0);

    CHECK(with(3, {}).chattering > 0);
    ScenarioReport a3 = with(3, {"e1pp"});
    CHECK(a3.chattering == 0);
    CHECK(a3.suppressed[0] > 0);

    CHECK(with(5, {}).pump3_dry);
    ScenarioReport a5 = with(5, {"e3p"});
    CHECK_FALSE(a5.pump3_dry);
    CHECK(a5.inserted[2] > 0);
}

TEST_CASE("report outputs") {
    ScenarioConfig c = default_config();
    c.horizon = 5;
    c.expect = {{"overflow_T2", true}, {"stuck", false}};
    ScenarioReport r = run_scenario(c);
    CHECK(r.unmet == std::vector<std::string>{"overflow_T2"});
    std::string csv = r.levels_csv();
    CHECK(csv.rfind("tick,level_T1,level_T2,level_T3,pump1,pump2,pump3,valve\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 7);
    std::string js = r.summary_json();
    CHECK(js.find("\"chattering\"") != std::string::npos);
    CHECK(js.find("\"unmet_expectations\"") != std::string::npos);
}
