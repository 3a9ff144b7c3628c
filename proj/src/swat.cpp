#include "enforcemint/swat.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <fstream>
#include <functional>
#include <sstream>
#include <unordered_map>

#include <spdlog/spdlog.h>
#include <yaml-cpp/yaml.h>

#include "enforcemint/combinators.hpp"
#include "enforcemint/property_parser.hpp"
#include "enforcemint/synthesis.hpp"
#include "json.hpp"

namespace enforcemint::swat {

using nlohmann::json;

// ---------------------------------------------------------------- plant

void validate(const PlantConfig& p, const SensorThresholds& t) {
    auto fail = [](const std::string& m) { throw ScenarioError(ScenarioError::Config, m); };
    for (double c : p.capacity)
        if (!(c > 0)) fail("tank capacities must be positive");
    for (double r : {p.in1, p.in2, p.out_valve, p.drain2, p.divert2, p.back3})
        if (r < 0) fail("flow rates must be non-negative");
    if (!(p.in1 + p.in2 > p.out_valve))
        fail("inflow of T1 (in1 + in2) must exceed the outflow through the valve");
    if (p.divert2 > p.drain2) fail("divert2 cannot exceed drain2");
    for (std::size_t i = 0; i < 3; ++i)
        if (!(0 < t.low[i] && t.low[i] < t.high[i] && t.high[i] < 100))
            fail("thresholds of T" + std::to_string(i + 1) + " must satisfy 0 < low < high < 100");
    // T2 must take the whole of T3 even when it sits at its high mark
    if (p.capacity[1] * (100 - t.high[1]) / 100 < p.capacity[2])
        fail("T2 headroom above its high threshold must hold the whole of T3");
    if (p.overflow_margin < 0) fail("overflow_margin must be non-negative");
}

PlantState plant_tick(const PlantState& s, const PlantConfig& p) {
    std::array<double, 3> v;
    for (std::size_t i = 0; i < 3; ++i) v[i] = s.level[i] / 100 * p.capacity[i];

    double in = (s.pump1 ? p.in1 : 0) + (s.pump2 ? p.in2 : 0);
    double through = s.valve ? std::min(p.out_valve, v[0]) : 0;
    double back = s.pump3 ? std::min(p.back3, v[2]) : 0;
    double drain = std::min(p.drain2, v[1]);
    double divert = std::min(p.divert2, drain);

    PlantState n = s;
    v[0] += in - through;
    v[1] += through + back - drain;
    v[2] += divert - back;
    for (std::size_t i = 0; i < 3; ++i) {
        double lvl = v[i] / p.capacity[i] * 100;
        if (lvl > 100) n.overflow[i] = true;
        n.level[i] = std::clamp(lvl, 0.0, 100 + p.overflow_margin);
    }
    if (s.pump3 && s.level[2] < p.dry_level) n.pump3_dry = true;
    return n;
}

char signal_for(double level, double low, double high) {
    if (level < low) return 'l';
    if (level > high) return 'h';
    return 'm';
}

Action sensor_action(std::size_t tank, char signal) {
    return Action::sensor(std::string(1, signal) + std::to_string(tank + 1));
}

std::array<Action, 3> sample_sensors(const PlantState& s, const SensorThresholds& t) {
    std::array<Action, 3> out;
    for (std::size_t i = 0; i < 3; ++i) out[i] = sensor_action(i, signal_for(s.level[i], t.low[i], t.high[i]));
    return out;
}

char offset_reading(double level, double offset, double low, double high) {
    return signal_for(level + offset, low, high);
}

// ---------------------------------------------------------------- PLCs

std::string plc_source(int i) {
    switch (i) {
        case 1:
            return R"(# T1: two pumps in, valve out towards T2
Off = tick . sens{ l1 -> act a:on1 . act a:on2 . act a:close_v . end . On
                 , m1 -> in{ c?open  -> act a:off1 . act a:off2 . act a:open_v . end . Off
                           , c?close -> act a:off1 . act a:off2 . act a:close_v . end . Off }
                         else act a:off1 . act a:off2 . act a:close_v . end . Off
                 , h1 -> in{ c?open  -> act a:off1 . act a:off2 . act a:open_v . end . Off
                           , c?close -> act a:off1 . act a:off2 . act a:close_v . end . Off }
                         else act a:off1 . act a:off2 . act a:close_v . end . Off }
           else act a:off1 . act a:off2 . act a:close_v . end . Off
On  = tick . sens{ l1 -> act a:on1 . act a:on2 . act a:close_v . end . On
                 , m1 -> in{ c?open  -> act a:on1 . act a:on2 . act a:open_v . end . On
                           , c?close -> act a:on1 . act a:on2 . act a:close_v . end . On }
                         else act a:on1 . act a:on2 . act a:close_v . end . On
                 , h1 -> in{ c?open  -> act a:off1 . act a:off2 . act a:open_v . end . Off
                           , c?close -> act a:off1 . act a:off2 . act a:close_v . end . Off }
                         else act a:off1 . act a:off2 . act a:close_v . end . Off }
           else act a:off1 . act a:off2 . act a:close_v . end . On
)";
        case 2:
            return R"(# T2: asks PLC1 to open or close the valve
Up   = tick . sens{ l2 -> out c!open . end . Up else end . Up
                  , m2 -> out c!open . end . Up else end . Up
                  , h2 -> out c!close . end . Down else end . Up }
            else end . Up
Down = tick . sens{ l2 -> out c!open . end . Up else end . Down
                  , m2 -> out c!close . end . Down else end . Down
                  , h2 -> out c!close . end . Down else end . Down }
            else end . Down
)";
        case 3:
            return R"(# T3: backwash tank, pump3 returns water to T2
Off = tick . sens{ l3 -> act a:off3 . end . Off
                 , m3 -> act a:off3 . end . Off
                 , h3 -> act a:on3 . end . On }
           else act a:off3 . end . Off
On  = tick . sens{ l3 -> act a:off3 . end . Off
                 , m3 -> act a:on3 . end . On
                 , h3 -> act a:on3 . end . On }
           else act a:off3 . end . Off
)";
    }
    throw ScenarioError(ScenarioError::Config, "PLC index must be 1, 2 or 3");
}

Controller build_plc(int i) { return parse_controller(plc_source(i)); }

// ---------------------------------------------------------------- attacks

namespace {

std::uint32_t scaled(double cycles, double scale) {
    return static_cast<std::uint32_t>(std::max(1.0, std::round(cycles * scale)));
}

// Per-cycle rewriting of a controller body.
struct Patch {
    std::function<std::optional<Action>(Action)> act;  // nullopt drops the action
    std::function<Action(Action)> sensor;              // branch followed on a reading
};

class Rewriter {
public:
    Rewriter(const Patch& p, std::function<std::string(const std::string&)> rename)
        : patch_(p), rename_(std::move(rename)) {}

    Proc run(Proc p) {
        if (auto it = memo_.find(p); it != memo_.end()) return it->second;
        Proc r = nullptr;
        switch (p->kind) {
            case PKind::Var: r = proc::var(rename_(p->var)); break;
            case PKind::End: r = proc::end(rename_(p->var)); break;
            case PKind::Tick: r = proc::tick(run(p->next)); break;
            case PKind::Sens: {
                std::vector<std::pair<Action, Proc>> br;
                for (const auto& [s, body] : p->branches) {
                    Proc follow = body;
                    if (patch_.sensor) {
                        Action t = patch_.sensor(s);
                        for (const auto& [s2, b2] : p->branches)
                            if (s2 == t) follow = b2;
                    }
                    br.emplace_back(s, run(follow));
                }
                r = proc::sens(std::move(br), run(p->timeout));
                break;
            }
            case PKind::ChanIn: {
                std::vector<std::pair<Action, Proc>> br;
                for (const auto& [c, body] : p->branches) br.emplace_back(c, run(body));
                r = proc::chan_in(std::move(br), run(p->timeout));
                break;
            }
            case PKind::ChanOut: r = proc::chan_out(p->act, run(p->next), run(p->timeout)); break;
            case PKind::Act: {
                std::optional<Action> a = patch_.act ? patch_.act(p->act) : std::optional<Action>(p->act);
                r = a ? proc::act(*a, run(p->next)) : run(p->next);
                break;
            }
        }
        memo_.emplace(p, r);
        return r;
    }

private:
    const Patch& patch_;
    std::function<std::string(const std::string&)> rename_;
    std::unordered_map<Proc, Proc> memo_;
};

}  // namespace

AttackSpec AttackSpec::standard(int id, double scale) {
    // 100 ms scan cycles
    AttackSpec a;
    a.id = id;
    switch (id) {
        case 1: a.target = 1; break;
        case 2: a.target = 2; break;
        case 3: a.target = 1; break;
        case 4: a.target = 2; break;
        case 5: a.target = 3; break;
        default: throw ScenarioError(ScenarioError::Config, "unknown attack id " + std::to_string(id));
    }
    a.silent = scaled(5000, scale);
    a.standby = scaled(700, scale);
    a.active = scaled(300, scale);
    return a;
}

Controller apply_attack(const Controller& plc, const AttackSpec& a, const SensorThresholds& t) {
    if (a.id < 1 || a.id > 5) throw ScenarioError(ScenarioError::Config, "unknown attack id " + std::to_string(a.id));
    if (a.silent < 1 || a.standby < 1 || a.active < 1)
        throw ScenarioError(ScenarioError::Config, "attack timings must be at least one cycle");
    const std::size_t tank = static_cast<std::size_t>(a.target - 1);

    Patch idle;
    auto active_patch = [&](std::uint32_t parity) {
        Patch p;
        switch (a.id) {
            case 1:
                p.act = [](Action x) -> std::optional<Action> {
                    if (x == Action::actuator("close_v")) return std::nullopt;
                    return x;
                };
                break;
            case 2:
                p.sensor = [&t, tank, off = a.offset](Action s) {
                    // the three-way signal only tells the band; shift its midpoint
                    double lo = t.low[tank], hi = t.high[tank];
                    double mid = s.name()[0] == 'l' ? lo / 2 : s.name()[0] == 'h' ? (hi + 100) / 2 : (lo + hi) / 2;
                    return sensor_action(tank, offset_reading(mid, off, lo, hi));
                };
                break;
            case 3:
                p.act = [parity](Action x) -> std::optional<Action> {
                    if (x == Action::actuator("open_v") || x == Action::actuator("close_v"))
                        return Action::actuator(parity ? "close_v" : "open_v");
                    return x;
                };
                break;
            case 4:
                p.sensor = [tank, parity](Action) { return sensor_action(tank, parity ? 'h' : 'l'); };
                break;
            case 5:
                p.act = [](Action x) -> std::optional<Action> {
                    if (x == Action::actuator("off3")) return Action::actuator("on3");
                    return x;
                };
                break;
        }
        return p;
    };

    // counter layout: one-shot attacks idle for `silent` cycles and then stay
    // active; periodic ones cycle through standby then active forever
    const std::uint32_t len = a.periodic() ? a.standby + a.active : a.silent + 1;
    const std::uint32_t loop = a.periodic() ? 0 : a.silent;
    auto name = [](const std::string& base, std::uint32_t c) { return base + "_" + std::to_string(c); };

    Controller out;
    for (std::uint32_t c = 0; c < len; ++c) {
        std::uint32_t next = c + 1 < len ? c + 1 : loop;
        bool on = a.periodic() ? c >= a.standby : c >= a.silent;
        Patch p = on ? active_patch(a.periodic() ? (c - a.standby) % 2 : 0) : idle;
        Rewriter rw(p, [&](const std::string& v) { return name(v, next); });
        for (const auto& [eq, body] : plc.eqs) out.define(name(eq, c), rw.run(body));
    }
    return out;
}

// ---------------------------------------------------------------- properties

DerivedParams derive_params(const PlantConfig& p, const SensorThresholds& t, double scale) {
    // ticks until tank `i`, started at `from`, reads `target`
    auto cycles_until = [&](PlantState s, std::size_t i, char target) {
        for (std::uint32_t n = 1; n < 100000; ++n) {
            s = plant_tick(s, p);
            if (signal_for(s.level[i], t.low[i], t.high[i]) == target) return n;
        }
        throw ScenarioError(ScenarioError::Config,
                            "T" + std::to_string(i + 1) + " never reaches the bound used to size its property");
    };
    auto minus_one = [](std::uint32_t n) { return std::max<std::uint32_t>(1, n - 1); };
    DerivedParams d;

    PlantState s;
    s.level = {t.high[0], 50, 50};
    s.valve = true;
    d.m = minus_one(cycles_until(s, 0, 'l'));

    s = PlantState{};
    s.level = {50, t.high[1], 50};
    d.u = minus_one(cycles_until(s, 1, 'l'));

    s = PlantState{};
    s.level = {50, 50, t.high[2]};
    s.pump3 = true;
    d.w = minus_one(cycles_until(s, 2, 'l'));

    s = PlantState{};
    s.level = {50, 50, t.low[2]};
    d.w_low = minus_one(cycles_until(s, 2, 'h'));

    d.bme = scaled(100, scale);  // the 100-cycle window, scaled like the timings
    return d;
}

std::string substitute(const std::string& text, const DerivedParams& d) {
    // longest names first so $w does not eat $w_low
    const std::vector<std::pair<std::string, std::uint32_t>> vars{
        {"$w_low", d.w_low}, {"$bme", d.bme}, {"$m", d.m}, {"$u", d.u}, {"$w", d.w}};
    std::string out = text;
    for (const auto& [k, v] : vars) {
        std::size_t pos = 0;
        while ((pos = out.find(k, pos)) != std::string::npos) {
            out.replace(pos, k.size(), std::to_string(v));
            pos += std::to_string(v).size();
        }
    }
    return out;
}

namespace {

std::map<std::string, PropertySpec> builtin_properties() {
    const std::string e1 = "(CBP(s:h1, a:off1, 1, $m))* & (CBP(s:h1, a:off2, 1, $m))*";
    return {
        {"e1", {1, e1}},
        {"e1p", {1, e1 + " & (CBE(c?close, a:close_v, 1, 1))*"}},
        {"e1pp", {1, "(BME({a:open_v, a:close_v}, $bme))*"}},
        {"e2", {2, "(CBP(s:h2, c!close, 1, $u))*"}},
        {"e3", {3, "(CBP(s:h3, a:on3, 1, $w))*"}},
        {"e3p", {3, "(CBP(s:l3, a:off3, 1, $w_low))*"}},
    };
}

}  // namespace

std::vector<std::string> designated_properties(int attack) {
    switch (attack) {
        case 1:
        case 2: return {"e1p", "e2", "e3"};
        case 3:
        case 4: return {"e1pp"};
        case 5: return {"e3p"};
    }
    throw ScenarioError(ScenarioError::Config, "unknown attack id " + std::to_string(attack));
}

ScenarioConfig default_config() {
    ScenarioConfig c;
    c.properties = builtin_properties();
    return c;
}

// ---------------------------------------------------------------- config files

namespace {

[[noreturn]] void bad(const std::string& m) { throw ScenarioError(ScenarioError::Config, m); }

template <class T>
T get(const YAML::Node& n, const char* key, T fallback) {
    if (!n || !n[key]) return fallback;
    try {
        return n[key].as<T>();
    } catch (const YAML::Exception&) {
        bad(std::string("bad value for '") + key + "'");
    }
}

std::array<double, 3> triple(const YAML::Node& n, const char* key, std::array<double, 3> fallback) {
    if (!n || !n[key]) return fallback;
    const YAML::Node& v = n[key];
    if (v.IsScalar()) {
        double x = get<double>(n, key, 0);
        return {x, x, x};
    }
    if (!v.IsSequence() || v.size() != 3) bad(std::string("'") + key + "' needs one value or three");
    std::array<double, 3> out;
    try {
        for (std::size_t i = 0; i < 3; ++i) out[i] = v[i].as<double>();
    } catch (const YAML::Exception&) {
        bad(std::string("bad value for '") + key + "'");
    }
    return out;
}

void only_keys(const YAML::Node& n, const char* section, std::initializer_list<const char*> keys) {
    if (!n) return;
    if (!n.IsMap()) bad(std::string("section '") + section + "' must be a map");
    for (const auto& kv : n) {
        auto k = kv.first.as<std::string>();
        if (std::none_of(keys.begin(), keys.end(), [&](const char* x) { return k == x; }))
            bad(std::string("unknown key '") + k + "' in section '" + section + "'");
    }
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        bad(std::string("malformed YAML: ") + e.what());
    }
    if (!root.IsMap()) bad("config must be a map with sections plant, thresholds, plcs, properties, attack, run");
    only_keys(root, "top level", {"plant", "thresholds", "plcs", "properties", "attack", "run"});

    ScenarioConfig c = default_config();
    const YAML::Node plant = root["plant"];
    only_keys(plant, "plant",
              {"capacity", "in1", "in2", "out_valve", "drain2", "divert2", "back3", "overflow_margin", "dry_level",
               "initial"});
    PlantConfig& p = c.plant;
    p.capacity = triple(plant, "capacity", p.capacity);
    p.in1 = get(plant, "in1", p.in1);
    p.in2 = get(plant, "in2", p.in2);
    p.out_valve = get(plant, "out_valve", p.out_valve);
    p.drain2 = get(plant, "drain2", p.drain2);
    p.divert2 = get(plant, "divert2", p.divert2);
    p.back3 = get(plant, "back3", p.back3);
    p.overflow_margin = get(plant, "overflow_margin", p.overflow_margin);
    p.dry_level = get(plant, "dry_level", p.dry_level);
    if (plant && plant["initial"]) {
        const YAML::Node init = plant["initial"];
        only_keys(init, "plant.initial", {"levels", "pump1", "pump2", "pump3", "valve"});
        c.initial.level = triple(init, "levels", c.initial.level);
        c.initial.pump1 = get(init, "pump1", false);
        c.initial.pump2 = get(init, "pump2", false);
        c.initial.pump3 = get(init, "pump3", false);
        c.initial.valve = get(init, "valve", false);
    }

    const YAML::Node th = root["thresholds"];
    only_keys(th, "thresholds", {"low", "high"});
    c.thresholds.low = triple(th, "low", c.thresholds.low);
    c.thresholds.high = triple(th, "high", c.thresholds.high);

    const YAML::Node plcs = root["plcs"];
    only_keys(plcs, "plcs", {"channels", "source"});
    std::string mode = get<std::string>(plcs, "channels", "lossy");
    if (mode == "open") c.channels = ChannelMode::Open;
    else if (mode == "lossy") c.channels = ChannelMode::Lossy;
    else if (mode == "closed") c.channels = ChannelMode::Closed;
    else bad("plcs.channels must be open, lossy or closed");
    if (plcs && plcs["source"]) {
        for (const auto& kv : plcs["source"]) {
            int i = kv.first.as<int>();
            if (i < 1 || i > 3) bad("plcs.source keys must be 1, 2 or 3");
            c.plc_override[i] = kv.second.as<std::string>();
        }
    }

    if (const YAML::Node props = root["properties"]) {
        if (!props.IsMap()) bad("section 'properties' must be a map");
        for (const auto& kv : props) {
            only_keys(kv.second, "properties entry", {"plc", "text"});
            PropertySpec s;
            s.plc = get(kv.second, "plc", 0);
            s.text = get<std::string>(kv.second, "text", "");
            if (s.plc < 1 || s.plc > 3) bad("property " + kv.first.as<std::string>() + " needs plc: 1, 2 or 3");
            if (s.text.empty()) bad("property " + kv.first.as<std::string>() + " has no text");
            c.properties[kv.first.as<std::string>()] = s;
        }
    }

    const YAML::Node run = root["run"];
    only_keys(run, "run", {"horizon", "seed", "scale", "scheduler", "enforce", "expect"});
    c.horizon = get<std::uint64_t>(run, "horizon", c.horizon);
    c.scale = get(run, "scale", c.scale);
    if (!(c.scale > 0)) bad("run.scale must be positive");
    c.scheduler.seed = get<std::uint64_t>(run, "seed", 0);
    std::string sched = get<std::string>(run, "scheduler", "first");
    if (sched == "first") c.scheduler.tie_break = SchedulerPolicy::FirstDeclared;
    else if (sched == "random") c.scheduler.tie_break = SchedulerPolicy::SeededRandom;
    else bad("run.scheduler must be first or random");
    if (run && run["enforce"]) {
        if (!run["enforce"].IsSequence()) bad("run.enforce must be a list of property names");
        for (const auto& n : run["enforce"]) c.enforce.push_back(n.as<std::string>());
    }
    if (run && run["expect"]) {
        if (!run["expect"].IsMap()) bad("run.expect must be a map");
        for (const auto& kv : run["expect"]) {
            try {
                c.expect[kv.first.as<std::string>()] = kv.second.as<bool>();
            } catch (const YAML::Exception&) {
                bad("run.expect values must be booleans");
            }
        }
    }

    // attack last: its reference timings depend on the scale
    if (const YAML::Node at = root["attack"]) {
        only_keys(at, "attack", {"id", "silent", "standby", "active", "offset"});
        int id = get(at, "id", 0);
        if (id != 0) {
            AttackSpec a = AttackSpec::standard(id, c.scale);
            a.silent = get(at, "silent", a.silent);
            a.standby = get(at, "standby", a.standby);
            a.active = get(at, "active", a.active);
            a.offset = get(at, "offset", a.offset);
            c.attack = a;
        }
    }

    for (const auto& name : c.enforce)
        if (!c.properties.count(name)) bad("run.enforce names unknown property '" + name + "'");
    for (const auto& [k, v] : c.expect) {
        ScenarioReport probe;
        if (!report_flag(probe, k, c.attack ? c.attack->id : 0))
            bad("run.expect: unknown key '" + k + "'");
    }
    validate(c.plant, c.thresholds);
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) bad("cannot read " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

// ---------------------------------------------------------------- running

ScenarioReport run_scenario(const ScenarioConfig& cfg) {
    validate(cfg.plant, cfg.thresholds);
    ScenarioReport rep;
    rep.params = derive_params(cfg.plant, cfg.thresholds, cfg.scale);

    std::array<Controller, 3> base;
    for (int i = 1; i <= 3; ++i) {
        auto it = cfg.plc_override.find(i);
        try {
            base[i - 1] = it == cfg.plc_override.end() ? build_plc(i) : parse_controller(it->second);
        } catch (const ParseError& e) {
            bad("PLC" + std::to_string(i) + ": " + e.what());
        }
    }
    std::array<ValidationReport, 3> info;
    for (std::size_t i = 0; i < 3; ++i) {
        info[i] = enforcemint::validate(base[i]);
        if (!info[i].ok()) bad("PLC" + std::to_string(i + 1) + " does not validate");
    }

    // properties enforced on the same PLC are conjoined into one monitor
    std::array<Global, 3> conj{};
    for (const auto& name : cfg.enforce) {
        auto it = cfg.properties.find(name);
        if (it == cfg.properties.end()) bad("unknown property '" + name + "'");
        std::size_t i = static_cast<std::size_t>(it->second.plc - 1);
        CombinatorEnv env = CombinatorEnv::from_alphabet(info[i].alphabet, info[i].maxa);
        Global g = nullptr;
        try {
            g = parse_property(substitute(it->second.text, rep.params), &env);
        } catch (const ParseError& e) {
            throw ScenarioError(ScenarioError::Config, name + ": " + e.what());
        } catch (const SynthError& e) {
            throw ScenarioError(e.kind, name + ": " + e.what());
        }
        conj[i] = conj[i] ? prop::inter(conj[i], g) : g;
    }

    Network net;
    net.mode = cfg.channels;
    for (std::size_t i = 0; i < 3; ++i) {
        NetNode node;
        node.name = "plc" + std::to_string(i + 1);
        Controller c = base[i];
        if (cfg.attack && cfg.attack->target == static_cast<int>(i + 1)) c = apply_attack(c, *cfg.attack, cfg.thresholds);
        node.ctrl = std::make_shared<const Controller>(std::move(c));
        if (conj[i]) {
            try {
                auto aut = std::make_shared<const EditAutomaton>(synthesize(conj[i], info[i].alphabet));
                rep.automaton_states[node.name] = reachable_state_count(*aut);
                node.aut = std::move(aut);
            } catch (const SynthError& e) {
                throw ScenarioError(e.kind, node.name + ": " + e.what());
            }
        }
        net.nodes.push_back(std::move(node));
    }

    PlantState plant = cfg.initial;
    PlantState latch = plant;  // actuator commands of the current slot
    std::array<Action, 3> sensors = sample_sensors(plant, cfg.thresholds);
    rep.history.push_back(plant);
    std::deque<std::uint64_t> recent;  // ticks of recent valve toggles

    RunHooks hooks;
    hooks.sensor_available = [&](std::size_t i, Action a) { return i < 3 && a == sensors[i]; };
    hooks.on_step = [&](const NetStep& st) {
        if (st.rule == Rule::TimeSync) {
            plant.pump1 = latch.pump1;
            plant.pump2 = latch.pump2;
            plant.pump3 = latch.pump3;
            bool was_open = plant.valve;
            plant.valve = latch.valve;
            if (plant.valve != was_open) {
                std::uint64_t now = st.next.clock;
                ++rep.valve_toggles;
                recent.push_back(now);
                while (!recent.empty() && recent.front() + rep.params.bme <= now) recent.pop_front();
                if (recent.size() >= 3) ++rep.chattering;
            }
            plant = plant_tick(plant, cfg.plant);
            sensors = sample_sensors(plant, cfg.thresholds);
            rep.history.push_back(plant);
            return;
        }
        for (const auto& m : st.moves) {
            if (m.node < 3) {
                if (m.move.rule == Rule::Suppress) ++rep.suppressed[m.node];
                if (m.move.rule == Rule::Insert) ++rep.inserted[m.node];
            }
            Action a = m.move.action;
            if (a.kind() != Kind::Actuator) continue;
            const std::string& n = a.name();
            if (n == "on1") latch.pump1 = true;
            else if (n == "off1") latch.pump1 = false;
            else if (n == "on2") latch.pump2 = true;
            else if (n == "off2") latch.pump2 = false;
            else if (n == "on3") latch.pump3 = true;
            else if (n == "off3") latch.pump3 = false;
            else if (n == "open_v") latch.valve = true;
            else if (n == "close_v") latch.valve = false;
        }
    };

    rep.log = run(net, cfg.scheduler, cfg.horizon, hooks);
    rep.overflow = plant.overflow;
    rep.pump3_dry = plant.pump3_dry;

    int attack = cfg.attack ? cfg.attack->id : 0;
    for (const auto& [k, want] : cfg.expect) {
        auto got = report_flag(rep, k, attack);
        if (!got || *got != want) rep.unmet.push_back(k);
    }
    spdlog::debug("scenario attack {} enforce {}: overflow T2 {}, chattering {}, dry {}", attack, cfg.enforce.size(),
                  rep.overflow[1], rep.chattering, rep.pump3_dry);
    return rep;
}

bool damage_indicator(int attack, const ScenarioReport& r) {
    switch (attack) {
        case 1:
        case 2: return r.overflow[1];
        case 3:
        case 4: return r.chattering > 0;
        case 5: return r.pump3_dry;
    }
    return false;
}

std::optional<bool> report_flag(const ScenarioReport& r, const std::string& key, int attack) {
    if (key == "overflow_T1") return r.overflow[0];
    if (key == "overflow_T2") return r.overflow[1];
    if (key == "overflow_T3") return r.overflow[2];
    if (key == "pump3_dry") return r.pump3_dry;
    if (key == "chattering") return r.chattering > 0;
    if (key == "stuck") return r.log.stuck;
    if (key == "mitigated") {
        std::size_t n = 0;
        for (std::size_t i = 0; i < 3; ++i) n += r.suppressed[i] + r.inserted[i];
        return n > 0;
    }
    if (key == "damage") return damage_indicator(attack, r);
    return std::nullopt;
}

std::string ScenarioReport::levels_csv() const {
    std::ostringstream os;
    os << "tick,level_T1,level_T2,level_T3,pump1,pump2,pump3,valve\n";
    for (std::size_t t = 0; t < history.size(); ++t) {
        const PlantState& s = history[t];
        os << t << ',' << s.level[0] << ',' << s.level[1] << ',' << s.level[2] << ',' << s.pump1 << ',' << s.pump2 << ','
           << s.pump3 << ',' << s.valve << '\n';
    }
    return os.str();
}

std::string ScenarioReport::summary_json() const {
    json j;
    j["ticks"] = log.ticks;
    j["stuck"] = log.stuck;
    j["diverged"] = log.diverged;
    j["timesync_with_tau"] = log.timesync_with_tau;
    j["overflow"] = {{"T1", overflow[0]}, {"T2", overflow[1]}, {"T3", overflow[2]}};
    j["pump3_dry"] = pump3_dry;
    j["valve_toggles"] = valve_toggles;
    j["chattering"] = chattering;
    json mit = json::object();
    for (std::size_t i = 0; i < 3; ++i)
        mit["plc" + std::to_string(i + 1)] = {{"suppressed", suppressed[i]}, {"inserted", inserted[i]}};
    j["mitigations"] = mit;
    j["params"] = {{"m", params.m}, {"u", params.u}, {"w", params.w}, {"w_low", params.w_low}, {"bme", params.bme}};
    j["automaton_states"] = automaton_states;
    j["unmet_expectations"] = unmet;
    return j.dump(2);
}

}  // namespace enforcemint::swat
