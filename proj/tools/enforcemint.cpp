// enforcemint: monitor synthesis, trace checking, simulation and the water
// treatment scenario from the command line.
//
// Exit codes (stable):
//   0  success
//   1  unreadable input, parse error or malformed config
//   2  ill-formed or nondeterministic property
//   3  property event outside the alphabet
//   4  trace contains tau
//   5  trace violates the property
//   6  scenario expectations not met

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "enforcemint/automaton.hpp"
#include "enforcemint/combinators.hpp"
#include "enforcemint/controller.hpp"
#include "enforcemint/explore.hpp"
#include "enforcemint/nfa.hpp"
#include "enforcemint/property.hpp"
#include "enforcemint/property_parser.hpp"
#include "enforcemint/runtime.hpp"
#include "enforcemint/swat.hpp"
#include "enforcemint/synthesis.hpp"

using namespace enforcemint;
namespace fs = std::filesystem;

namespace {

enum Exit : int {
    Ok = 0,
    InputError = 1,
    BadProperty = 2,
    AlphabetMismatch = 3,
    TauInTrace = 4,
    Violation = 5,
    Unmet = 6,
};

// Thrown by the commands; main turns it into a message and an exit code.
struct Failure {
    int code;
    std::string message;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Failure{InputError, "cannot read " + path};
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Failure{InputError, "cannot write " + path};
    out << text;
}

int synth_code(SynthError::Kind k) {
    return k == SynthError::AlphabetMismatch ? AlphabetMismatch : BadProperty;
}

const char* synth_hint(SynthError::Kind k) {
    switch (k) {
        case SynthError::IllFormed:
            return "well-formed properties end every branch with `end`, so each cycle completes";
        case SynthError::Nondeterministic:
            return "deterministic properties have pairwise distinct first events in every choice";
        case SynthError::AlphabetMismatch:
            return "every event of the property must belong to the controller alphabet";
    }
    return "";
}

// Parse failures and synthesis rejections of one property file.
template <class F>
auto guarded(const std::string& what, F&& f) -> decltype(f()) {
    try {
        return f();
    } catch (const ParseError& e) {
        throw Failure{InputError, what + ": " + e.what()};
    } catch (const SynthError& e) {
        throw Failure{synth_code(e.kind), what + ": " + e.what() + " (" + synth_hint(e.kind) + ")"};
    } catch (const ControllerError& e) {
        throw Failure{InputError, what + ": " + e.what()};
    } catch (const std::invalid_argument& e) {
        throw Failure{InputError, what + ": " + e.what()};
    }
}

Alphabet load_alphabet(const std::string& path) {
    return guarded(path, [&] { return parse_alphabet(read_file(path)); });
}

Global load_property(const std::string& path, const CombinatorEnv* env) {
    std::string text = read_file(path);
    return guarded(path, [&] { return parse_property(text, env); });
}

// ---------------------------------------------------------------- synth

struct SynthArgs {
    std::string property, alphabet, out, format = "json";
    std::uint32_t maxa = 1;
};

int cmd_synth(const SynthArgs& a) {
    Alphabet p = load_alphabet(a.alphabet);
    CombinatorEnv env = guarded(a.alphabet, [&] { return CombinatorEnv::from_alphabet(p, a.maxa); });
    Global e = load_property(a.property, &env);
    EditAutomaton aut = guarded(a.property, [&] { return synthesize(e, p); });
    BoundReport b = guarded(a.property, [&] { return check_derivative_bound(e, p); });
    write_output(a.out, a.format == "dot" ? export_dot(aut) : export_json(aut) + "\n");
    std::cerr << "states " << b.states << ", bound m^(k+1) = " << b.m << "^" << (b.k + 1) << " = " << b.bound
              << (b.ok ? "" : " EXCEEDED") << "\n";
    return Ok;
}

// ---------------------------------------------------------------- check

struct CheckArgs {
    std::string trace, property, alphabet;
    std::uint32_t maxa = 1;
};

int cmd_check(const CheckArgs& a) {
    Trace t = guarded(a.trace, [&] { return parse_trace(read_file(a.trace)); });
    for (std::size_t i = 0; i < t.size(); ++i)
        if (t[i].is_tau())
            throw Failure{TauInTrace, a.trace + ": tau at position " + std::to_string(i + 1) +
                                          "; erase internal actions before checking"};
    std::optional<CombinatorEnv> env;
    if (!a.alphabet.empty()) {
        Alphabet p = load_alphabet(a.alphabet);
        env = guarded(a.alphabet, [&] { return CombinatorEnv::from_alphabet(p, a.maxa); });
    }
    Global e = load_property(a.property, env ? &*env : nullptr);
    PropNfa n = to_nfa(e);
    if (lang_member(t, n)) {
        std::cout << "member\n";
        return Ok;
    }
    if (lang_prefix(t, n)) {
        std::cout << "prefix: the trace is a strict prefix of a trace of the property\n";
        return Ok;
    }
    // longest prefix still inside the prefix closure
    std::size_t ok = 0;
    for (std::size_t k = 1; k <= t.size(); ++k) {
        if (!lang_prefix(Trace(t.begin(), t.begin() + static_cast<std::ptrdiff_t>(k)), n)) break;
        ok = k;
    }
    std::cout << "violation at position " << ok + 1 << " (" << t[ok].str() << ")\n";
    return Violation;
}

// ---------------------------------------------------------------- simulate

struct SimArgs {
    std::string controller, property, out, format = "csv";
    std::uint64_t horizon = 20;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint32_t> maxa;
    bool raw = false;
};

int cmd_simulate(const SimArgs& a) {
    std::string text = read_file(a.controller);
    Controller c = guarded(a.controller, [&] { return parse_controller(text, a.raw); });
    ValidationReport v = validate(c, a.raw);
    if (!v.ok()) {
        std::string msg = a.controller + ": controller does not validate";
        for (const auto& e : v.errors) msg += "\n  " + e;
        if (!v.time_guarded) msg += "\n  some equation is not guarded by tick";
        throw Failure{InputError, msg};
    }
    NetNode node{"ctrl", nullptr, std::make_shared<const Controller>(std::move(c))};
    if (!a.property.empty()) {
        CombinatorEnv env = guarded(a.property, [&] { return CombinatorEnv::from_alphabet(v.alphabet, a.maxa.value_or(v.maxa)); });
        Global e = load_property(a.property, &env);
        node.aut = std::make_shared<const EditAutomaton>(guarded(a.property, [&] { return synthesize(e, v.alphabet); }));
    }
    Network net;
    net.mode = ChannelMode::Open;
    net.nodes.push_back(node);
    SchedulerPolicy pol;
    if (a.seed) {
        pol.tie_break = SchedulerPolicy::SeededRandom;
        pol.seed = *a.seed;
    }
    TraceLog log = run(net, pol, a.horizon);
    std::size_t sup = 0, ins = 0;
    for (const auto& r : log.rows) {
        sup += r.rule == Rule::Suppress;
        ins += r.rule == Rule::Insert;
    }
    if (a.format == "text") {
        std::ostringstream os;
        os << to_string(erase_tau(project(log, 0))) << "\n";
        write_output(a.out, os.str());
    } else {
        write_output(a.out, to_csv(log));
    }
    std::cerr << "ticks " << log.ticks << ", steps " << log.rows.size() << ", suppressed " << sup << ", inserted "
              << ins << (log.stuck ? ", stuck" : "") << "\n";
    return Ok;
}

// ---------------------------------------------------------------- scenario

struct ScenarioArgs {
    std::string config, out = ".";
    std::optional<std::uint64_t> horizon, seed;
    std::optional<double> scale;
    std::optional<int> attack;
    std::optional<std::string> enforce;
    std::string format = "text";
};

int cmd_scenario(const ScenarioArgs& a) {
    try {
        swat::ScenarioConfig cfg = swat::load_config(a.config);
        if (a.scale) {
            cfg.scale = *a.scale;
            if (cfg.attack) cfg.attack = swat::AttackSpec::standard(cfg.attack->id, cfg.scale);
        }
        if (a.attack) {
            if (*a.attack == 0) cfg.attack.reset();
            else cfg.attack = swat::AttackSpec::standard(*a.attack, cfg.scale);
        }
        if (a.horizon) cfg.horizon = *a.horizon;
        if (a.seed) {
            cfg.scheduler.seed = *a.seed;
            cfg.scheduler.tie_break = SchedulerPolicy::SeededRandom;
        }
        if (a.enforce) {
            cfg.enforce.clear();
            std::stringstream ss(*a.enforce);
            for (std::string name; std::getline(ss, name, ',');)
                if (!name.empty()) cfg.enforce.push_back(name);
        }

        swat::ScenarioReport rep = swat::run_scenario(cfg);
        fs::create_directories(a.out);
        write_output((fs::path(a.out) / "levels.csv").string(), rep.levels_csv());
        write_output((fs::path(a.out) / "actions.csv").string(), to_csv(rep.log));
        write_output((fs::path(a.out) / "report.json").string(), rep.summary_json() + "\n");

        if (a.format == "json") {
            std::cout << rep.summary_json() << "\n";
        } else {
            int id = cfg.attack ? cfg.attack->id : 0;
            std::cout << "attack " << id << ", ticks " << rep.log.ticks << "\n";
            for (const char* k : {"overflow_T1", "overflow_T2", "overflow_T3", "pump3_dry", "chattering", "stuck"})
                std::cout << "  " << k << " = " << (*swat::report_flag(rep, k, id) ? "true" : "false") << "\n";
            for (std::size_t i = 0; i < 3; ++i)
                std::cout << "  plc" << i + 1 << ": suppressed " << rep.suppressed[i] << ", inserted "
                          << rep.inserted[i] << "\n";
            for (const auto& k : rep.unmet) std::cout << "  unmet expectation: " << k << "\n";
        }
        return rep.unmet.empty() ? Ok : Unmet;
    } catch (const swat::ScenarioError& e) {
        if (e.kind == swat::ScenarioError::Config) throw Failure{InputError, e.what()};
        throw Failure{synth_code(e.cause), std::string(e.what()) + " (" + synth_hint(e.cause) + ")"};
    } catch (const fs::filesystem_error& e) {
        throw Failure{InputError, e.what()};
    }
}

// ---------------------------------------------------------------- bench

struct BenchArgs {
    std::string family = "nested", sizes = "1..3", out;
    std::size_t count = 1;
    std::uint64_t seed = 1;
    bool timing = false;
};

// Families indexed by a size parameter:
//   chain   one cycle of `size` events, no intersection (linear growth)
//   nested  `size` global intersections of periodic properties
//   bme     mutual exclusion of two events with window `size`
//   random  random properties of nesting depth `size`, intersections allowed
int cmd_bench(const BenchArgs& a) {
    std::uint64_t lo = 0, hi = 0;
    {
        auto dots = a.sizes.find("..");
        try {
            if (dots == std::string::npos) {
                lo = hi = std::stoull(a.sizes);
            } else {
                lo = std::stoull(a.sizes.substr(0, dots));
                hi = std::stoull(a.sizes.substr(dots + 2));
            }
        } catch (const std::exception&) {
            throw Failure{InputError, "--sizes expects N or A..B"};
        }
    }
    const std::vector<Action> ev{Action::sensor("p"), Action::sensor("q"), Action::actuator("r"), Action::tick()};
    const Alphabet p = make_alphabet({Action::sensor("p"), Action::sensor("q"), Action::actuator("r"),
                                      Action::tick(), Action::end()});
    const CombinatorEnv env = CombinatorEnv::from_alphabet(p, 3);

    gen::Rng rng(a.seed);
    // component j lets s:p through only in every (j+2)-th cycle, so the
    // conjunction of the first d+1 components counts cycles modulo their lcm
    auto periodic = [](std::uint64_t j) {
        std::string body;
        for (std::uint64_t i = 0; i <= j; ++i) body += "tick.end.";
        return parse_property("(" + body + "tick.(s:p.end + end))*");
    };

    std::ostringstream os;
    os << "family,size,index,prop_size,intersections,states,bound" << (a.timing ? ",micros" : "") << "\n";
    for (std::uint64_t size = lo; size <= hi; ++size) {
        for (std::size_t idx = 0; idx < a.count; ++idx) {
            Global e = nullptr;
            if (a.family == "chain") {
                Local body = prop::event(Action::end());
                for (std::uint64_t j = size; j-- > 0;) body = prop::prefix(ev[(j + idx) % ev.size()], body);
                e = prop::star(body);
            } else if (a.family == "nested") {
                e = periodic(idx);
                for (std::uint64_t j = 1; j <= size; ++j) e = prop::inter(e, periodic(idx + j));
            } else if (a.family == "bme") {
                if (size == 0) throw Failure{InputError, "bme sizes start at 1"};
                e = prop::star(mutual_exclusion({Action::sensor("p"), Action::actuator("r")},
                                                static_cast<std::uint32_t>(size), env));
            } else if (a.family == "random") {
                e = gen::random_property(rng, ev, static_cast<int>(size), true);
            } else {
                throw Failure{InputError, "unknown family '" + a.family + "' (chain, nested, bme, random)"};
            }
            auto t0 = std::chrono::steady_clock::now();
            BoundReport r = check_derivative_bound(e, p);
            auto us = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0);
            os << a.family << ',' << size << ',' << idx << ',' << r.m << ',' << r.k << ',' << r.states << ','
               << r.bound;
            if (a.timing) os << ',' << us.count();
            os << '\n';
            if (!r.ok) spdlog::warn("{} size {} index {}: {} states exceed the bound {}", a.family, size, idx, r.states,
                                    r.bound);
        }
    }
    write_output(a.out, os.str());
    return Ok;
}

void setup_logging() {
    auto logger = spdlog::stderr_color_mt("enforcemint");
    spdlog::set_default_logger(logger);
    spdlog::set_level(spdlog::level::warn);
    if (const char* lvl = std::getenv("ENFORCEMINT_LOG")) {
        auto l = spdlog::level::from_str(lvl);
        if (l == spdlog::level::off && std::string(lvl) != "off")
            spdlog::warn("ENFORCEMINT_LOG: unknown level '{}', using warn", lvl);
        else
            spdlog::set_level(l);
    }
}

}  // namespace

int main(int argc, char** argv) {
    setup_logging();
    CLI::App app{"Runtime enforcement for PLC controllers: synthesis, checking, simulation, scenarios"};
    app.require_subcommand(1);

    SynthArgs sa;
    auto* synth = app.add_subcommand("synth", "Synthesize the edit automaton of a property");
    synth->add_option("property", sa.property, "Property file")->required();
    synth->add_option("alphabet", sa.alphabet, "Alphabet file (actions separated by blanks or commas)")->required();
    synth->add_option("--maxa", sa.maxa, "Actions per cycle, used by combinators")->check(CLI::PositiveNumber);
    synth->add_option("--format", sa.format, "json or dot")->check(CLI::IsMember({"json", "dot"}));
    synth->add_option("--out", sa.out, "Output file (default stdout)");

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "Check a trace against a property");
    check->add_option("trace", ca.trace, "Trace file")->required();
    check->add_option("property", ca.property, "Property file")->required();
    check->add_option("--alphabet", ca.alphabet, "Alphabet file, needed by combinators");
    check->add_option("--maxa", ca.maxa, "Actions per cycle, used by combinators")->check(CLI::PositiveNumber);

    SimArgs ma;
    auto* sim = app.add_subcommand("simulate", "Run one controller, optionally under a monitor");
    sim->add_option("controller", ma.controller, "Controller file")->required();
    sim->add_option("--property", ma.property, "Property to enforce");
    sim->add_option("--horizon", ma.horizon, "Ticks to run");
    sim->add_option("--seed", ma.seed, "Seeded random choice among enabled steps");
    sim->add_option("--maxa", ma.maxa, "Override the controller's maxa for combinators");
    sim->add_option("--format", ma.format, "csv (step log) or text (observable trace)")
        ->check(CLI::IsMember({"csv", "text"}));
    sim->add_option("--out", ma.out, "Output file (default stdout)");
    sim->add_flag("--raw", ma.raw, "Accept code that breaks the scan-cycle phases");

    ScenarioArgs sc;
    auto* scen = app.add_subcommand("scenario", "Run a water treatment scenario");
    scen->add_option("config", sc.config, "Scenario YAML file")->required();
    scen->add_option("--out", sc.out, "Directory for levels.csv, actions.csv and report.json");
    scen->add_option("--horizon", sc.horizon, "Ticks to run");
    scen->add_option("--seed", sc.seed, "Seeded random scheduling");
    scen->add_option("--scale", sc.scale, "Factor on the attack timings")->check(CLI::PositiveNumber);
    scen->add_option("--attack", sc.attack, "Attack id, 0 for none")->check(CLI::Range(0, 5));
    scen->add_option("--enforce", sc.enforce, "Comma-separated property names (replaces the config's)");
    scen->add_option("--format", sc.format, "text or json summary on stdout")->check(CLI::IsMember({"text", "json"}));

    BenchArgs ba;
    auto* bench = app.add_subcommand("bench", "Automaton size against the derivative bound, as CSV");
    bench->add_option("--family", ba.family, "chain, nested, bme or random");
    bench->add_option("--sizes", ba.sizes, "Size range A..B (empty when A > B)");
    bench->add_option("--count", ba.count, "Properties per size");
    bench->add_option("--seed", ba.seed, "Generator seed");
    bench->add_flag("--timing", ba.timing, "Add a micros column (not reproducible)");
    bench->add_option("--out", ba.out, "Output file (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? Ok : InputError;
    }

    try {
        if (*synth) return cmd_synth(sa);
        if (*check) return cmd_check(ca);
        if (*sim) return cmd_simulate(ma);
        if (*scen) return cmd_scenario(sc);
        if (*bench) return cmd_bench(ba);
    } catch (const Failure& f) {
        std::cerr << "error: " << f.message << "\n";
        return f.code;
    }
    return Ok;
}
