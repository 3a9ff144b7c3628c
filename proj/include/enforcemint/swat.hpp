#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "enforcemint/controller.hpp"
#include "enforcemint/runtime.hpp"
#include "enforcemint/synthesis.hpp"

// Desk-scale water treatment plant: three tanks, three PLCs, the attacks
// against them and the properties that mitigate those attacks.
namespace enforcemint::swat {

// Config covers unreadable or malformed files, including property text that
// does not parse; Property is a property the synthesis rejects.
struct ScenarioError : std::runtime_error {
    enum Kind { Config, Property } kind;
    SynthError::Kind cause = SynthError::AlphabetMismatch;  // for Property
    ScenarioError(Kind k, const std::string& msg) : std::runtime_error(msg), kind(k) {}
    ScenarioError(SynthError::Kind c, const std::string& msg) : std::runtime_error(msg), kind(Property), cause(c) {}
};

// Rates are volume units per tick; levels are percent of each capacity.
struct PlantConfig {
    std::array<double, 3> capacity{100, 100, 20};
    double in1 = 1.5;        // pump1 into T1
    double in2 = 1.5;        // pump2 into T1
    double out_valve = 2.0;  // T1 -> T2 through the open valve
    double drain2 = 1.2;     // T2 -> reverse osmosis
    double divert2 = 0.4;    // part of the drain stored in T3
    double back3 = 0.8;      // pump3, T3 -> T2
    double overflow_margin = 10;
    double dry_level = 5;    // pump3 running below this level runs dry
};

struct PlantState {
    std::array<double, 3> level{50, 50, 50};
    bool pump1 = false, pump2 = false, pump3 = false;
    bool valve = false;  // open
    std::array<bool, 3> overflow{};
    bool pump3_dry = false;
};

struct SensorThresholds {
    std::array<double, 3> low{20, 20, 20};
    std::array<double, 3> high{80, 80, 80};
};

// Rejects rates that break the plant's qualitative constraints.
void validate(const PlantConfig& p, const SensorThresholds& t);

PlantState plant_tick(const PlantState& s, const PlantConfig& p);

// 'l', 'm' or 'h'; a level on a threshold reads as 'm'.
char signal_for(double level, double low, double high);
Action sensor_action(std::size_t tank, char signal);  // s:l1 ... s:h3
std::array<Action, 3> sample_sensors(const PlantState& s, const SensorThresholds& t);

// What a controller sees when its reading is shifted by `offset`.
char offset_reading(double level, double offset, double low, double high);

// The three PLC programs; i in 1..3.
Controller build_plc(int i);
std::string plc_source(int i);

struct AttackSpec {
    int id = 0;
    int target = 0;               // PLC index
    std::uint32_t silent = 1;     // cycles before the malware acts (one-shot attacks)
    std::uint32_t standby = 1;    // periodic attacks: idle cycles per period
    std::uint32_t active = 1;     // periodic attacks: active cycles per period
    double offset = -30;          // attack 2

    bool periodic() const { return id == 3 || id == 4; }

    // Reference timings (500 s, 70 s, 30 s at 100 ms per cycle) times `scale`.
    static AttackSpec standard(int id, double scale);
};

// Compromised variant of `plc`, unrolled over a cycle counter so that the
// malware's phases are plain recursion equations.
Controller apply_attack(const Controller& plc, const AttackSpec& a, const SensorThresholds& t);

// Parameters of the properties, derived by running the plant model.
struct DerivedParams {
    std::uint32_t m = 1;    // e1: cycles T1 needs to drain from high to low, minus one
    std::uint32_t u = 1;    // e2: same for T2 with the valve closed
    std::uint32_t w = 1;    // e3: same for T3 with pump3 on
    std::uint32_t w_low = 1;  // e3': cycles T3 needs to fill from low to high, minus one
    std::uint32_t bme = 1;  // e1'': the 100-cycle window, scaled
};

DerivedParams derive_params(const PlantConfig& p, const SensorThresholds& t, double scale);

struct PropertySpec {
    int plc = 1;
    std::string text;  // DSL, $m $u $w $w_low $bme are substituted
};

std::string substitute(const std::string& text, const DerivedParams& d);

struct ScenarioConfig {
    PlantConfig plant;
    PlantState initial;
    SensorThresholds thresholds;
    ChannelMode channels = ChannelMode::Lossy;
    std::map<int, std::string> plc_override;  // DSL replacing build_plc(i)
    std::map<std::string, PropertySpec> properties;
    std::optional<AttackSpec> attack;
    double scale = 0.1;
    std::uint64_t horizon = 2000;
    SchedulerPolicy scheduler;
    std::vector<std::string> enforce;  // property names
    std::map<std::string, bool> expect;  // report key -> expected value
};

ScenarioConfig default_config();
ScenarioConfig load_config(const std::string& path);
ScenarioConfig parse_config(const std::string& yaml_text);

std::vector<std::string> designated_properties(int attack);

struct ScenarioReport {
    TraceLog log;
    std::vector<PlantState> history;  // one entry per tick, initial state first
    std::array<bool, 3> overflow{};
    bool pump3_dry = false;
    std::size_t valve_toggles = 0;
    std::size_t chattering = 0;  // toggles that are the third within one window
    std::array<std::size_t, 3> suppressed{};
    std::array<std::size_t, 3> inserted{};
    DerivedParams params;
    std::map<std::string, std::size_t> automaton_states;  // per enforced property
    std::vector<std::string> unmet;  // expectations that failed

    std::string levels_csv() const;
    std::string summary_json() const;
};

ScenarioReport run_scenario(const ScenarioConfig& cfg);

// Overflow of T2 for attacks 1 and 2, chattering for 3 and 4, pump3 running
// dry for 5.
bool damage_indicator(int attack, const ScenarioReport& r);

// Value of a report key used by expectations (overflow_T2, chattering, ...).
std::optional<bool> report_flag(const ScenarioReport& r, const std::string& key, int attack);

}  // namespace enforcemint::swat
