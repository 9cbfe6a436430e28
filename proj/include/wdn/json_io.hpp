#pragma once

#include <array>
#include <optional>
#include <string>

#include "wdn/hydraulics.hpp"
#include "wdn/network.hpp"
#include "wdn/relax.hpp"

namespace wdn {

// One slot of revealed data, file units (m^3/hour, $/kWh, W).
struct ScenarioSlot {
    int k = 0;
    std::map<std::string, double> demands_m3h;
    double price_per_kwh = 0.0;
    double r_watt = 0.0;
};

// Seeded generator block: demand and signal draws per slot.
struct ScenarioGenerator {
    int slots = 0;
    std::map<std::string, std::array<double, 2>> demand_ranges_m3h;
    double price_per_kwh = 0.0;
    std::array<double, 2> r_range_watt{0.0, 0.0};
};

struct Scenario {
    std::vector<ScenarioSlot> slots;
    double r_bar_watt = 0.0;
    double delta_s = 300.0;
    std::optional<ScenarioGenerator> generator;
};

Network load_network(const std::string& path);
Network parse_network(const std::string& text);

Scenario load_scenario(const std::string& path);
Scenario parse_scenario(const std::string& text);

// Edge id -> 0/1. Missing edges default to 1 only in make_full_assignment.
std::map<std::string, int> load_assignment(const std::string& path);

std::string schedule_to_json(const RelaxedSolution& sol, int slot_k);
RelaxedSolution schedule_from_json(const std::string& text);
std::string audit_to_json(const AuditReport& a);
std::string audit_to_csv(const AuditReport& a);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

}  // namespace wdn
