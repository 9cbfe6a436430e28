#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "wdn/bnb.hpp"
#include "wdn/json_io.hpp"
#include "wdn/recon.hpp"
#include "wdn/relax.hpp"

namespace wdn {

struct ContractConfig {
    Network network;
    std::map<std::string, int> y;   // on/off assignment, fixed over the contract
    Scenario scenario;
    DiscretizationGrid grid;
    SolveSettings solver;
    std::optional<SolveSettings> step2_solver;  // defaults to `solver`
    uint64_t seed = 1;              // used when the scenario carries a generator
    bool continue_on_failure = false;
};

enum class StepTaken { Step1, Step2 };

struct SlotResult {
    int k = 0;
    StepTaken step = StepTaken::Step1;
    bool fallback = false;           // step 2 failed, step-1 schedule kept
    RelaxedSolution solution;        // reconstructed, speeds filled in
    double pump_energy_j = 0.0;      // electrical consumption of the pumps
    double gamma_w = 0.0;            // drawn power, pump_energy_j / delta
    double r_watt = 0.0;
    double imbalance_cost = 0.0;     // lambda |gamma - r| delta
    double energy_cost = 0.0;        // lambda * pump_energy_j
    double harvest_j = 0.0;          // rho g delta sum A/2 (H^2 - Hprev^2)
    AuditReport audit;
    SolveReport report_step1;
    std::optional<SolveReport> report_step2;
    std::vector<std::string> notes;
};

struct ContractLedger {
    std::vector<SlotResult> slots;
    std::vector<ScenarioSlot> realized;   // scenario rows actually used
    double total_pump_energy_j = 0.0;
    double total_imbalance_cost = 0.0;
    double total_energy_cost = 0.0;
    std::vector<std::string> events;
};

// Step 1: minimum-cost schedule for the slot (build, solve, reconstruct,
// recover speeds, audit). Throws InfeasibleError when no schedule exists.
SlotResult step1_min_cost(const Network& net, const ActiveGraph& g, const SlotInput& in,
                          const DiscretizationGrid& grid, const SolveSettings& st);

// Step 2: maximum tank harvest under the revealed signal budget. Requires
// step1.pump_energy_j < r delta.
SlotResult step2_max_harvest(const Network& net, const ActiveGraph& g, const SlotInput& in,
                             const DiscretizationGrid& grid, const SolveSettings& st,
                             const SlotResult& step1);

// Online loop over all slots with tank state carry-over.
ContractLedger run_contract(const ContractConfig& cfg);

// Materializes generator scenarios into explicit slots (seeded, recorded).
std::vector<ScenarioSlot> realize_scenario(const Scenario& sc, uint64_t seed);

// Fixed column order; one row per slot (documented in the README).
std::string ledger_csv(const ContractLedger& led, const Network& net);

SlotInput slot_input_from(const ScenarioSlot& row, const Network& net,
                          const std::map<std::string, double>& prev_v,
                          const std::map<std::string, double>& prev_h);

}  // namespace wdn
