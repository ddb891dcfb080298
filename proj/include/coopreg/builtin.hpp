#pragma once

#include <string>

#include "coopreg/scenario.hpp"

namespace coopreg::builtin {

// Shipped regression scenario: six double-integrator followers on a directed
// graph with one informed node, harmonic exogenous signal, internal-model
// state feedback, and seeded parameter uncertainty.
const std::string& scenario_text();
Scenario scenario();

// Variant with nominal heterogeneous subsystems (no sampled uncertainty) and
// the static feedforward law.
Scenario nominal_static_scenario();

// Variant on an undirected uninformed ring with the output-based observer and
// the dynamic output feedback law.
Scenario undirected_output_scenario();

} // namespace coopreg::builtin
