#include "coopreg/builtin.hpp"

#include "coopreg/scenario_io.hpp"

namespace coopreg::builtin {

const std::string& scenario_text() {
    static const std::string text = R"(# Six-follower regression scenario.
#
# Follower 1 is informed; the directed chain 1->2->3->4->5->6 plus the
# shortcut 2->6 reaches every uninformed node. Each follower is a double
# integrator driven by a harmonic exogenous signal. Per-run uncertainty:
# the lower row of a is perturbed within (0, 0.06] and the (1,1) entry of
# e within [1, 3].

[graph]
n_followers = 6
n_informed = 1
edges = [[1, 2, 1.0], [2, 3, 1.0], [3, 4, 1.0], [4, 5, 1.0], [5, 6, 1.0], [2, 6, 1.0]]

[exosystem]
s = [[0.0, 1.0], [-2.0, 0.0]]
f = [[0.0, -2.0]]
v0 = [0.5, 1.0]

[[subsystem]]
a = [[0.0, 1.0], [0.0, 0.0]]
b = [[0.0], [2.0]]
c = [[1.0, 0.0]]
d = [[0.0, 2.0]]
e = [[2.0, 0.0], [0.0, 1.0]]
x0 = [0.4, -0.3]

[[subsystem]]
a = [[0.0, 1.0], [0.0, 0.0]]
b = [[0.0], [2.0]]
c = [[1.0, 0.0]]
d = [[0.0, 2.0]]
e = [[2.0, 0.0], [0.0, 1.0]]
x0 = [-0.2, 0.5]

[[subsystem]]
a = [[0.0, 1.0], [0.0, 0.0]]
b = [[0.0], [2.0]]
c = [[1.0, 0.0]]
d = [[0.0, 2.0]]
e = [[2.0, 0.0], [0.0, 1.0]]
x0 = [0.6, 0.1]

[[subsystem]]
a = [[0.0, 1.0], [0.0, 0.0]]
b = [[0.0], [2.0]]
c = [[1.0, 0.0]]
d = [[0.0, 2.0]]
e = [[2.0, 0.0], [0.0, 1.0]]
x0 = [-0.5, -0.4]

[[subsystem]]
a = [[0.0, 1.0], [0.0, 0.0]]
b = [[0.0], [2.0]]
c = [[1.0, 0.0]]
d = [[0.0, 2.0]]
e = [[2.0, 0.0], [0.0, 1.0]]
x0 = [0.3, 0.2]

[[subsystem]]
a = [[0.0, 1.0], [0.0, 0.0]]
b = [[0.0], [2.0]]
c = [[1.0, 0.0]]
d = [[0.0, 2.0]]
e = [[2.0, 0.0], [0.0, 1.0]]
x0 = [-0.1, 0.6]

[controller]
kind = "dynamic_state"

[observer]
kind = "state"

[integrator]
dt = 0.001
t_final = 100.0
record_every = 10

[uncertainty]
seed = 12345

[[uncertainty.entry]]
matrix = "a"
row = 2
col = 1
lo = 0.0
hi = 0.06
bounds = "half_open_low"

[[uncertainty.entry]]
matrix = "a"
row = 2
col = 2
lo = 0.0
hi = 0.06
bounds = "half_open_low"

[[uncertainty.entry]]
matrix = "e"
row = 1
col = 1
lo = -1.0
hi = 1.0
bounds = "closed"

[overrides]
l = [[0.0], [1.5]]

[[overrides.agent]]
agent = 0
kx = [[-4.95, -2.85]]
kz = [[8.1, 0.3]]
)";
    return text;
}

Scenario scenario() {
    return scenario_io::parse_scenario_text(scenario_text(), "<builtin>");
}

Scenario nominal_static_scenario() {
    Scenario sc = scenario();
    sc.controller = ControllerKind::static_feedback;
    sc.uncertainty.entries.clear();
    const double sigma[6] = {1.5, 2.0, 2.5, 1.0, 3.0, 2.2};
    for (std::size_t i = 0; i < sc.subsystems.size(); ++i)
        sc.subsystems[i].e_nom(0, 0) = sigma[i];
    return sc;
}

Scenario undirected_output_scenario() {
    Scenario sc = scenario();
    std::vector<graph::Edge> edges = {
        {1, 2, 1.0},
        {2, 3, 1.0}, {3, 2, 1.0},
        {3, 4, 1.0}, {4, 3, 1.0},
        {4, 5, 1.0}, {5, 4, 1.0},
        {5, 6, 1.0}, {6, 5, 1.0},
        {6, 2, 1.0}, {2, 6, 1.0},
    };
    sc.graph = graph::DirectedGraph::build(6, 1, edges);
    sc.controller = ControllerKind::output_feedback;
    sc.observer = ObserverKind::output;
    sc.tau.assign(6, 10.0);
    sc.overrides.l.reset(); // informed observers share the synthesized dual gain
    return sc;
}

} // namespace coopreg::builtin
