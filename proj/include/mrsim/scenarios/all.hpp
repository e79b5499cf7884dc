#pragma once

// Aggregates every built-in scenario and defines the registry.

#include "mrsim/scenarios/arctic_transport.hpp"
#include "mrsim/scenarios/discovery.hpp"
#include "mrsim/scenarios/foraging.hpp"
#include "mrsim/scenarios/material_transport.hpp"
#include "mrsim/scenarios/navigation.hpp"
#include "mrsim/scenarios/predator_prey.hpp"
#include "mrsim/scenarios/random_waypoints.hpp"
#include "mrsim/scenarios/rware.hpp"
#include "mrsim/scenarios/warehouse.hpp"

namespace mrsim {

inline const std::map<std::string, std::function<ScenarioPtr()>>& scenario_registry() {
    static const std::map<std::string, std::function<ScenarioPtr()>> registry = {
        {"arctic_transport", [] { return std::make_shared<const ArcticTransportScenario>(); }},
        {"discovery", [] { return std::make_shared<const DiscoveryScenario>(); }},
        {"foraging", [] { return std::make_shared<const ForagingScenario>(); }},
        {"material_transport", [] { return std::make_shared<const MaterialTransportScenario>(); }},
        {"navigation", [] { return std::make_shared<const NavigationScenario>(); }},
        {"predator_prey", [] { return std::make_shared<const PredatorPreyScenario>(); }},
        {"random_waypoints", [] { return std::make_shared<const RandomWaypointsScenario>(); }},
        {"rware", [] { return std::make_shared<const RwareScenario>(); }},
        {"warehouse", [] { return std::make_shared<const WarehouseScenario>(); }},
    };
    return registry;
}

} // namespace mrsim
