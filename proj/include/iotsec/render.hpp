#pragma once

#include <string>
#include <vector>

#include "iotsec/assess.hpp"
#include "iotsec/harm.hpp"

namespace iotsec::viz {

// Graphviz rendering of the device graph with the given attack path
// highlighted in red. Nodes are emitted sorted by name; identical inputs
// give byte-identical output. Highlight nodes must exist in the network.
std::string render_dot(const harm::NetworkModel& net, const std::vector<std::string>& highlight);

// Single self-contained HTML page (inline SVG, no external requests):
// device graph, red max-risk path, the compromised-node sequence strip, and
// the system's metrics embedded as inline JSON.
std::string render_html(const harm::NetworkModel& net, const std::vector<std::string>& highlight,
                        const assess::SystemAssessment& row);

}  // namespace iotsec::viz
