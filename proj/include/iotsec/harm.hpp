#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "iotsec/cvss.hpp"

namespace iotsec::harm {

// Name of the pseudo-node the attacker starts from; wired to every entry
// point in the upper layer and never carries an attack tree.
inline constexpr const char* kAttackerNode = "attacker";

struct Vulnerability {
    std::string id;
    double probability = 0.0;  // exploitability subscore / 10
    double impact = 0.0;       // impact subscore, unrounded
    double base = 0.0;         // base score, one decimal
    int privilege_level = 1;   // 1..3

    bool operator==(const Vulnerability&) const = default;
};

// 3 for all-privilege, 2 for user-privilege, 1 otherwise (other-privilege
// keeps the default).
int privilege_level(const cvss::PrivilegeFlags& flags);

Vulnerability vulnerability_from_scores(std::string id, const cvss::Scores& scores,
                                        const cvss::PrivilegeFlags& flags);

struct Metrics {
    double probability = 0.0;
    double impact = 0.0;
    double risk = 0.0;
};

enum class GateKind { Or, And };

// AND/OR gate tree with vulnerabilities at the leaves.
struct AttackTree {
    struct Node {
        enum class Kind { Leaf, Gate };
        Kind kind = Kind::Leaf;
        Vulnerability vuln;              // Leaf only
        GateKind gate = GateKind::Or;    // Gate only
        std::vector<Node> children;      // Gate only, never empty

        bool operator==(const Node&) const = default;

        static Node leaf(Vulnerability v);
        static Node gate_node(GateKind kind, std::vector<Node> children);
    };

    Node root;

    bool operator==(const AttackTree&) const = default;

    // All leaf vulnerabilities, in tree order.
    std::vector<const Vulnerability*> leaves() const;
    int max_privilege_level() const;
};

// Bottom-up tree evaluation result. rep_id identifies the concrete
// vulnerability backing the metrics (used for deterministic OR tie-breaks):
// the leaf id itself, the OR-selected child's rep_id, or the smallest child
// rep_id under an AND.
struct TreeEval {
    Metrics metrics;
    double base = 0.0;  // leaf base; AND sums, OR selects
    std::string rep_id;
};

TreeEval eval_node(const AttackTree::Node& node);

// Leaf: (p, i, p*i). AND: probability = product, impact = sum, risk
// recomputed as impact * probability. OR: the child with maximum risk
// (ties: higher probability, then smaller rep_id).
Metrics eval_tree(const AttackTree& tree);

struct DeviceNode {
    std::string name;
    std::optional<AttackTree> tree;  // absent: invulnerable, traversable hop
    Metrics metrics;                 // eval_tree(tree), zero when invulnerable
    double base = 0.0;               // tree evaluation base, zero when invulnerable
    int privilege_level = 1;

    bool vulnerable() const { return tree.has_value(); }
};

struct NetworkModel {
    std::string name;
    std::map<std::string, DeviceNode> nodes;
    std::set<std::pair<std::string, std::string>> edges;  // normalized: first < second
    std::set<std::string> entry_points;
    std::set<std::string> targets;
};

// Scoring input: per-vulnerability categories and privilege flags, from
// ground truth or from classifier predictions.
struct ScoredVulnerability {
    cvss::Categories categories;
    cvss::PrivilegeFlags privileges;
};

using Scoring = std::map<std::string, ScoredVulnerability>;

// Inline vulnerability data as declared in a topology config.
struct InlineVulnerability {
    std::string id;
    std::optional<ScoredVulnerability> scored;  // from "vector"/"categories" + "privileges"
    std::optional<std::string> description;
};

// Builds the network from a topology config document. Every vulnerability id
// is resolved through `scoring`; ids missing from it are an error. The
// default tree is a flat OR over the device's vulnerabilities; configs may
// declare an explicit AND/OR "gate" structure referencing vulnerability ids.
NetworkModel build_network(const nlohmann::json& config, const Scoring& scoring);

// The inline (ground-truth) scoring carried by a config document.
Scoring inline_scoring(const nlohmann::json& config);

// All vulnerability declarations in a config, keyed by id. Conflicting
// duplicate declarations are an error.
std::map<std::string, InlineVulnerability> collect_vulnerabilities(const nlohmann::json& config);

// Union by name. Shared devices must carry identical attack trees; edge,
// entry and target sets are unions.
NetworkModel merge_networks(const NetworkModel& a, const NetworkModel& b);

nlohmann::ordered_json network_to_json(const NetworkModel& net);
NetworkModel network_from_json(const nlohmann::json& j);

struct Harm {
    NetworkModel net;
    // Upper-layer adjacency including the attacker pseudo-node.
    std::map<std::string, std::set<std::string>> adjacency;
};

// Adds the attacker pseudo-node wired to each entry point. Empty entry or
// target sets are an error.
Harm build_harm(const NetworkModel& net);

struct AttackPath {
    std::vector<std::string> nodes;  // device names, attacker excluded
    Metrics metrics;
};

// All simple paths from the attacker to any target, in lexicographic order
// of their node sequences. max_nodes, when set, caps the number of devices
// in a reported path.
std::vector<AttackPath> enumerate_paths(const Harm& harm,
                                        std::optional<std::size_t> max_nodes = std::nullopt);

// probability = product over vulnerable nodes, impact and risk = sums.
// Invulnerable hops contribute nothing.
Metrics path_metrics(const std::vector<std::string>& path, const Harm& harm);

// Sum of per-node base scores along a path (invulnerable hops contribute 0).
double path_base_score(const std::vector<std::string>& path, const Harm& harm);

// Argmax of path risk; ties broken by higher probability, then fewer nodes,
// then lexicographic node sequence. Throws when no path reaches a target.
AttackPath max_risk_path(const Harm& harm,
                         std::optional<std::size_t> max_nodes = std::nullopt);

// "attacker→a→b" formatting used by reports and the visualizer.
std::string format_path(const std::vector<std::string>& nodes);

}  // namespace iotsec::harm
