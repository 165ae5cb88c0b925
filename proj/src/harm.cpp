#include "iotsec/harm.hpp"

#include <algorithm>

#include "iotsec/util.hpp"

namespace iotsec::harm {

using nlohmann::json;
using nlohmann::ordered_json;

int privilege_level(const cvss::PrivilegeFlags& flags) {
    if (flags.all_privilege) return 3;
    if (flags.user_privilege) return 2;
    return 1;
}

Vulnerability vulnerability_from_scores(std::string id, const cvss::Scores& scores,
                                        const cvss::PrivilegeFlags& flags) {
    Vulnerability v;
    v.id = std::move(id);
    v.probability = scores.exploitability / 10.0;
    v.impact = scores.impact;
    v.base = scores.base;
    v.privilege_level = privilege_level(flags);
    return v;
}

AttackTree::Node AttackTree::Node::leaf(Vulnerability v) {
    Node n;
    n.kind = Kind::Leaf;
    n.vuln = std::move(v);
    return n;
}

AttackTree::Node AttackTree::Node::gate_node(GateKind kind, std::vector<Node> children) {
    if (children.empty()) throw Error("attack tree gate must have at least one child");
    Node n;
    n.kind = Kind::Gate;
    n.gate = kind;
    n.children = std::move(children);
    return n;
}

namespace {

void collect_leaves(const AttackTree::Node& node, std::vector<const Vulnerability*>& out) {
    if (node.kind == AttackTree::Node::Kind::Leaf) {
        out.push_back(&node.vuln);
        return;
    }
    for (const auto& child : node.children) collect_leaves(child, out);
}

}  // namespace

std::vector<const Vulnerability*> AttackTree::leaves() const {
    std::vector<const Vulnerability*> out;
    collect_leaves(root, out);
    return out;
}

int AttackTree::max_privilege_level() const {
    int level = 1;
    for (const auto* leaf : leaves()) level = std::max(level, leaf->privilege_level);
    return level;
}

TreeEval eval_node(const AttackTree::Node& node) {
    if (node.kind == AttackTree::Node::Kind::Leaf) {
        TreeEval eval;
        eval.metrics.probability = node.vuln.probability;
        eval.metrics.impact = node.vuln.impact;
        eval.metrics.risk = node.vuln.probability * node.vuln.impact;
        eval.base = node.vuln.base;
        eval.rep_id = node.vuln.id;
        return eval;
    }
    if (node.children.empty()) throw Error("attack tree gate must have at least one child");

    if (node.gate == GateKind::And) {
        TreeEval eval;
        eval.metrics.probability = 1.0;
        for (const auto& child : node.children) {
            const TreeEval c = eval_node(child);
            eval.metrics.probability *= c.metrics.probability;
            eval.metrics.impact += c.metrics.impact;
            eval.base += c.base;
            if (eval.rep_id.empty() || c.rep_id < eval.rep_id) eval.rep_id = c.rep_id;
        }
        eval.metrics.risk = eval.metrics.probability * eval.metrics.impact;
        return eval;
    }

    // OR: the single child with maximum risk; ties prefer higher probability,
    // then the smaller representative id.
    std::optional<TreeEval> best;
    for (const auto& child : node.children) {
        TreeEval c = eval_node(child);
        if (!best.has_value() || c.metrics.risk > best->metrics.risk ||
            (c.metrics.risk == best->metrics.risk &&
             (c.metrics.probability > best->metrics.probability ||
              (c.metrics.probability == best->metrics.probability && c.rep_id < best->rep_id)))) {
            best = std::move(c);
        }
    }
    return *best;
}

Metrics eval_tree(const AttackTree& tree) {
    return eval_node(tree.root).metrics;
}

namespace {

Vulnerability resolve_vulnerability(const std::string& id, const Scoring& scoring) {
    const auto it = scoring.find(id);
    if (it == scoring.end()) {
        throw Error("scoring does not cover vulnerability " + id);
    }
    return vulnerability_from_scores(id, cvss::score_categories(it->second.categories),
                                     it->second.privileges);
}

ScoredVulnerability scored_from_json(const json& decl) {
    ScoredVulnerability out;
    if (decl.contains("vector")) {
        out.categories = cvss::parse_vector(decl["vector"].get<std::string>());
    } else if (decl.contains("categories")) {
        const auto& c = decl["categories"];
        std::array<std::string, 6> labels = {
            c.at("access_vector").get<std::string>(),  c.at("access_complexity").get<std::string>(),
            c.at("authentication").get<std::string>(), c.at("confidentiality").get<std::string>(),
            c.at("integrity").get<std::string>(),      c.at("availability").get<std::string>()};
        out.categories = cvss::categories_from_labels(labels);
    } else {
        throw Error("vulnerability declaration needs a \"vector\" or \"categories\" field");
    }
    const auto& p = decl.at("privileges");
    out.privileges.all_privilege = p.value("all_privilege", false);
    out.privileges.user_privilege = p.value("user_privilege", false);
    out.privileges.other_privilege = p.value("other_privilege", false);
    return out;
}

AttackTree::Node gate_from_json(const json& gate, const std::string& device,
                                const std::map<std::string, Vulnerability>& vulns) {
    if (gate.is_string()) {
        const auto id = gate.get<std::string>();
        const auto it = vulns.find(id);
        if (it == vulns.end()) {
            throw Error("gate of device " + device + " references unknown vulnerability " + id);
        }
        return AttackTree::Node::leaf(it->second);
    }
    const std::string kind_text = gate.at("kind").get<std::string>();
    GateKind kind;
    if (kind_text == "or") kind = GateKind::Or;
    else if (kind_text == "and") kind = GateKind::And;
    else throw Error("unknown gate kind \"" + kind_text + "\" in device " + device);

    std::vector<AttackTree::Node> children;
    for (const auto& child : gate.at("children")) {
        children.push_back(gate_from_json(child, device, vulns));
    }
    return AttackTree::Node::gate_node(kind, std::move(children));
}

}  // namespace

std::map<std::string, InlineVulnerability> collect_vulnerabilities(const json& config) {
    std::map<std::string, InlineVulnerability> out;
    for (const auto& device : config.at("devices")) {
        if (!device.contains("vulnerabilities")) continue;
        for (const auto& decl : device["vulnerabilities"]) {
            InlineVulnerability v;
            v.id = decl.at("id").get<std::string>();
            if (decl.contains("vector") || decl.contains("categories")) {
                v.scored = scored_from_json(decl);
            }
            if (decl.contains("description")) v.description = decl["description"].get<std::string>();

            const auto [it, inserted] = out.emplace(v.id, v);
            if (!inserted) {
                const auto& prev = it->second;
                const bool same = prev.scored == v.scored && prev.description == v.description;
                if (!same) throw Error("conflicting declarations for vulnerability " + v.id);
            }
        }
    }
    return out;
}

Scoring inline_scoring(const json& config) {
    Scoring scoring;
    for (const auto& [id, decl] : collect_vulnerabilities(config)) {
        if (decl.scored.has_value()) scoring[id] = *decl.scored;
    }
    return scoring;
}

NetworkModel build_network(const json& config, const Scoring& scoring) {
    NetworkModel net;
    net.name = config.value("name", "");

    for (const auto& device : config.at("devices")) {
        DeviceNode node;
        node.name = device.at("name").get<std::string>();
        if (node.name == kAttackerNode) {
            throw Error("device name \"" + node.name + "\" is reserved");
        }
        if (net.nodes.count(node.name) > 0) throw Error("duplicate device name " + node.name);

        std::map<std::string, Vulnerability> vulns;
        std::vector<std::string> declared_order;
        if (device.contains("vulnerabilities")) {
            for (const auto& decl : device["vulnerabilities"]) {
                const auto id = decl.at("id").get<std::string>();
                vulns[id] = resolve_vulnerability(id, scoring);
                declared_order.push_back(id);
            }
        }

        if (!vulns.empty()) {
            AttackTree tree;
            if (device.contains("gate")) {
                tree.root = gate_from_json(device["gate"], node.name, vulns);
            } else {
                // Default shape: flat OR over the declared vulnerabilities.
                std::vector<AttackTree::Node> leaves;
                for (const auto& id : declared_order) {
                    leaves.push_back(AttackTree::Node::leaf(vulns.at(id)));
                }
                tree.root = leaves.size() == 1
                                ? std::move(leaves.front())
                                : AttackTree::Node::gate_node(GateKind::Or, std::move(leaves));
            }
            const TreeEval eval = eval_node(tree.root);
            node.metrics = eval.metrics;
            node.base = eval.base;
            node.privilege_level = tree.max_privilege_level();
            node.tree = std::move(tree);
        }
        net.nodes.emplace(node.name, std::move(node));
    }

    if (config.contains("edges")) {
        for (const auto& edge : config["edges"]) {
            auto a = edge.at(0).get<std::string>();
            auto b = edge.at(1).get<std::string>();
            if (net.nodes.count(a) == 0) throw Error("edge references unknown device " + a);
            if (net.nodes.count(b) == 0) throw Error("edge references unknown device " + b);
            if (a == b) throw Error("self-edge on device " + a);
            if (b < a) std::swap(a, b);
            net.edges.emplace(std::move(a), std::move(b));
        }
    }
    for (const auto& name : config.value("entry_points", std::vector<std::string>{})) {
        if (net.nodes.count(name) == 0) throw Error("entry point references unknown device " + name);
        net.entry_points.insert(name);
    }
    for (const auto& name : config.value("targets", std::vector<std::string>{})) {
        if (net.nodes.count(name) == 0) throw Error("target references unknown device " + name);
        net.targets.insert(name);
    }
    return net;
}

NetworkModel merge_networks(const NetworkModel& a, const NetworkModel& b) {
    NetworkModel out = a;
    if (a.name != b.name) {
        // Order-independent composite label.
        out.name = a.name.empty() ? b.name
                 : b.name.empty() ? a.name
                                  : std::min(a.name, b.name) + "+" + std::max(a.name, b.name);
    }
    for (const auto& [name, node] : b.nodes) {
        const auto it = out.nodes.find(name);
        if (it == out.nodes.end()) {
            out.nodes.emplace(name, node);
            continue;
        }
        if (it->second.tree != node.tree) {
            throw Error("cannot merge: device " + name + " has differing attack trees");
        }
    }
    out.edges.insert(b.edges.begin(), b.edges.end());
    out.entry_points.insert(b.entry_points.begin(), b.entry_points.end());
    out.targets.insert(b.targets.begin(), b.targets.end());
    return out;
}

namespace {

ordered_json vulnerability_to_json(const Vulnerability& v) {
    ordered_json j;
    j["id"] = v.id;
    j["probability"] = v.probability;
    j["impact"] = v.impact;
    j["base"] = v.base;
    j["privilege_level"] = v.privilege_level;
    return j;
}

Vulnerability vulnerability_from_json(const json& j) {
    Vulnerability v;
    v.id = j.at("id").get<std::string>();
    v.probability = j.at("probability").get<double>();
    v.impact = j.at("impact").get<double>();
    v.base = j.at("base").get<double>();
    v.privilege_level = j.at("privilege_level").get<int>();
    return v;
}

ordered_json tree_node_to_json(const AttackTree::Node& node) {
    if (node.kind == AttackTree::Node::Kind::Leaf) {
        ordered_json j;
        j["leaf"] = vulnerability_to_json(node.vuln);
        return j;
    }
    ordered_json j;
    j["gate"] = node.gate == GateKind::And ? "and" : "or";
    j["children"] = ordered_json::array();
    for (const auto& child : node.children) j["children"].push_back(tree_node_to_json(child));
    return j;
}

AttackTree::Node tree_node_from_json(const json& j) {
    if (j.contains("leaf")) return AttackTree::Node::leaf(vulnerability_from_json(j["leaf"]));
    const auto kind = j.at("gate").get<std::string>() == "and" ? GateKind::And : GateKind::Or;
    std::vector<AttackTree::Node> children;
    for (const auto& child : j.at("children")) children.push_back(tree_node_from_json(child));
    return AttackTree::Node::gate_node(kind, std::move(children));
}

}  // namespace

ordered_json network_to_json(const NetworkModel& net) {
    ordered_json j;
    j["name"] = net.name;
    j["devices"] = ordered_json::array();
    for (const auto& [name, node] : net.nodes) {
        ordered_json d;
        d["name"] = name;
        if (node.tree.has_value()) d["tree"] = tree_node_to_json(node.tree->root);
        j["devices"].push_back(std::move(d));
    }
    j["edges"] = ordered_json::array();
    for (const auto& [a, b] : net.edges) j["edges"].push_back({a, b});
    j["entry_points"] = std::vector<std::string>(net.entry_points.begin(), net.entry_points.end());
    j["targets"] = std::vector<std::string>(net.targets.begin(), net.targets.end());
    return j;
}

NetworkModel network_from_json(const json& j) {
    NetworkModel net;
    net.name = j.value("name", "");
    for (const auto& d : j.at("devices")) {
        DeviceNode node;
        node.name = d.at("name").get<std::string>();
        if (d.contains("tree")) {
            AttackTree tree;
            tree.root = tree_node_from_json(d["tree"]);
            const TreeEval eval = eval_node(tree.root);
            node.metrics = eval.metrics;
            node.base = eval.base;
            node.privilege_level = tree.max_privilege_level();
            node.tree = std::move(tree);
        }
        net.nodes.emplace(node.name, std::move(node));
    }
    for (const auto& edge : j.at("edges")) {
        net.edges.emplace(edge.at(0).get<std::string>(), edge.at(1).get<std::string>());
    }
    for (const auto& name : j.at("entry_points")) net.entry_points.insert(name.get<std::string>());
    for (const auto& name : j.at("targets")) net.targets.insert(name.get<std::string>());
    return net;
}

Harm build_harm(const NetworkModel& net) {
    if (net.entry_points.empty()) throw Error("network has no entry points");
    if (net.targets.empty()) throw Error("network has no targets");

    Harm harm;
    harm.net = net;
    for (const auto& [name, node] : net.nodes) harm.adjacency[name];  // ensure presence
    for (const auto& [a, b] : net.edges) {
        harm.adjacency[a].insert(b);
        harm.adjacency[b].insert(a);
    }
    for (const auto& entry : net.entry_points) {
        harm.adjacency[kAttackerNode].insert(entry);
        // The attacker sits outside the network; entry edges are one-way out.
    }
    return harm;
}

namespace {

void dfs_paths(const Harm& harm, const std::string& current, std::vector<std::string>& path,
               std::set<std::string>& visited, std::optional<std::size_t> max_nodes,
               std::vector<std::vector<std::string>>& out) {
    if (harm.net.targets.count(current) > 0) out.push_back(path);
    if (max_nodes.has_value() && path.size() >= *max_nodes) return;

    const auto it = harm.adjacency.find(current);
    if (it == harm.adjacency.end()) return;
    for (const auto& next : it->second) {
        if (next == kAttackerNode || visited.count(next) > 0) continue;
        visited.insert(next);
        path.push_back(next);
        dfs_paths(harm, next, path, visited, max_nodes, out);
        path.pop_back();
        visited.erase(next);
    }
}

}  // namespace

std::vector<AttackPath> enumerate_paths(const Harm& harm, std::optional<std::size_t> max_nodes) {
    std::vector<std::vector<std::string>> sequences;
    std::vector<std::string> path;
    std::set<std::string> visited;
    const auto it = harm.adjacency.find(kAttackerNode);
    if (it != harm.adjacency.end()) {
        for (const auto& entry : it->second) {
            visited.insert(entry);
            path.push_back(entry);
            dfs_paths(harm, entry, path, visited, max_nodes, sequences);
            path.pop_back();
            visited.erase(entry);
        }
    }
    std::sort(sequences.begin(), sequences.end());

    std::vector<AttackPath> out;
    out.reserve(sequences.size());
    for (auto& seq : sequences) {
        AttackPath p;
        p.metrics = path_metrics(seq, harm);
        p.nodes = std::move(seq);
        out.push_back(std::move(p));
    }
    return out;
}

Metrics path_metrics(const std::vector<std::string>& path, const Harm& harm) {
    Metrics m;
    m.probability = 1.0;
    for (const auto& name : path) {
        const auto it = harm.net.nodes.find(name);
        if (it == harm.net.nodes.end()) throw Error("path references unknown device " + name);
        if (!it->second.vulnerable()) continue;
        m.probability *= it->second.metrics.probability;
        m.impact += it->second.metrics.impact;
        m.risk += it->second.metrics.risk;
    }
    return m;
}

double path_base_score(const std::vector<std::string>& path, const Harm& harm) {
    double sum = 0.0;
    for (const auto& name : path) {
        const auto it = harm.net.nodes.find(name);
        if (it == harm.net.nodes.end()) throw Error("path references unknown device " + name);
        sum += it->second.base;
    }
    return sum;
}

AttackPath max_risk_path(const Harm& harm, std::optional<std::size_t> max_nodes) {
    const auto paths = enumerate_paths(harm, max_nodes);
    if (paths.empty()) throw Error("no attack path from " + std::string(kAttackerNode) +
                                   " to any target");

    const AttackPath* best = &paths.front();
    for (const auto& candidate : paths) {
        if (candidate.metrics.risk > best->metrics.risk) {
            best = &candidate;
        } else if (candidate.metrics.risk == best->metrics.risk) {
            if (candidate.metrics.probability > best->metrics.probability) {
                best = &candidate;
            } else if (candidate.metrics.probability == best->metrics.probability &&
                       candidate.nodes.size() < best->nodes.size()) {
                best = &candidate;
            }
            // Lexicographic order is already guaranteed by enumerate_paths.
        }
    }
    return *best;
}

std::string format_path(const std::vector<std::string>& nodes) {
    std::string out = kAttackerNode;
    for (const auto& node : nodes) {
        out += "→";
        out += node;
    }
    return out;
}

}  // namespace iotsec::harm
