#include "iotsec/render.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "iotsec/util.hpp"

namespace iotsec::viz {

namespace {

// Consecutive pairs of the highlighted walk, attacker edge included,
// normalized like NetworkModel edges.
std::set<std::pair<std::string, std::string>> highlight_edges(
    const std::vector<std::string>& highlight) {
    std::set<std::pair<std::string, std::string>> out;
    std::string prev = harm::kAttackerNode;
    for (const auto& node : highlight) {
        out.emplace(std::min(prev, node), std::max(prev, node));
        prev = node;
    }
    return out;
}

void check_highlight(const harm::NetworkModel& net, const std::vector<std::string>& highlight) {
    for (const auto& node : highlight) {
        if (net.nodes.count(node) == 0) {
            throw Error("highlighted node " + node + " is not part of network " + net.name);
        }
    }
}

std::string dot_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    return out;
}

std::string html_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

}  // namespace

std::string render_dot(const harm::NetworkModel& net, const std::vector<std::string>& highlight) {
    check_highlight(net, highlight);
    const auto red = highlight_edges(highlight);
    const std::set<std::string> on_path(highlight.begin(), highlight.end());

    std::string out = "graph \"" + dot_escape(net.name) + "\" {\n";
    out += "  layout=neato;\n  overlap=false;\n  splines=true;\n";
    out += "  \"attacker\" [shape=diamond, style=filled, fillcolor=black, fontcolor=white];\n";
    for (const auto& [name, node] : net.nodes) {  // map iteration: sorted by name
        out += "  \"" + dot_escape(name) + "\" [shape=ellipse";
        if (on_path.count(name) > 0) {
            out += ", color=red, penwidth=2.0";
        }
        if (net.targets.count(name) > 0) {
            out += ", style=filled, fillcolor=lightyellow";
        }
        out += "];\n";
    }

    // Attacker edges to entry points, then device edges; red when on the path.
    std::vector<std::pair<std::string, std::string>> all_edges;
    for (const auto& entry : net.entry_points) {
        all_edges.emplace_back(harm::kAttackerNode, entry);
    }
    for (const auto& edge : net.edges) all_edges.push_back(edge);
    for (const auto& [a, b] : all_edges) {
        const auto key = std::make_pair(std::min(a, b), std::max(a, b));
        out += "  \"" + dot_escape(a) + "\" -- \"" + dot_escape(b) + "\"";
        if (red.count(key) > 0) {
            out += " [color=red, penwidth=2.5]";
        }
        out += ";\n";
    }
    out += "}\n";
    return out;
}

std::string render_html(const harm::NetworkModel& net, const std::vector<std::string>& highlight,
                        const assess::SystemAssessment& row) {
    check_highlight(net, highlight);
    const auto red = highlight_edges(highlight);
    const std::set<std::string> on_path(highlight.begin(), highlight.end());

    // Deterministic circular layout: devices sorted by name around a circle,
    // attacker on the far left.
    const double width = 840.0, height = 560.0;
    const double cx = width / 2.0 + 60.0, cy = height / 2.0, radius = 210.0;
    std::map<std::string, std::pair<double, double>> pos;
    pos[harm::kAttackerNode] = {60.0, cy};
    {
        std::size_t i = 0;
        const double n = static_cast<double>(net.nodes.size());
        for (const auto& [name, node] : net.nodes) {
            const double angle = 2.0 * 3.14159265358979323846 * static_cast<double>(i) / n;
            pos[name] = {cx + radius * std::cos(angle), cy + radius * std::sin(angle)};
            ++i;
        }
    }
    auto fmt = [](double v) { return format_fixed(v, 1); };

    std::string svg;
    auto line = [&](const std::string& a, const std::string& b, bool is_red) {
        const auto& [x1, y1] = pos.at(a);
        const auto& [x2, y2] = pos.at(b);
        svg += "  <line x1=\"" + fmt(x1) + "\" y1=\"" + fmt(y1) + "\" x2=\"" + fmt(x2) +
               "\" y2=\"" + fmt(y2) + "\" stroke=\"" + (is_red ? "#d32f2f" : "#90a4c8") +
               "\" stroke-width=\"" + (is_red ? "3" : "1.5") + "\"/>\n";
    };
    // Plain edges first so the red path draws on top.
    std::vector<std::pair<std::string, std::string>> all_edges;
    for (const auto& entry : net.entry_points) all_edges.emplace_back(harm::kAttackerNode, entry);
    for (const auto& edge : net.edges) all_edges.push_back(edge);
    for (const auto& [a, b] : all_edges) {
        if (red.count({std::min(a, b), std::max(a, b)}) == 0) line(a, b, false);
    }
    for (const auto& [a, b] : all_edges) {
        if (red.count({std::min(a, b), std::max(a, b)}) > 0) line(a, b, true);
    }
    for (const auto& [name, p] : pos) {
        const bool is_attacker = name == harm::kAttackerNode;
        const bool is_target = net.targets.count(name) > 0;
        std::string fill = is_attacker ? "#263238" : is_target ? "#fff6c0" : "#e3ecf7";
        std::string stroke = on_path.count(name) > 0 || is_attacker ? "#d32f2f" : "#4a6fa5";
        svg += "  <circle cx=\"" + fmt(p.first) + "\" cy=\"" + fmt(p.second) +
               "\" r=\"22\" fill=\"" + fill + "\" stroke=\"" + stroke + "\" stroke-width=\"2\"/>\n";
        svg += "  <text x=\"" + fmt(p.first) + "\" y=\"" + fmt(p.second - 28.0) +
               "\" text-anchor=\"middle\" font-size=\"12\"" +
               (is_attacker ? " fill=\"#263238\" font-weight=\"bold\"" : "") + ">" +
               html_escape(name) + "</text>\n";
    }

    std::string sequence;
    {
        std::vector<std::string> walk;
        walk.push_back(harm::kAttackerNode);
        walk.insert(walk.end(), highlight.begin(), highlight.end());
        for (std::size_t i = 0; i < walk.size(); ++i) {
            if (i > 0) sequence += " <span class=\"arrow\">→</span> ";
            sequence += "<span class=\"step\">" + html_escape(walk[i]) + "</span>";
        }
    }

    const auto report_json =
        nlohmann::ordered_json{{"system", row.system_name},
                               {"max_risk_path", harm::format_path(highlight)},
                               {"probability", round_to(row.pred.probability, 6)},
                               {"impact", round_to(row.pred.impact, 4)},
                               {"risk", round_to(row.pred.risk, 4)},
                               {"base", round_to(row.pred.base, 1)}}
            .dump(2);

    std::string html;
    html += "<!DOCTYPE html>\n<html lang=\"en\">\n<head>\n<meta charset=\"utf-8\">\n";
    html += "<title>" + html_escape(net.name) + " — attack path with the highest risk</title>\n";
    html += "<style>\n";
    html += "body { font-family: sans-serif; margin: 24px; color: #222; }\n";
    html += "h1 { font-size: 20px; }\n";
    html += ".metrics td, .metrics th { border: 1px solid #bbb; padding: 4px 10px; }\n";
    html += ".metrics { border-collapse: collapse; margin-bottom: 16px; }\n";
    html += ".sequence { margin-top: 16px; padding: 10px; background: #f6f6f6; }\n";
    html += ".step { font-weight: bold; }\n.arrow { color: #d32f2f; }\n";
    html += "</style>\n</head>\n<body>\n";
    html += "<h1>" + html_escape(net.name) + ": attack path with the highest risk</h1>\n";
    html += "<table class=\"metrics\">\n<tr><th>Probability</th><th>Impact</th><th>Risk</th>"
            "<th>Base score</th></tr>\n";
    html += "<tr><td>" + format_fixed(row.pred.probability, 6) + "</td><td>" +
            format_fixed(row.pred.impact, 4) + "</td><td>" + format_fixed(row.pred.risk, 4) +
            "</td><td>" + format_fixed(row.pred.base, 1) + "</td></tr>\n</table>\n";
    html += "<svg width=\"" + fmt(width + 120.0) + "\" height=\"" + fmt(height) +
            "\" viewBox=\"0 0 " + fmt(width + 120.0) + " " + fmt(height) +
            "\" xmlns=\"http://www.w3.org/2000/svg\">\n";
    html += svg;
    html += "</svg>\n";
    html += "<div class=\"sequence\">Sequence of nodes on the most risky path: " + sequence +
            "</div>\n";
    html += "<script type=\"application/json\" id=\"assessment-data\">\n" + report_json +
            "\n</script>\n";
    html += "</body>\n</html>\n";
    return html;
}

}  // namespace iotsec::viz
