#include "socnav/bt_xml.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>
#include <sstream>
#include <stdexcept>

#include "socnav/behaviors.hpp"
#include "socnav/parse_util.hpp"

namespace socnav::io {

namespace {

namespace pt = boost::property_tree;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::runtime_error("BT XML error at " + path + ": " + msg);
}

bt::ParamMap attributes(const pt::ptree& node) {
    bt::ParamMap params;
    if (auto attrs = node.get_child_optional("<xmlattr>"))
        for (const auto& [key, value] : *attrs) params[key] = value.get_value<std::string>();
    return params;
}

std::size_t element_child_count(const pt::ptree& node) {
    std::size_t n = 0;
    for (const auto& [key, child] : node) {
        (void)child;
        if (key != "<xmlattr>" && key != "<xmlcomment>") ++n;
    }
    return n;
}

bt::NodePtr build(const std::string& tag, const pt::ptree& node, const std::string& parent_path,
                  int sibling_index, int& uid) {
    const std::string path = parent_path + "/" + tag + "[" + std::to_string(sibling_index) + "]";
    bt::ParamMap params = attributes(node);
    const std::size_t n_children = element_child_count(node);

    auto build_children = [&](bt::Composite& parent) {
        int index = 0;
        for (const auto& [key, child] : node) {
            if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
            parent.add_child(build(key, child, path, index++, uid));
        }
    };
    auto only_child = [&]() -> bt::NodePtr {
        if (n_children != 1) fail(path, "decorator must have exactly one child, has " +
                                            std::to_string(n_children));
        int index = 0;
        for (const auto& [key, child] : node) {
            if (key == "<xmlattr>" || key == "<xmlcomment>") continue;
            return build(key, child, path, index++, uid);
        }
        fail(path, "decorator must have exactly one child");
    };
    auto attr_number = [&](const char* name) {
        auto it = params.find(name);
        if (it == params.end()) fail(path, std::string("missing attribute '") + name + "'");
        try {
            return parse_double(it->second, name);
        } catch (const std::exception& e) {
            fail(path, e.what());
        }
    };

    if (tag == "Sequence" || tag == "ReactiveSequence" || tag == "Fallback") {
        if (!params.empty()) fail(path, "control node takes no attributes");
        std::unique_ptr<bt::Composite> c;
        if (tag == "Sequence") c = std::make_unique<bt::SequenceNode>();
        else if (tag == "ReactiveSequence") c = std::make_unique<bt::ReactiveSequenceNode>();
        else c = std::make_unique<bt::FallbackNode>();
        build_children(*c);
        return c;
    }
    if (tag == "Parallel") {
        int threshold = static_cast<int>(n_children);
        if (params.count("threshold")) threshold = static_cast<int>(attr_number("threshold"));
        if (n_children == 0) fail(path, "Parallel needs at least one child");
        if (threshold < 1 || threshold > static_cast<int>(n_children))
            fail(path, "Parallel threshold " + std::to_string(threshold) + " out of range [1, " +
                           std::to_string(n_children) + "]");
        auto c = std::make_unique<bt::ParallelNode>(threshold);
        build_children(*c);
        return c;
    }
    if (tag == "Inverter") {
        if (!params.empty()) fail(path, "Inverter takes no attributes");
        return std::make_unique<bt::InverterNode>(only_child());
    }
    if (tag == "Repeat") {
        std::optional<int> times;
        if (params.count("times")) {
            times = static_cast<int>(attr_number("times"));
            if (*times < 1) fail(path, "Repeat times must be >= 1");
            if (params.count("forever")) fail(path, "Repeat takes either 'times' or 'forever'");
        } else if (params.count("forever")) {
            if (!parse_bool(params.at("forever"), "forever")) fail(path, "forever must be true");
        }
        return std::make_unique<bt::RepeatNode>(only_child(), times);
    }
    if (tag == "Timeout") {
        const double seconds = attr_number("seconds");
        if (seconds <= 0.0) fail(path, "Timeout seconds must be > 0");
        return std::make_unique<bt::TimeoutNode>(only_child(), seconds);
    }

    // Anything else must be a registry leaf.
    if (n_children != 0) fail(path, "leaf node '" + tag + "' cannot have children");
    try {
        return behaviors::NodeRegistry::instance().make_leaf(tag, params, uid++);
    } catch (const std::exception& e) {
        fail(path, e.what());
    }
}

void serialize(const bt::Node& node, std::ostream& out, int depth) {
    const std::string indent(static_cast<std::size_t>(depth) * 2, ' ');
    std::string tag = node.display_name();
    std::string attrs;
    switch (node.kind()) {
        case bt::NodeKind::Parallel:
            attrs = " threshold=\"" +
                    std::to_string(static_cast<const bt::ParallelNode&>(node).threshold()) + "\"";
            break;
        case bt::NodeKind::Repeat: {
            const auto times = static_cast<const bt::RepeatNode&>(node).times();
            attrs = times ? " times=\"" + std::to_string(*times) + "\"" : " forever=\"true\"";
            break;
        }
        case bt::NodeKind::Timeout:
            attrs = " seconds=\"" + num_to_string(static_cast<const bt::TimeoutNode&>(node).limit()) + "\"";
            break;
        case bt::NodeKind::Action:
        case bt::NodeKind::Condition: {
            const auto& leaf = static_cast<const bt::LeafNode&>(node);
            for (const auto& [key, value] : leaf.raw_params())
                attrs += " " + key + "=\"" + value + "\"";
            break;
        }
        default:
            break;
    }
    if (node.child_count() == 0) {
        out << indent << "<" << tag << attrs << "/>\n";
        return;
    }
    out << indent << "<" << tag << attrs << ">\n";
    for (std::size_t i = 0; i < node.child_count(); ++i) serialize(*node.child(i), out, depth + 1);
    out << indent << "</" << tag << ">\n";
}

}  // namespace

bt::NodePtr parse_bt(const std::string& xml) {
    pt::ptree doc;
    std::istringstream in(xml);
    try {
        pt::read_xml(in, doc, pt::xml_parser::trim_whitespace);
    } catch (const pt::xml_parser_error& e) {
        throw std::runtime_error(std::string("BT XML parse error: ") + e.what());
    }
    std::size_t roots = 0;
    for (const auto& [key, child] : doc) {
        (void)child;
        if (key != "<xmlcomment>") ++roots;
    }
    if (roots != 1)
        throw std::runtime_error("BT XML must have exactly one root element, found " +
                                 std::to_string(roots));
    for (const auto& [key, child] : doc) {
        if (key == "<xmlcomment>") continue;
        int uid = 0;
        bt::NodePtr tree = build(key, child, "", 0, uid);
        bt::validate_structure(*tree);
        return tree;
    }
    throw std::runtime_error("BT XML has no root element");
}

std::string bt_to_xml(const bt::Node& tree) {
    std::ostringstream out;
    serialize(tree, out, 0);
    return out.str();
}

}  // namespace socnav::io
