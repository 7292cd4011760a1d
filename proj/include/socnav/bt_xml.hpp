#pragma once

#include <string>

#include "socnav/bt.hpp"

namespace socnav::io {

/// Parse a behavior tree from the project XML dialect (tags are node kinds or
/// registry leaf names, attributes are parameters). Throws
/// std::runtime_error with the node path on structural or naming errors.
bt::NodePtr parse_bt(const std::string& xml);

/// Serialize a tree back to the XML dialect (used to inspect generated
/// preset trees).
std::string bt_to_xml(const bt::Node& tree);

}  // namespace socnav::io
