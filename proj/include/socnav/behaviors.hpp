#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "socnav/bt.hpp"
#include "socnav/sfm.hpp"

namespace socnav::behaviors {

enum class ParamType { Number, Point, String, Id, IdList, Bool };

const char* to_string(ParamType t);

struct ParamSpec {
    std::string name;
    ParamType type;
    bool required = false;
    std::string default_value;  // textual, empty when required or truly optional
};

/// Descriptor of one registry leaf: schema plus factory.
struct LeafDesc {
    std::string name;
    bool condition = false;
    std::vector<ParamSpec> params;
    std::function<std::unique_ptr<bt::LeafImpl>(const bt::ParamMap&, int uid)> make;
    std::string summary;
};

/// The leaf-node catalog. Leaf names and parameter schemas are the contract
/// for the BT XML dialect.
class NodeRegistry {
public:
    static const NodeRegistry& instance();

    /// Canonical name for `name`, resolving spelling aliases; empty if unknown.
    std::string resolve(const std::string& name) const;
    const LeafDesc* find(const std::string& name) const;
    std::vector<const LeafDesc*> list() const;  // sorted by name

    /// Build a validated leaf node. Unknown leaf or bad/missing/unknown
    /// parameters throw std::invalid_argument. `uid` must be unique within
    /// the owning tree (used for blackboard-backed leaf state).
    bt::NodePtr make_leaf(const std::string& name, const bt::ParamMap& params, int uid) const;

private:
    NodeRegistry();
    std::vector<LeafDesc> leaves_;
    std::map<std::string, std::string> aliases_;
};

enum class ReactionPreset { Regular, Impassive, Surprised, Curious, Scared, Threatening };

const char* to_string(ReactionPreset p);
std::optional<ReactionPreset> reaction_preset_from_string(const std::string& s);

struct PresetBuild {
    bt::NodePtr tree;  // null = idle agent (no goals, regular/impassive)
    sfm::RobotMode robot_mode;
};

/// Generate the behavior tree realizing one of the six robot-reaction
/// presets over the agent's goal list.
PresetBuild build_reaction_preset(ReactionPreset kind, const std::vector<Vec2>& goals);

}  // namespace socnav::behaviors
