#include <json.hpp>

#include "radnas/arch.hpp"

namespace radnas::arch {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json block_to_json(const BlockSpec& b) {
    return ordered_json{{"input_a", b.input_a},
                        {"input_b", b.input_b},
                        {"op_a", to_string(b.op_a)},
                        {"op_b", to_string(b.op_b)},
                        {"combine", to_string(b.combine)}};
}

BlockSpec block_from_json(const ordered_json& j) {
    BlockSpec b;
    b.input_a = j.at("input_a").get<int>();
    b.input_b = j.at("input_b").get<int>();
    if (b.input_a < 0 || b.input_a > 1 || b.input_b < 0 || b.input_b > 1) {
        throw ParseError("block input indices must be 0 or 1");
    }
    b.op_a = op_from_string(j.at("op_a").get<std::string>());
    b.op_b = op_from_string(j.at("op_b").get<std::string>());
    b.combine = combine_from_string(j.at("combine").get<std::string>());
    return b;
}

}  // namespace

std::string serialize_spec(const ArchitectureSpec& spec) {
    ordered_json j;
    j["version"] = 1;
    j["cells"] = ordered_json{{"normal", block_to_json(spec.normal.block)},
                              {"reduction", block_to_json(spec.reduction.block)},
                              {"upsample", block_to_json(spec.upsample.block)}};
    j["macro"] = ordered_json{{"R", spec.macro.reduction_stages},
                              {"normals_per_stage", spec.macro.normals_per_stage},
                              {"base_channels", spec.macro.base_channels},
                              {"in_channels", spec.macro.in_channels}};
    j["head"] = spec.with_head;
    return j.dump(2) + "\n";
}

ArchitectureSpec deserialize_spec(const std::string& text) {
    ordered_json j;
    try {
        j = ordered_json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // e.what() carries the byte offset of the failure.
        throw ParseError(std::string("architecture document: ") + e.what());
    }
    try {
        ArchitectureSpec spec;
        const int version = j.at("version").get<int>();
        if (version != 1) {
            throw ParseError("unsupported document version " + std::to_string(version));
        }
        const auto& cells = j.at("cells");
        spec.normal = CellSpec{CellKind::normal, block_from_json(cells.at("normal"))};
        spec.reduction = CellSpec{CellKind::reduction, block_from_json(cells.at("reduction"))};
        spec.upsample = CellSpec{CellKind::upsample, block_from_json(cells.at("upsample"))};
        const auto& macro = j.at("macro");
        spec.macro.reduction_stages = macro.at("R").get<int>();
        spec.macro.normals_per_stage = macro.at("normals_per_stage").get<int>();
        spec.macro.base_channels = macro.at("base_channels").get<int>();
        spec.macro.in_channels = macro.value("in_channels", 1);
        spec.with_head = j.at("head").get<bool>();
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw ParseError(std::string("architecture document: ") + e.what());
    }
}

}  // namespace radnas::arch
