#pragma once

#include <fstream>
#include <string>

#include <json.hpp>

#include "ctlnav/core/errors.hpp"

namespace ctlnav {

inline nlohmann::json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw ParseError("cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error& e) {
        throw ParseError(path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const nlohmann::json& j, int indent = -1)
{
    std::ofstream out(path);
    if (!out)
        throw ParseError("cannot write " + path);
    out << j.dump(indent) << '\n';
}

} // namespace ctlnav
