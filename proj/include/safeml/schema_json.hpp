#pragma once

#include "json.hpp"
#include "safeml/error.hpp"
#include "safeml/tabular.hpp"

#include <fstream>
#include <string>

namespace safeml {

using json = nlohmann::json;

inline json schema_to_json(const Schema& schema)
{
    json out = json::array();
    for (const auto& col : schema) {
        json c = {{"name", col.name}, {"kind", col.is_categorical() ? "categorical" : "numeric"}};
        if (col.is_categorical())
            c["levels"] = col.levels;
        out.push_back(std::move(c));
    }
    return out;
}

inline Schema schema_from_json(const json& j)
{
    if (!j.is_array())
        fail(ErrorCode::malformed_file, "schema must be an array");
    Schema schema;
    for (const auto& c : j) {
        ColumnSchema col;
        col.name = c.at("name").get<std::string>();
        const auto kind = c.at("kind").get<std::string>();
        if (kind == "categorical") {
            col.kind = ColumnKind::categorical;
            col.levels = c.at("levels").get<std::vector<std::string>>();
        } else if (kind != "numeric") {
            fail(ErrorCode::malformed_file, "unknown column kind '" + kind + "'");
        }
        schema.push_back(std::move(col));
    }
    return schema;
}

inline json read_json_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::malformed_file, "cannot open '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        fail(ErrorCode::malformed_file, path + ": " + e.what());
    }
}

inline void write_json_file(const std::string& path, const json& j)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::invalid_argument, "cannot write '" + path + "'");
    out << j.dump(2) << '\n';
}

} // namespace safeml
