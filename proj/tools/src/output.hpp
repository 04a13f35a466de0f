#pragma once

#include "kellystop/cli/cli.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace kellystop::cli {

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(std::ostream& os, const Table& t, Format fmt);
nlohmann::json sim_json(const SimResult& r, const std::string& strategy);
void write_json(std::ostream& os, const nlohmann::json& j);

}  // namespace kellystop::cli
