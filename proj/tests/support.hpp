#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "icsthreat/attack_graph.hpp"
#include "icsthreat/model.hpp"
#include "icsthreat/stride.hpp"

namespace testsupport {

inline std::filesystem::path source_dir()
{
    return ICSTHREAT_SOURCE_DIR;
}

inline std::filesystem::path data(const std::string& relative)
{
    return source_dir() / "data" / relative;
}

inline std::string slurp(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot open " + path.string());
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline icsthreat::SystemModel case_model(const std::string& name)
{
    return icsthreat::parse_model(slurp(data("cases/" + name + "/model.json")));
}

inline icsthreat::RuleSet case_rules(const std::string& name)
{
    return icsthreat::load_rules(slurp(data("cases/" + name + "/rules.json")));
}

inline icsthreat::AttackMatrix bundled_matrix()
{
    return icsthreat::load_attack_matrix(slurp(data("attack/ics_matrix.json")));
}

inline icsthreat::MappingTable bundled_mapping(const icsthreat::AttackMatrix& matrix)
{
    return icsthreat::load_mapping(slurp(data("attack/stride_mapping.json")), matrix);
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("icsthreat_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

} // namespace testsupport
