#include "ptpdelay/error.hpp"
#include "ptpdelay/harness/scenario.hpp"

#include <algorithm>
#include <utility>

namespace ptpdelay::harness
{

namespace
{

const std::vector<std::pair<std::string, std::string>>& registry()
{
    static const std::vector<std::pair<std::string, std::string>> entries = [] {
        std::vector<std::pair<std::string, std::string>> v = {
#include "bundled_scenarios.inc"
        };
        std::sort(v.begin(), v.end());
        return v;
    }();
    return entries;
}

} // namespace

const std::vector<std::string>& bundled_scenario_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> v;
        for (const auto& [name, text] : registry())
        {
            (void)text;
            v.push_back(name);
        }
        return v;
    }();
    return names;
}

const std::string& bundled_scenario_text(const std::string& name)
{
    for (const auto& [n, text] : registry())
    {
        if (n == name)
        {
            return text;
        }
    }
    throw ConfigError("no bundled scenario named '" + name + "'");
}

Scenario bundled_scenario(const std::string& name)
{
    return parse_scenario_text(bundled_scenario_text(name), "builtin:" + name);
}

} // namespace ptpdelay::harness
