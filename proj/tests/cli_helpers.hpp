#ifndef DINCL_TESTS_CLI_HELPERS_HPP
#define DINCL_TESTS_CLI_HELPERS_HPP

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dincl/cli.hpp"

namespace clitest {

struct Result {
    int code = 0;
    std::string out;
    std::string err;
};

inline Result run(std::vector<std::string> args)
{
    args.insert(args.begin(), "dincl");
    std::ostringstream out;
    std::ostringstream err;
    const int code = dincl::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

inline std::filesystem::path scratch(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("dincl_test_" + name);
    std::filesystem::remove_all(dir);
    return dir;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

/// Every file of `dir` except manifest.json, keyed by name.
inline std::map<std::string, std::string> outputs(const std::filesystem::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : std::filesystem::directory_iterator(dir)) {
        if (e.path().filename() != "manifest.json") {
            files[e.path().filename().string()] = slurp(e.path());
        }
    }
    return files;
}

} // namespace clitest

#endif // DINCL_TESTS_CLI_HELPERS_HPP
