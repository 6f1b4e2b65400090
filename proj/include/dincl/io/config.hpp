#ifndef DINCL_IO_CONFIG_HPP
#define DINCL_IO_CONFIG_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dincl/filippov.hpp"
#include "dincl/vector.hpp"

namespace dincl::io {

struct SwitchingSpec {
    std::string expr;
    /// Analytic gradient components; empty for finite differences.
    std::vector<std::string> gradient;
};

struct RegionSpec {
    int id = 0;
    /// One of '+', '-', '*' per switching function.
    std::string signs;
    std::vector<std::string> field;
};

struct SolverDefaults {
    int k = 1000;
    std::string strategy = "sliding";
    std::uint64_t seed = 0;
};

struct ReachDefaults {
    double pitch = 0.05;
    std::vector<double> times{0.0, 0.5, 1.0};
    std::size_t budget = 20;
    int k = 100;
};

/// A system description loaded from a JSON file and fully validated.
///
/// ```json
/// {
///   "name": "relay",
///   "dimension": 1,
///   "domain": {"lo": [-2], "hi": [2]},
///   "switching": [{"expr": "x1", "gradient": ["1"]}],
///   "regions": [{"id": 0, "signs": "-", "field": ["1"]},
///               {"id": 1, "signs": "+", "field": ["-1"]}],
///   "boundary_tol": 1e-8,
///   "K": {"lo": [-1], "hi": [1]},
///   "solver": {"k": 2000, "strategy": "sliding", "seed": 0},
///   "reach": {"pitch": 0.02, "times": [0, 0.5, 1], "budget": 20, "k": 100}
/// }
/// ```
struct SystemConfig {
    std::string name;
    std::size_t dimension = 0;
    Box domain;
    std::vector<SwitchingSpec> switching;
    std::vector<RegionSpec> regions;
    double boundary_tol = 1e-8;
    Box K;
    SolverDefaults solver;
    ReachDefaults reach;
    /// Raw file text; the manifest hashes it.
    std::string source;
    std::shared_ptr<const FilippovSystem> system;
};

/// Parses and validates a config. Every problem is reported as a ConfigError
/// whose message starts with `origin` and the field path (or line and column
/// for JSON syntax errors).
SystemConfig parse_config(std::string_view text, const std::string& origin = "<config>");
SystemConfig load_config(const std::filesystem::path& path);

/// Builds the Filippov system described by `config`.
std::shared_ptr<const FilippovSystem> build_system(const SystemConfig& config);

/// 64-bit FNV-1a, printed as 16 hex digits.
std::string fnv1a_hex(std::string_view bytes);

} // namespace dincl::io

#endif // DINCL_IO_CONFIG_HPP
