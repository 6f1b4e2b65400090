#ifndef DINCL_IO_SVG_HPP
#define DINCL_IO_SVG_HPP

#include <string>
#include <vector>

#include "dincl/filippov.hpp"
#include "dincl/solver.hpp"

namespace dincl::io {

struct SvgOptions {
    std::string title;
    /// Omits the generation-time comment so output is byte-stable.
    bool deterministic = false;
    int size = 600;
};

/// Phase portrait over the system's domain: region shading, switching curves,
/// trajectory polylines and endpoint markers. One-dimensional systems are
/// drawn as x against t. Throws ContractViolation above two dimensions.
std::string render_svg(const FilippovSystem& system, const std::vector<Trajectory>& trajectories,
                       const SvgOptions& options);

} // namespace dincl::io

#endif // DINCL_IO_SVG_HPP
