#ifndef DINCL_IO_FORMATS_HPP
#define DINCL_IO_FORMATS_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "dincl/multiflow.hpp"
#include "dincl/solver.hpp"

namespace dincl::io {

/// Plain comma-separated table. Cells never contain commas or newlines.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    friend bool operator==(const CsvTable&, const CsvTable&) = default;
};

std::string write_csv(const CsvTable& table);
/// Throws ConfigError on ragged rows or an empty input.
CsvTable parse_csv(std::string_view text);

/// Header `t,x1..xn,v1..vn`; the last row has blank velocity cells.
std::string write_trajectory_csv(const Trajectory& traj);
/// Times, states and velocities only; metadata lives in the sidecar.
Trajectory parse_trajectory_csv(std::string_view text);

struct TrajectoryMeta {
    int k = 0;
    double h = 0.0;
    double m = 0.0;
    double delta = 0.0;
    std::string strategy;
    std::uint64_t seed = 0;
    /// Face name ("x1+") or "none".
    std::string exit_face = "none";
    double exit_time = 0.0;

    friend bool operator==(const TrajectoryMeta&, const TrajectoryMeta&) = default;
};

TrajectoryMeta make_meta(const Trajectory& traj, const StepPlan& plan, const SelectionStrategy& strategy,
                         std::uint64_t seed);
/// `key=value` lines in a fixed order.
std::string write_meta(const TrajectoryMeta& meta);
TrajectoryMeta parse_meta(std::string_view text);

/// Several runs in one table: `run,strategy,t,x1..xn,v1..vn`.
std::string write_funnel_csv(const std::vector<Trajectory>& runs, const std::vector<std::string>& strategies);

/// Header `# t=<t> grid=<lo:hi,...;pitch,...> provenance=<k,delta,seed,budget>`
/// then one `a b` pair per line in sorted order.
std::string write_relation(const Relation& rel, const Provenance& prov);

struct RelationFile {
    Relation relation;
    int k = 0;
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::size_t budget = 0;
};

RelationFile parse_relation(std::string_view text);

} // namespace dincl::io

#endif // DINCL_IO_FORMATS_HPP
