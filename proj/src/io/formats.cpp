#include "dincl/io/formats.hpp"

#include <charconv>
#include <sstream>

#include "dincl/errors.hpp"
#include "dincl/io/number_format.hpp"

namespace dincl::io {

namespace {

std::vector<std::string_view> split(std::string_view text, char sep)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const std::size_t pos = text.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(text.substr(start));
            return out;
        }
        out.push_back(text.substr(start, pos - start));
        start = pos + 1;
    }
}

std::vector<std::string_view> lines(std::string_view text)
{
    std::vector<std::string_view> out = split(text, '\n');
    for (auto& l : out) {
        if (!l.empty() && l.back() == '\r') {
            l.remove_suffix(1);
        }
    }
    while (!out.empty() && out.back().empty()) {
        out.pop_back();
    }
    return out;
}

template <typename T>
T parse_integer(std::string_view text, std::string_view what)
{
    T value{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw ConfigError(std::string(what) + ": expected an integer, got '" + std::string(text) + "'");
    }
    return value;
}

std::string join_numbers(const std::vector<double>& xs, char sep)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i > 0) {
            out += sep;
        }
        out += format_double(xs[i]);
    }
    return out;
}

std::string_view header_value(std::string_view header, std::string_view key)
{
    for (std::string_view token : split(header, ' ')) {
        if (token.size() > key.size() && token.substr(0, key.size()) == key && token[key.size()] == '=') {
            return token.substr(key.size() + 1);
        }
    }
    throw ConfigError("relation file: header lacks '" + std::string(key) + "='");
}

} // namespace

std::string write_csv(const CsvTable& table)
{
    std::string out;
    auto row = [&out](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i > 0) {
                out += ',';
            }
            out += cells[i];
        }
        out += '\n';
    };
    row(table.header);
    for (const auto& r : table.rows) {
        row(r);
    }
    return out;
}

CsvTable parse_csv(std::string_view text)
{
    const auto ls = lines(text);
    if (ls.empty()) {
        throw ConfigError("csv: empty input");
    }
    CsvTable table;
    for (std::string_view cell : split(ls[0], ',')) {
        table.header.emplace_back(cell);
    }
    for (std::size_t i = 1; i < ls.size(); ++i) {
        std::vector<std::string> row;
        for (std::string_view cell : split(ls[i], ',')) {
            row.emplace_back(cell);
        }
        if (row.size() != table.header.size()) {
            throw ConfigError("csv: line " + std::to_string(i + 1) + " has " + std::to_string(row.size()) +
                              " cells, expected " + std::to_string(table.header.size()));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string write_trajectory_csv(const Trajectory& traj)
{
    if (traj.size() == 0) {
        throw ContractViolation("write_trajectory_csv: empty trajectory");
    }
    const std::size_t n = traj.states.front().dim();
    CsvTable table;
    table.header.push_back("t");
    for (std::size_t i = 1; i <= n; ++i) {
        table.header.push_back("x" + std::to_string(i));
    }
    for (std::size_t i = 1; i <= n; ++i) {
        table.header.push_back("v" + std::to_string(i));
    }
    for (std::size_t r = 0; r < traj.size(); ++r) {
        std::vector<std::string> row{format_double(traj.times[r])};
        for (double x : traj.states[r].coords()) {
            row.push_back(format_double(x));
        }
        for (std::size_t i = 0; i < n; ++i) {
            row.push_back(r < traj.velocities.size() ? format_double(traj.velocities[r][i]) : std::string());
        }
        table.rows.push_back(std::move(row));
    }
    return write_csv(table);
}

Trajectory parse_trajectory_csv(std::string_view text)
{
    const CsvTable table = parse_csv(text);
    if (table.header.size() < 3 || table.header.size() % 2 == 0 || table.header[0] != "t") {
        throw ConfigError("trajectory csv: expected header t,x1..xn,v1..vn");
    }
    const std::size_t n = (table.header.size() - 1) / 2;
    if (table.rows.empty()) {
        throw ConfigError("trajectory csv: no rows");
    }
    Trajectory traj;
    for (std::size_t r = 0; r < table.rows.size(); ++r) {
        const auto& row = table.rows[r];
        const std::string where = "trajectory csv row " + std::to_string(r + 2);
        traj.times.push_back(parse_double(row[0], where));
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = parse_double(row[1 + i], where);
        }
        traj.states.emplace_back(std::move(x));
        const bool last = r + 1 == table.rows.size();
        if (!last) {
            std::vector<double> v(n);
            for (std::size_t i = 0; i < n; ++i) {
                v[i] = parse_double(row[1 + n + i], where);
            }
            traj.velocities.emplace_back(std::move(v));
        } else {
            for (std::size_t i = 0; i < n; ++i) {
                if (!row[1 + n + i].empty()) {
                    throw ConfigError(where + ": last row must have blank velocities");
                }
            }
        }
    }
    return traj;
}

TrajectoryMeta make_meta(const Trajectory& traj, const StepPlan& plan, const SelectionStrategy& strategy,
                         std::uint64_t seed)
{
    TrajectoryMeta meta;
    meta.k = plan.k;
    meta.h = plan.h;
    meta.m = plan.m;
    meta.delta = traj.delta;
    meta.strategy = to_string(strategy);
    meta.seed = seed;
    if (traj.exit) {
        meta.exit_face = face_name(*traj.exit);
        meta.exit_time = traj.exit->time;
    }
    return meta;
}

std::string write_meta(const TrajectoryMeta& meta)
{
    std::ostringstream out;
    out << "k=" << meta.k << '\n'
        << "h=" << format_double(meta.h) << '\n'
        << "m=" << format_double(meta.m) << '\n'
        << "delta=" << format_double(meta.delta) << '\n'
        << "strategy=" << meta.strategy << '\n'
        << "seed=" << meta.seed << '\n'
        << "exit_face=" << meta.exit_face << '\n'
        << "exit_time=" << format_double(meta.exit_time) << '\n';
    return out.str();
}

TrajectoryMeta parse_meta(std::string_view text)
{
    TrajectoryMeta meta;
    for (std::string_view line : lines(text)) {
        const std::size_t eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ConfigError("meta: malformed line '" + std::string(line) + "'");
        }
        const std::string_view key = line.substr(0, eq);
        const std::string_view value = line.substr(eq + 1);
        if (key == "k") {
            meta.k = parse_integer<int>(value, "meta k");
        } else if (key == "h") {
            meta.h = parse_double(value, "meta h");
        } else if (key == "m") {
            meta.m = parse_double(value, "meta m");
        } else if (key == "delta") {
            meta.delta = parse_double(value, "meta delta");
        } else if (key == "strategy") {
            meta.strategy = value;
        } else if (key == "seed") {
            meta.seed = parse_integer<std::uint64_t>(value, "meta seed");
        } else if (key == "exit_face") {
            meta.exit_face = value;
        } else if (key == "exit_time") {
            meta.exit_time = parse_double(value, "meta exit_time");
        } else {
            throw ConfigError("meta: unknown key '" + std::string(key) + "'");
        }
    }
    return meta;
}

std::string write_funnel_csv(const std::vector<Trajectory>& runs, const std::vector<std::string>& strategies)
{
    if (runs.empty()) {
        throw ContractViolation("write_funnel_csv: no runs");
    }
    const std::size_t n = runs.front().states.front().dim();
    CsvTable table;
    table.header = {"run", "strategy", "t"};
    for (std::size_t i = 1; i <= n; ++i) {
        table.header.push_back("x" + std::to_string(i));
    }
    for (std::size_t i = 1; i <= n; ++i) {
        table.header.push_back("v" + std::to_string(i));
    }
    for (std::size_t run = 0; run < runs.size(); ++run) {
        const Trajectory& traj = runs[run];
        for (std::size_t r = 0; r < traj.size(); ++r) {
            std::vector<std::string> row{std::to_string(run), strategies.at(run), format_double(traj.times[r])};
            for (double x : traj.states[r].coords()) {
                row.push_back(format_double(x));
            }
            for (std::size_t i = 0; i < n; ++i) {
                row.push_back(r < traj.velocities.size() ? format_double(traj.velocities[r][i]) : std::string());
            }
            table.rows.push_back(std::move(row));
        }
    }
    return write_csv(table);
}

std::string write_relation(const Relation& rel, const Provenance& prov)
{
    const Grid& g = rel.grid();
    std::string out = "# t=" + format_double(rel.t()) + " grid=";
    for (std::size_t d = 0; d < g.dim(); ++d) {
        if (d > 0) {
            out += ',';
        }
        out += format_double(g.box().lo()[d]) + ':' + format_double(g.box().hi()[d]);
    }
    out += ';' + join_numbers(g.pitch(), ',');
    out += " provenance=" + std::to_string(prov.k) + ',' + format_double(prov.delta) + ',' +
           std::to_string(prov.seed) + ',' + std::to_string(prov.budget) + '\n';
    for (const auto& [a, b] : rel.pairs()) {
        out += std::to_string(a);
        out += ' ';
        out += std::to_string(b);
        out += '\n';
    }
    return out;
}

RelationFile parse_relation(std::string_view text)
{
    const auto ls = lines(text);
    if (ls.empty() || ls[0].substr(0, 2) != "# ") {
        throw ConfigError("relation file: missing header line");
    }
    const std::string_view header = ls[0].substr(2);
    const double t = parse_double(header_value(header, "t"), "relation t");

    const std::string_view grid_text = header_value(header, "grid");
    const std::size_t semi = grid_text.find(';');
    if (semi == std::string_view::npos) {
        throw ConfigError("relation file: grid must be <box;pitch>");
    }
    std::vector<double> lo;
    std::vector<double> hi;
    for (std::string_view axis : split(grid_text.substr(0, semi), ',')) {
        const auto ends = split(axis, ':');
        if (ends.size() != 2) {
            throw ConfigError("relation file: malformed box axis '" + std::string(axis) + "'");
        }
        lo.push_back(parse_double(ends[0], "relation grid"));
        hi.push_back(parse_double(ends[1], "relation grid"));
    }
    std::vector<double> pitch;
    for (std::string_view p : split(grid_text.substr(semi + 1), ',')) {
        pitch.push_back(parse_double(p, "relation pitch"));
    }
    Grid grid(Box(Vector(lo), Vector(hi)), pitch);

    const auto prov = split(header_value(header, "provenance"), ',');
    if (prov.size() != 4) {
        throw ConfigError("relation file: provenance must be <k,delta,seed,budget>");
    }
    std::vector<CellPair> pairs;
    for (std::size_t i = 1; i < ls.size(); ++i) {
        const auto cells = split(ls[i], ' ');
        if (cells.size() != 2) {
            throw ConfigError("relation file: line " + std::to_string(i + 1) + " is not an 'a b' pair");
        }
        pairs.emplace_back(parse_integer<CellIndex>(cells[0], "relation index"),
                           parse_integer<CellIndex>(cells[1], "relation index"));
    }
    return RelationFile{Relation(std::move(grid), t, std::move(pairs)), parse_integer<int>(prov[0], "provenance k"),
                        parse_double(prov[1], "provenance delta"),
                        parse_integer<std::uint64_t>(prov[2], "provenance seed"),
                        parse_integer<std::size_t>(prov[3], "provenance budget")};
}

} // namespace dincl::io
