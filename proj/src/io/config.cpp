#include "dincl/io/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "dincl/errors.hpp"
#include "dincl/expression.hpp"
#include "dincl/solver.hpp"

namespace dincl::io {

namespace {

using nlohmann::json;

class Reader {
public:
    explicit Reader(std::string origin) : origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& path, const std::string& message) const
    {
        throw ConfigError(origin_ + ": " + path + ": " + message);
    }

    const json& require(const json& obj, const std::string& path, const char* key) const
    {
        auto it = obj.find(key);
        if (it == obj.end()) {
            fail(join(path, key), "missing required field");
        }
        return *it;
    }

    void only_keys(const json& obj, const std::string& path, std::initializer_list<const char*> keys) const
    {
        if (!obj.is_object()) {
            fail(path.empty() ? "<root>" : path, "expected an object");
        }
        for (const auto& item : obj.items()) {
            bool known = false;
            for (const char* k : keys) {
                known = known || item.key() == k;
            }
            if (!known) {
                fail(join(path, item.key().c_str()), "unknown field");
            }
        }
    }

    double number(const json& v, const std::string& path) const
    {
        if (!v.is_number()) {
            fail(path, "expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            fail(path, "expected a finite number");
        }
        return d;
    }

    std::uint64_t unsigned_int(const json& v, const std::string& path) const
    {
        if (!v.is_number_unsigned()) {
            fail(path, "expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    int positive_int(const json& v, const std::string& path) const
    {
        const std::uint64_t n = unsigned_int(v, path);
        if (n < 1 || n > 100000000) {
            fail(path, "expected an integer in [1, 1e8]");
        }
        return static_cast<int>(n);
    }

    std::string string(const json& v, const std::string& path) const
    {
        if (!v.is_string()) {
            fail(path, "expected a string");
        }
        return v.get<std::string>();
    }

    std::vector<std::string> strings(const json& v, const std::string& path) const
    {
        if (!v.is_array()) {
            fail(path, "expected an array of strings");
        }
        std::vector<std::string> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(string(v[i], index(path, i)));
        }
        return out;
    }

    std::vector<double> numbers(const json& v, const std::string& path) const
    {
        if (!v.is_array()) {
            fail(path, "expected an array of numbers");
        }
        std::vector<double> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(number(v[i], index(path, i)));
        }
        return out;
    }

    Box box(const json& v, const std::string& path, std::size_t dim) const
    {
        only_keys(v, path, {"lo", "hi"});
        const std::vector<double> lo = numbers(require(v, path, "lo"), join(path, "lo"));
        const std::vector<double> hi = numbers(require(v, path, "hi"), join(path, "hi"));
        if (lo.size() != dim) {
            fail(join(path, "lo"), "expected " + std::to_string(dim) + " entries");
        }
        if (hi.size() != dim) {
            fail(join(path, "hi"), "expected " + std::to_string(dim) + " entries");
        }
        for (std::size_t i = 0; i < dim; ++i) {
            if (!(lo[i] <= hi[i])) {
                fail(path, "lo exceeds hi on axis " + std::to_string(i + 1));
            }
        }
        return Box(Vector(lo), Vector(hi));
    }

    Expression expression(const std::string& text, const std::string& path, std::size_t dim) const
    {
        try {
            return Expression::parse(text, dim);
        } catch (const ConfigError& e) {
            fail(path, e.what());
        }
    }

    static std::string join(const std::string& path, const char* key)
    {
        return path.empty() ? std::string(key) : path + "." + key;
    }

    static std::string index(const std::string& path, std::size_t i)
    {
        return path + "[" + std::to_string(i) + "]";
    }

    const std::string& origin() const noexcept { return origin_; }

private:
    std::string origin_;
};

std::string line_column(std::string_view text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

} // namespace

std::string fnv1a_hex(std::string_view bytes)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

SystemConfig parse_config(std::string_view text, const std::string& origin)
{
    const Reader rd(origin);
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + line_column(text, e.byte == 0 ? 0 : e.byte - 1) + ": invalid JSON");
    }
    rd.only_keys(root, "",
                 {"name", "description", "dimension", "domain", "switching", "regions", "boundary_tol", "K", "solver",
                  "reach"});

    SystemConfig cfg;
    cfg.source = std::string(text);
    if (root.contains("name")) {
        cfg.name = rd.string(root["name"], "name");
    }
    const std::uint64_t dim = rd.unsigned_int(rd.require(root, "", "dimension"), "dimension");
    if (dim < 1 || dim > 16) {
        rd.fail("dimension", "expected an integer in [1, 16]");
    }
    cfg.dimension = dim;
    cfg.domain = rd.box(rd.require(root, "", "domain"), "domain", dim);
    cfg.K = root.contains("K") ? rd.box(root["K"], "K", dim) : cfg.domain;
    if (!cfg.domain.encloses(cfg.K)) {
        rd.fail("K", "not contained in the domain");
    }
    if (root.contains("boundary_tol")) {
        cfg.boundary_tol = rd.number(root["boundary_tol"], "boundary_tol");
        if (!(cfg.boundary_tol > 0.0)) {
            rd.fail("boundary_tol", "must be positive");
        }
    }

    if (root.contains("switching")) {
        const json& sw = root["switching"];
        if (!sw.is_array()) {
            rd.fail("switching", "expected an array");
        }
        for (std::size_t j = 0; j < sw.size(); ++j) {
            const std::string path = Reader::index("switching", j);
            SwitchingSpec spec;
            if (sw[j].is_string()) {
                spec.expr = sw[j].get<std::string>();
            } else {
                rd.only_keys(sw[j], path, {"expr", "gradient"});
                spec.expr = rd.string(rd.require(sw[j], path, "expr"), Reader::join(path, "expr"));
                if (sw[j].contains("gradient")) {
                    spec.gradient = rd.strings(sw[j]["gradient"], Reader::join(path, "gradient"));
                    if (spec.gradient.size() != dim) {
                        rd.fail(Reader::join(path, "gradient"), "expected " + std::to_string(dim) + " components");
                    }
                }
            }
            cfg.switching.push_back(std::move(spec));
        }
    }

    const json& regions = rd.require(root, "", "regions");
    if (!regions.is_array() || regions.empty()) {
        rd.fail("regions", "expected a nonempty array");
    }
    std::set<int> ids;
    for (std::size_t i = 0; i < regions.size(); ++i) {
        const std::string path = Reader::index("regions", i);
        rd.only_keys(regions[i], path, {"id", "signs", "field"});
        RegionSpec spec;
        const json& id = rd.require(regions[i], path, "id");
        if (!id.is_number_integer()) {
            rd.fail(Reader::join(path, "id"), "expected an integer");
        }
        spec.id = id.get<int>();
        if (!ids.insert(spec.id).second) {
            rd.fail(Reader::join(path, "id"), "duplicate region id " + std::to_string(spec.id));
        }
        spec.signs = regions[i].contains("signs") ? rd.string(regions[i]["signs"], Reader::join(path, "signs")) : "";
        if (spec.signs.size() != cfg.switching.size()) {
            rd.fail(Reader::join(path, "signs"), "expected " + std::to_string(cfg.switching.size()) +
                                                     " sign characters, one per switching function");
        }
        for (char c : spec.signs) {
            if (c != '+' && c != '-' && c != '*') {
                rd.fail(Reader::join(path, "signs"), std::string("invalid sign '") + c + "'");
            }
        }
        spec.field = rd.strings(rd.require(regions[i], path, "field"), Reader::join(path, "field"));
        if (spec.field.size() != dim) {
            rd.fail(Reader::join(path, "field"), "expected " + std::to_string(dim) + " components");
        }
        cfg.regions.push_back(std::move(spec));
    }

    if (root.contains("solver")) {
        const json& s = root["solver"];
        rd.only_keys(s, "solver", {"k", "strategy", "seed"});
        if (s.contains("k")) {
            cfg.solver.k = rd.positive_int(s["k"], "solver.k");
        }
        if (s.contains("strategy")) {
            cfg.solver.strategy = rd.string(s["strategy"], "solver.strategy");
            try {
                parse_strategy(cfg.solver.strategy);
            } catch (const ConfigError& e) {
                rd.fail("solver.strategy", e.what());
            }
        }
        if (s.contains("seed")) {
            cfg.solver.seed = rd.unsigned_int(s["seed"], "solver.seed");
        }
    }

    if (root.contains("reach")) {
        const json& r = root["reach"];
        rd.only_keys(r, "reach", {"pitch", "times", "budget", "k"});
        if (r.contains("pitch")) {
            cfg.reach.pitch = rd.number(r["pitch"], "reach.pitch");
            if (!(cfg.reach.pitch > 0.0)) {
                rd.fail("reach.pitch", "must be positive");
            }
        }
        if (r.contains("times")) {
            cfg.reach.times = rd.numbers(r["times"], "reach.times");
            if (cfg.reach.times.empty()) {
                rd.fail("reach.times", "must be nonempty");
            }
            for (std::size_t i = 0; i < cfg.reach.times.size(); ++i) {
                if (cfg.reach.times[i] < 0.0) {
                    rd.fail(Reader::index("reach.times", i), "must be non-negative");
                }
            }
        }
        if (r.contains("budget")) {
            cfg.reach.budget = static_cast<std::size_t>(rd.positive_int(r["budget"], "reach.budget"));
        }
        if (r.contains("k")) {
            cfg.reach.k = rd.positive_int(r["k"], "reach.k");
        }
    }

    // Expressions are parsed here so that errors carry their field path.
    for (std::size_t j = 0; j < cfg.switching.size(); ++j) {
        const std::string path = Reader::index("switching", j);
        rd.expression(cfg.switching[j].expr, Reader::join(path, "expr"), dim);
        for (std::size_t i = 0; i < cfg.switching[j].gradient.size(); ++i) {
            rd.expression(cfg.switching[j].gradient[i], Reader::index(Reader::join(path, "gradient"), i), dim);
        }
    }
    for (std::size_t r = 0; r < cfg.regions.size(); ++r) {
        const std::string path = Reader::index("regions", r);
        for (std::size_t i = 0; i < cfg.regions[r].field.size(); ++i) {
            rd.expression(cfg.regions[r].field[i], Reader::index(Reader::join(path, "field"), i), dim);
        }
    }

    try {
        cfg.system = build_system(cfg);
    } catch (const ConfigError& e) {
        throw ConfigError(origin + ": regions: " + e.what());
    } catch (const Error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    return cfg;
}

SystemConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError(path.string() + ": cannot open config file");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str(), path.string());
}

std::shared_ptr<const FilippovSystem> build_system(const SystemConfig& config)
{
    const std::size_t dim = config.dimension;
    std::vector<SwitchingFunction> switching;
    for (const SwitchingSpec& s : config.switching) {
        std::vector<Expression> grad;
        for (const std::string& g : s.gradient) {
            grad.push_back(Expression::parse(g, dim));
        }
        switching.push_back(SwitchingFunction::from_expression(Expression::parse(s.expr, dim), std::move(grad)));
    }
    std::vector<Region> regions;
    for (const RegionSpec& r : config.regions) {
        std::vector<Sign> signs;
        for (char c : r.signs) {
            signs.push_back(parse_sign(c));
        }
        std::vector<Expression> field;
        for (const std::string& f : r.field) {
            field.push_back(Expression::parse(f, dim));
        }
        regions.push_back(Region::from_expressions(r.id, std::move(signs), field));
    }
    return std::make_shared<const FilippovSystem>(std::move(switching), std::move(regions), config.boundary_tol,
                                                  config.domain);
}

} // namespace dincl::io
