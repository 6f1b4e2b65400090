#include "dincl/io/svg.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <ctime>

#include "dincl/errors.hpp"

namespace dincl::io {

namespace {

constexpr int kMargin = 24;
constexpr int kShadeCells = 48;
constexpr int kContourCells = 96;

constexpr std::array<const char*, 8> kPalette = {"#4e79a7", "#f28e2b", "#59a14f", "#e15759",
                                                 "#76b7b2", "#edc948", "#b07aa1", "#9c755f"};

std::string fmt(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

// Affine map from a data window onto the square canvas; y grows upward.
struct Canvas {
    double x0, x1, y0, y1;
    int size;

    double px(double x) const { return kMargin + (x - x0) / (x1 - x0) * (size - 2 * kMargin); }
    double py(double y) const { return size - kMargin - (y - y0) / (y1 - y0) * (size - 2 * kMargin); }
};

std::string escape(const std::string& text)
{
    std::string out;
    for (char c : text) {
        switch (c) {
        case '&':
            out += "&amp;";
            break;
        case '<':
            out += "&lt;";
            break;
        case '>':
            out += "&gt;";
            break;
        default:
            out += c;
        }
    }
    return out;
}

std::string color_for(const FilippovSystem& sys, int region)
{
    for (std::size_t i = 0; i < sys.regions().size(); ++i) {
        if (sys.regions()[i].id == region) {
            return kPalette[i % kPalette.size()];
        }
    }
    return "#cccccc";
}

std::string shade_cell(const FilippovSystem& sys, const Vector& x)
{
    const Classification c = sys.classify(x);
    if (const auto* in = std::get_if<Interior>(&c)) {
        return color_for(sys, in->region);
    }
    return {};
}

void polyline(std::string& out, const std::vector<std::pair<double, double>>& pts, const char* color)
{
    out += "<polyline fill=\"none\" stroke=\"";
    out += color;
    out += "\" stroke-width=\"1\" stroke-opacity=\"0.7\" points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
        if (i > 0) {
            out += ' ';
        }
        out += fmt(pts[i].first) + ',' + fmt(pts[i].second);
    }
    out += "\"/>\n";
}

void marker(std::string& out, double x, double y)
{
    out += "<circle cx=\"" + fmt(x) + "\" cy=\"" + fmt(y) + "\" r=\"3\" fill=\"#d62728\"/>\n";
}

void render_2d(std::string& out, const FilippovSystem& sys, const std::vector<Trajectory>& trajs, int size)
{
    const Box& dom = sys.domain();
    const Canvas cv{dom.lo()[0], dom.hi()[0], dom.lo()[1], dom.hi()[1], size};
    const double w = dom.extent(0) / kShadeCells;
    const double h = dom.extent(1) / kShadeCells;
    out += "<g fill-opacity=\"0.18\">\n";
    for (int j = 0; j < kShadeCells; ++j) {
        for (int i = 0; i < kShadeCells; ++i) {
            const double cx = cv.x0 + (i + 0.5) * w;
            const double cy = cv.y0 + (j + 0.5) * h;
            const std::string color = shade_cell(sys, Vector{cx, cy});
            if (color.empty()) {
                continue;
            }
            out += "<rect x=\"" + fmt(cv.px(cx - 0.5 * w)) + "\" y=\"" + fmt(cv.py(cy + 0.5 * h)) + "\" width=\"" +
                   fmt(cv.px(cx + 0.5 * w) - cv.px(cx - 0.5 * w)) + "\" height=\"" +
                   fmt(cv.py(cy - 0.5 * h) - cv.py(cy + 0.5 * h)) + "\" fill=\"" + color + "\"/>\n";
        }
    }
    out += "</g>\n";

    // Switching curves by marching squares on the zero level set.
    const double cw = dom.extent(0) / kContourCells;
    const double ch = dom.extent(1) / kContourCells;
    for (std::size_t s = 0; s < sys.switching().size(); ++s) {
        std::vector<double> val((kContourCells + 1) * (kContourCells + 1));
        for (int j = 0; j <= kContourCells; ++j) {
            for (int i = 0; i <= kContourCells; ++i) {
                val[j * (kContourCells + 1) + i] =
                    sys.switching_value(s, Vector{cv.x0 + i * cw, cv.y0 + j * ch});
            }
        }
        std::string path;
        for (int j = 0; j < kContourCells; ++j) {
            for (int i = 0; i < kContourCells; ++i) {
                const double v[4] = {val[j * (kContourCells + 1) + i], val[j * (kContourCells + 1) + i + 1],
                                     val[(j + 1) * (kContourCells + 1) + i + 1],
                                     val[(j + 1) * (kContourCells + 1) + i]};
                const double xs[4] = {cv.x0 + i * cw, cv.x0 + (i + 1) * cw, cv.x0 + (i + 1) * cw, cv.x0 + i * cw};
                const double ys[4] = {cv.y0 + j * ch, cv.y0 + j * ch, cv.y0 + (j + 1) * ch, cv.y0 + (j + 1) * ch};
                std::vector<std::pair<double, double>> hits;
                for (int e = 0; e < 4; ++e) {
                    const double a = v[e];
                    const double b = v[(e + 1) % 4];
                    if ((a < 0.0) != (b < 0.0)) {
                        const double u = a / (a - b);
                        hits.emplace_back(xs[e] + u * (xs[(e + 1) % 4] - xs[e]),
                                          ys[e] + u * (ys[(e + 1) % 4] - ys[e]));
                    }
                }
                for (std::size_t k = 0; k + 1 < hits.size(); k += 2) {
                    path += "M" + fmt(cv.px(hits[k].first)) + ' ' + fmt(cv.py(hits[k].second)) + 'L' +
                            fmt(cv.px(hits[k + 1].first)) + ' ' + fmt(cv.py(hits[k + 1].second));
                }
            }
        }
        if (!path.empty()) {
            out += "<path fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\" d=\"" + path + "\"/>\n";
        }
    }

    for (const Trajectory& t : trajs) {
        std::vector<std::pair<double, double>> pts;
        for (const Vector& x : t.states) {
            pts.emplace_back(cv.px(x[0]), cv.py(x[1]));
        }
        polyline(out, pts, "#1f3b73");
    }
    for (const Trajectory& t : trajs) {
        marker(out, cv.px(t.final_state()[0]), cv.py(t.final_state()[1]));
    }
}

void render_1d(std::string& out, const FilippovSystem& sys, const std::vector<Trajectory>& trajs, int size)
{
    const Box& dom = sys.domain();
    double t0 = 0.0;
    double t1 = 0.0;
    for (const Trajectory& t : trajs) {
        t0 = std::min(t0, t.times.front());
        t1 = std::max(t1, t.final_time());
    }
    if (t1 <= t0) {
        t1 = t0 + 1.0;
    }
    const double y0 = dom.lo()[0];
    const double y1 = dom.hi()[0] > y0 ? dom.hi()[0] : y0 + 1.0;
    const Canvas cv{t0, t1, y0, y1, size};
    const double band = (y1 - y0) / kShadeCells;
    out += "<g fill-opacity=\"0.18\">\n";
    for (int j = 0; j < kShadeCells; ++j) {
        const double c = y0 + (j + 0.5) * band;
        const std::string color = shade_cell(sys, Vector{c});
        if (color.empty()) {
            continue;
        }
        out += "<rect x=\"" + fmt(cv.px(t0)) + "\" y=\"" + fmt(cv.py(c + 0.5 * band)) + "\" width=\"" +
               fmt(cv.px(t1) - cv.px(t0)) + "\" height=\"" + fmt(cv.py(c - 0.5 * band) - cv.py(c + 0.5 * band)) +
               "\" fill=\"" + color + "\"/>\n";
    }
    out += "</g>\n";
    const double step = (y1 - y0) / kContourCells;
    for (std::size_t s = 0; s < sys.switching().size(); ++s) {
        double prev = sys.switching_value(s, Vector{y0});
        for (int j = 1; j <= kContourCells; ++j) {
            const double y = y0 + j * step;
            const double cur = sys.switching_value(s, Vector{y});
            if ((prev < 0.0) != (cur < 0.0)) {
                const double z = y - step + prev / (prev - cur) * step;
                out += "<line x1=\"" + fmt(cv.px(t0)) + "\" y1=\"" + fmt(cv.py(z)) + "\" x2=\"" + fmt(cv.px(t1)) +
                       "\" y2=\"" + fmt(cv.py(z)) + "\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
            }
            prev = cur;
        }
    }
    for (const Trajectory& t : trajs) {
        std::vector<std::pair<double, double>> pts;
        for (std::size_t i = 0; i < t.size(); ++i) {
            pts.emplace_back(cv.px(t.times[i]), cv.py(t.states[i][0]));
        }
        polyline(out, pts, "#1f3b73");
    }
    for (const Trajectory& t : trajs) {
        marker(out, cv.px(t.final_time()), cv.py(t.final_state()[0]));
    }
}

} // namespace

std::string render_svg(const FilippovSystem& system, const std::vector<Trajectory>& trajectories,
                       const SvgOptions& options)
{
    if (system.dim() > 2) {
        throw ContractViolation("render_svg: only 1-D and 2-D systems can be drawn");
    }
    const std::string side = std::to_string(options.size);
    std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    if (!options.deterministic) {
        const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
        char stamp[32];
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&now));
        out += std::string("<!-- generated ") + stamp + " -->\n";
    }
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + side + "\" height=\"" + side + "\" viewBox=\"0 0 " +
           side + ' ' + side + "\">\n";
    out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!options.title.empty()) {
        out += "<title>" + escape(options.title) + "</title>\n";
    }
    if (system.dim() == 2) {
        render_2d(out, system, trajectories, options.size);
    } else {
        render_1d(out, system, trajectories, options.size);
    }
    out += "</svg>\n";
    return out;
}

} // namespace dincl::io
