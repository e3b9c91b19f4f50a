#include "axisdesc/render.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

namespace axisdesc {

namespace {

std::string num(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

void arrow(std::ofstream& out, double x0, double y0, double x1, double y1,
           const char* color) {
    out << "<line x1='" << num(x0) << "' y1='" << num(y0) << "' x2='" << num(x1) << "' y2='"
        << num(y1) << "' stroke='" << color << "' stroke-width='1.2'/>\n";
    const double dx = x1 - x0, dy = y1 - y0;
    const double len = std::sqrt(dx * dx + dy * dy);
    if (len < 1e-9) return;
    const double ux = dx / len, uy = dy / len;
    const double hx = x1 - 4.0 * ux, hy = y1 - 4.0 * uy;
    out << "<polygon points='" << num(x1) << "," << num(y1) << " " << num(hx - 2.0 * uy) << ","
        << num(hy + 2.0 * ux) << " " << num(hx + 2.0 * uy) << "," << num(hy - 2.0 * ux)
        << "' fill='" << color << "'/>\n";
}

}  // namespace

void render_svg(const ExtractResult& result, const std::string& path) {
    const ShapeMask& m = result.mask;
    std::ofstream out(path);
    if (!out) throw PipelineError(path + ": cannot open for writing");

    out << "<?xml version='1.0' encoding='UTF-8'?>\n";
    out << "<svg xmlns='http://www.w3.org/2000/svg' width='" << 3 * m.width << "' height='"
        << 3 * m.height << "' viewBox='0 0 " << m.width << " " << m.height << "'>\n";
    out << "<rect width='" << m.width << "' height='" << m.height << "' fill='white'/>\n";

    // Silhouette as one rect per interior row run.
    for (int y = 0; y < m.height; ++y) {
        int run = -1;
        for (int x = 0; x <= m.width; ++x) {
            const bool in = x < m.width && m.inside[m.idx(x, y)];
            if (in && run < 0) run = x;
            if (!in && run >= 0) {
                out << "<rect x='" << run << "' y='" << y << "' width='" << (x - run)
                    << "' height='1' fill='#d8d8d8'/>\n";
                run = -1;
            }
        }
    }

    for (const SymmetryBranch& b : result.branches) {
        const char* color = b.kind == AxisKind::positive ? "#d62020" : "#e0b000";
        out << "<polyline fill='none' stroke='" << color << "' stroke-width='1' points='";
        for (const Cell& c : b.points) {
            out << num(c.x + 0.5) << "," << num(c.y + 0.5) << " ";
        }
        out << "'/>\n";
    }

    if (!result.alternatives.empty()) {
        const ExtractResult::Alternative& alt = result.alternatives.front();
        const ShapeDescriptor& d = result.descriptors.front();
        const double ox = alt.origin.x + 0.5, oy = alt.origin.y + 0.5;
        const double axis_len = 0.18 * std::sqrt(static_cast<double>(m.interior_count));
        for (const ReferenceFrame& f : {alt.frames.half0, alt.frames.half1}) {
            // axis_y is a y-up component; the raster y axis points down.
            out << "<line x1='" << num(ox) << "' y1='" << num(oy) << "' x2='"
                << num(ox + axis_len * f.axis_x) << "' y2='" << num(oy - axis_len * f.axis_y)
                << "' stroke='#800000' stroke-width='1.8'/>\n";
        }
        for (int h = 0; h < 2; ++h) {
            const ReferenceFrame& f = alt.frames.half0.half_id == h ? alt.frames.half0
                                                                    : alt.frames.half1;
            const double base = std::atan2(f.axis_y, f.axis_x);
            for (const BranchRecord& rec : d.halves[h]) {
                const double len = rec.r * d.total_axes_length;
                if (len < 0.5) continue;
                const double ang = base + rec.theta;
                arrow(out, ox, oy, ox + len * std::cos(ang), oy - len * std::sin(ang),
                      "#2040d0");
            }
        }
    }

    for (const CriticalPoint& c : result.criticals) {
        const char* color = c.kind == CriticalKind::elliptic ? "#10a010" : "#10a0a0";
        out << "<circle cx='" << num(c.cell.x + 0.5) << "' cy='" << num(c.cell.y + 0.5)
            << "' r='2.2' fill='" << color << "'/>\n";
    }

    out << "</svg>\n";
    if (!out) throw PipelineError(path + ": write failed");
}

}  // namespace axisdesc
