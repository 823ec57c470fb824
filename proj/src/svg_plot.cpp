#include "vtolsim/svg_plot.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>
#include <sstream>

namespace vtolsim {

namespace {

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#17becf", "#8c564b", "#7f7f7f"};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

struct Range {
    double lo = 0.0;
    double hi = 1.0;
    void include(double v) {
        if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    void pad() {
        if (!(hi > lo)) {
            lo -= 0.5;
            hi += 0.5;
        }
        const double m = 0.05 * (hi - lo);
        lo -= m;
        hi += m;
    }
};

/// Maps data coordinates into one SVG viewport rectangle.
struct Panel {
    double x0, y0, w, h;  // pixel rect
    Range rx, ry;

    double px(double x) const { return x0 + (x - rx.lo) / (rx.hi - rx.lo) * w; }
    double py(double y) const { return y0 + h - (y - ry.lo) / (ry.hi - ry.lo) * h; }

    void frame(std::ostringstream& out, const std::string& xlabel,
               const std::string& ylabel) const {
        out << "<rect x=\"" << fmt(x0) << "\" y=\"" << fmt(y0) << "\" width=\"" << fmt(w)
            << "\" height=\"" << fmt(h) << "\" fill=\"none\" stroke=\"black\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double fx = rx.lo + (rx.hi - rx.lo) * i / 5.0;
            const double fy = ry.lo + (ry.hi - ry.lo) * i / 5.0;
            out << "<line x1=\"" << fmt(px(fx)) << "\" y1=\"" << fmt(y0 + h) << "\" x2=\""
                << fmt(px(fx)) << "\" y2=\"" << fmt(y0 + h + 4) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << fmt(px(fx)) << "\" y=\"" << fmt(y0 + h + 16)
                << "\" font-size=\"10\" text-anchor=\"middle\">" << fmt(fx) << "</text>\n";
            out << "<line x1=\"" << fmt(x0 - 4) << "\" y1=\"" << fmt(py(fy)) << "\" x2=\""
                << fmt(x0) << "\" y2=\"" << fmt(py(fy)) << "\" stroke=\"black\"/>\n";
            out << "<text x=\"" << fmt(x0 - 6) << "\" y=\"" << fmt(py(fy) + 3)
                << "\" font-size=\"10\" text-anchor=\"end\">" << fmt(fy) << "</text>\n";
        }
        out << "<text x=\"" << fmt(x0 + w / 2) << "\" y=\"" << fmt(y0 + h + 30)
            << "\" font-size=\"11\" text-anchor=\"middle\">" << xlabel << "</text>\n";
        out << "<text x=\"" << fmt(x0 - 42) << "\" y=\"" << fmt(y0 + h / 2)
            << "\" font-size=\"11\" text-anchor=\"middle\" transform=\"rotate(-90 "
            << fmt(x0 - 42) << " " << fmt(y0 + h / 2) << ")\">" << ylabel << "</text>\n";
    }

    void polyline(std::ostringstream& out, const std::vector<double>& xs,
                  const std::vector<double>& ys, const std::string& color,
                  bool dashed = false) const {
        if (xs.empty()) return;
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.2\"";
        if (dashed) out << " stroke-dasharray=\"5,3\"";
        out << " points=\"";
        for (std::size_t i = 0; i < xs.size(); ++i) {
            if (i) out << ' ';
            out << fmt(px(xs[i])) << ',' << fmt(py(ys[i]));
        }
        out << "\"/>\n";
    }
};

constexpr std::size_t kMaxPolylinePoints = 2000;

/// Column values decimated to a drawable point count; always keeps the
/// first and last rows.
std::vector<double> column(const CsvTable& t, std::size_t col) {
    const std::size_t n = t.rows.size();
    const std::size_t stride = n > kMaxPolylinePoints ? (n - 1) / (kMaxPolylinePoints - 1) + 1 : 1;
    std::vector<double> v;
    v.reserve(n / stride + 2);
    for (std::size_t i = 0; i < n; i += stride) v.push_back(t.rows[i][col]);
    if (n > 0 && (n - 1) % stride != 0) v.push_back(t.rows[n - 1][col]);
    return v;
}

std::string nodeCol(int node, const std::string& base) {
    return "n" + std::to_string(node) + "_" + base;
}

std::string svgHeader(double w, double h) {
    std::ostringstream out;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt(w) << "\" height=\""
        << fmt(h) << "\" viewBox=\"0 0 " << fmt(w) << " " << fmt(h) << "\">\n"
        << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out.str();
}

}  // namespace

std::vector<int> nodesInLog(const CsvTable& table) {
    std::set<int> ids;
    for (const std::string& name : table.header) {
        if (name.size() < 3 || name[0] != 'n') continue;
        std::size_t i = 1;
        while (i < name.size() && std::isdigit(static_cast<unsigned char>(name[i]))) ++i;
        if (i > 1 && i < name.size() && name[i] == '_') ids.insert(std::stoi(name.substr(1, i - 1)));
    }
    return {ids.begin(), ids.end()};
}

std::vector<int> resolveNodeSelection(const CsvTable& table, const std::vector<int>& requested) {
    const std::vector<int> available = nodesInLog(table);
    if (requested.empty()) return available;
    for (int id : requested) {
        if (std::find(available.begin(), available.end(), id) == available.end()) {
            std::string valid;
            for (int a : available) valid += (valid.empty() ? "" : ", ") + std::to_string(a);
            throw std::runtime_error("node " + std::to_string(id) +
                                     " is not in the log; valid ids: " +
                                     (valid.empty() ? "(none)" : valid));
        }
    }
    return requested;
}

std::string renderTrajectorySvg(const CsvTable& table, const std::vector<int>& nodes) {
    const double width = 900, height = 460;
    std::ostringstream out;
    out << svgHeader(width, height);
    out << "<text x=\"450\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">"
           "Trajectory snapshots</text>\n";

    const bool hasData = !table.rows.empty();
    std::size_t tCol = 0, prx = 0, pry = 0, prz = 0;
    if (hasData) {
        tCol = table.requireColumn("t");
        prx = table.requireColumn("pr_x");
        pry = table.requireColumn("pr_y");
        prz = table.requireColumn("pr_z");
    }

    struct View {
        Panel panel;
        std::size_t aCol, bCol;  // data columns of the two projected axes
        std::string xlabel, ylabel;
    };
    View views[2];
    views[0].panel = {70, 50, 330, 330, {}, {}};
    views[0].xlabel = "x [m]";
    views[0].ylabel = "y [m]";
    views[1].panel = {520, 50, 330, 330, {}, {}};
    views[1].xlabel = "x [m]";
    views[1].ylabel = "z [m]";

    for (int v = 0; v < 2; ++v) {
        Panel& p = views[v].panel;
        if (hasData) {
            const std::size_t la = prx;
            const std::size_t lb = v == 0 ? pry : prz;
            views[v].aCol = la;
            views[v].bCol = lb;
            p.rx = Range{table.rows[0][la], table.rows[0][la]};
            p.ry = Range{table.rows[0][lb], table.rows[0][lb]};
            for (const auto& row : table.rows) {
                p.rx.include(row[la]);
                p.ry.include(row[lb]);
            }
            for (int id : nodes) {
                const std::size_t na = table.requireColumn(nodeCol(id, "p_x"));
                const std::size_t nb = table.requireColumn(nodeCol(id, v == 0 ? "p_y" : "p_z"));
                for (const auto& row : table.rows) {
                    p.rx.include(row[na]);
                    p.ry.include(row[nb]);
                }
            }
        }
        p.rx.pad();
        p.ry.pad();
        p.frame(out, views[v].xlabel, views[v].ylabel);
    }

    if (hasData) {
        for (int v = 0; v < 2; ++v) {
            const Panel& p = views[v].panel;
            p.polyline(out, column(table, views[v].aCol), column(table, views[v].bCol),
                       "black", true);
            for (std::size_t k = 0; k < nodes.size(); ++k) {
                const int id = nodes[k];
                const std::size_t na = table.requireColumn(nodeCol(id, "p_x"));
                const std::size_t nb =
                    table.requireColumn(nodeCol(id, v == 0 ? "p_y" : "p_z"));
                p.polyline(out, column(table, na), column(table, nb),
                           kPalette[k % 8]);
            }
            // formation polygons every 20 s of log time
            const double t0 = table.rows.front()[tCol];
            const double t1 = table.rows.back()[tCol];
            const int snapshots = static_cast<int>((t1 - t0) / 20.0 + 1e-9);
            for (int snap = 0; snap <= snapshots; ++snap) {
                const double ts = t0 + 20.0 * snap;
                std::size_t rowIdx = 0;
                double best = std::numeric_limits<double>::infinity();
                for (std::size_t r = 0; r < table.rows.size(); ++r) {
                    const double d = std::fabs(table.rows[r][tCol] - ts);
                    if (d < best) {
                        best = d;
                        rowIdx = r;
                    }
                }
                out << "<polygon fill=\"none\" stroke=\"#555555\" stroke-width=\"0.8\" points=\"";
                bool first = true;
                for (int id : nodes) {
                    const std::size_t na = table.requireColumn(nodeCol(id, "p_x"));
                    const std::size_t nb =
                        table.requireColumn(nodeCol(id, v == 0 ? "p_y" : "p_z"));
                    if (!first) out << ' ';
                    first = false;
                    out << fmt(p.px(table.rows[rowIdx][na])) << ','
                        << fmt(p.py(table.rows[rowIdx][nb]));
                }
                out << "\"/>\n";
                out << "<circle cx=\"" << fmt(p.px(table.rows[rowIdx][views[v].aCol]))
                    << "\" cy=\"" << fmt(p.py(table.rows[rowIdx][views[v].bCol]))
                    << "\" r=\"2.5\" fill=\"black\"/>\n";
            }
        }
    }

    // legend
    double ly = 415;
    out << "<text x=\"70\" y=\"" << fmt(ly) << "\" font-size=\"11\">leader (dashed)</text>\n";
    double lx = 200;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\""
            << fmt(lx + 22) << "\" y2=\"" << fmt(ly - 4) << "\" stroke=\"" << kPalette[k % 8]
            << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(lx + 26) << "\" y=\"" << fmt(ly)
            << "\" font-size=\"11\">follower " << nodes[k] << "</text>\n";
        lx += 110;
    }
    out << "</svg>\n";
    return out.str();
}

std::string renderSeriesSvg(const CsvTable& table, const std::vector<int>& nodes,
                            const std::string& prefix, const std::string& title,
                            const std::string& unit) {
    const double width = 860, height = 720;
    std::ostringstream out;
    out << svgHeader(width, height);
    out << "<text x=\"430\" y=\"18\" font-size=\"13\" text-anchor=\"middle\">" << title
        << "</text>\n";

    const bool hasData = !table.rows.empty();
    const char* axes[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a) {
        Panel p{70, 40 + a * 225.0, 720, 185, {}, {}};
        std::vector<std::vector<double>> series;
        std::vector<double> ts;
        if (hasData) {
            const std::size_t tCol = table.requireColumn("t");
            ts = column(table, tCol);
            p.rx = Range{ts.front(), ts.front()};
            for (double t : ts) p.rx.include(t);
            bool init = false;
            for (int id : nodes) {
                const std::size_t col =
                    table.requireColumn(nodeCol(id, prefix + "_" + axes[a]));
                series.push_back(column(table, col));
                for (double v : series.back()) {
                    if (!init) {
                        p.ry = Range{v, v};
                        init = true;
                    }
                    p.ry.include(v);
                }
            }
        }
        p.rx.pad();
        p.ry.pad();
        p.frame(out, a == 2 ? "t [s]" : "", std::string(axes[a]) + " " + unit);
        for (std::size_t k = 0; k < series.size(); ++k)
            p.polyline(out, ts, series[k], kPalette[k % 8]);
    }

    double lx = 70;
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        out << "<line x1=\"" << fmt(lx) << "\" y1=\"711\" x2=\"" << fmt(lx + 22)
            << "\" y2=\"711\" stroke=\"" << kPalette[k % 8] << "\" stroke-width=\"2\"/>\n";
        out << "<text x=\"" << fmt(lx + 26) << "\" y=\"715\" font-size=\"11\">follower "
            << nodes[k] << "</text>\n";
        lx += 110;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace vtolsim
