#include "rfv/io/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "rfv/errors.hpp"

namespace rfv {
namespace {

constexpr double kWidth = 880, kHeight = 560;
constexpr double kLeft = 70, kRight = 690, kTop = 40, kBottom = 510;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b", "#e377c2", "#7f7f7f"};
constexpr int kPaletteSize = 8;

std::string num(double v, const char* fmt = "%.2f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

}  // namespace

std::string xml_escape(const std::string& text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out += c;
        }
    }
    return out;
}

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)),
      y_label_(std::move(y_label)) {}

void SvgPlot::push(const std::string& label, Kind kind, std::vector<double> x,
                   std::vector<double> y) {
    if (x.size() != y.size()) throw ConfigError("svg series sizes disagree");
    series_.push_back(Series{label, kind, std::move(x), std::move(y)});
}

void SvgPlot::add_line(const std::string& label, const std::vector<double>& x,
                       const std::vector<double>& y) {
    push(label, Kind::line, x, y);
}

void SvgPlot::add_scatter(const std::string& label, const std::vector<double>& x,
                          const std::vector<double>& y) {
    push(label, Kind::scatter, x, y);
}

void SvgPlot::add_step(const std::string& label, const std::vector<double>& edges,
                       const std::vector<double>& heights) {
    if (edges.size() != heights.size() + 1)
        throw ConfigError("step series needs one more edge than height");
    std::vector<double> x, y;
    x.reserve(2 * edges.size());
    y.reserve(2 * edges.size());
    x.push_back(edges.front());
    y.push_back(0.0);
    for (std::size_t i = 0; i < heights.size(); ++i) {
        x.push_back(edges[i]);
        y.push_back(heights[i]);
        x.push_back(edges[i + 1]);
        y.push_back(heights[i]);
    }
    x.push_back(edges.back());
    y.push_back(0.0);
    push(label, Kind::step, std::move(x), std::move(y));
}

std::string SvgPlot::str() const {
    const auto tx = [this](double v) { return log_x_ ? std::log10(v) : v; };
    const auto usable = [this](double x, double y) {
        if (!std::isfinite(x) || !std::isfinite(y)) return false;
        return !log_x_ || x > 0.0;
    };

    double xmin = 0.0, xmax = 1.0, ymin = 0.0, ymax = 1.0;
    bool any = false;
    for (const Series& s : series_)
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (!usable(s.x[i], s.y[i])) continue;
            const double x = tx(s.x[i]);
            if (!any) {
                xmin = xmax = x;
                ymin = ymax = s.y[i];
                any = true;
            } else {
                xmin = std::min(xmin, x);
                xmax = std::max(xmax, x);
                ymin = std::min(ymin, s.y[i]);
                ymax = std::max(ymax, s.y[i]);
            }
        }
    const double xpad = (xmax > xmin) ? 0.05 * (xmax - xmin) : std::max(1.0, std::abs(xmin)) * 0.05;
    const double ypad = (ymax > ymin) ? 0.05 * (ymax - ymin) : std::max(1.0, std::abs(ymin)) * 0.05;
    xmin -= xpad;
    xmax += xpad;
    ymin -= ypad;
    ymax += ypad;

    const auto px = [&](double x) {
        return kLeft + (tx(x) - xmin) / (xmax - xmin) * (kRight - kLeft);
    };
    const auto py = [&](double y) {
        return kBottom - (y - ymin) / (ymax - ymin) * (kBottom - kTop);
    };

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"880\" height=\"560\" "
           "viewBox=\"0 0 880 560\" font-family=\"sans-serif\" font-size=\"13\">\n";
    out += "<rect x=\"0\" y=\"0\" width=\"880\" height=\"560\" fill=\"#ffffff\"/>\n";
    out += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"24\" text-anchor=\"middle\" "
           "font-size=\"16\">" + xml_escape(title_) + "</text>\n";

    // frame
    out += "<rect x=\"" + num(kLeft) + "\" y=\"" + num(kTop) + "\" width=\"" +
           num(kRight - kLeft) + "\" height=\"" + num(kBottom - kTop) +
           "\" fill=\"none\" stroke=\"#444444\"/>\n";

    for (int i = 0; i < 5; ++i) {
        const double fx = xmin + (xmax - xmin) * i / 4.0;
        const double fy = ymin + (ymax - ymin) * i / 4.0;
        const double gx = kLeft + (kRight - kLeft) * i / 4.0;
        const double gy = kBottom - (kBottom - kTop) * i / 4.0;
        const double x_value = log_x_ ? std::pow(10.0, fx) : fx;
        out += "<line x1=\"" + num(gx) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(gx) +
               "\" y2=\"" + num(kBottom + 5) + "\" stroke=\"#444444\"/>\n";
        out += "<text x=\"" + num(gx) + "\" y=\"" + num(kBottom + 20) +
               "\" text-anchor=\"middle\">" + num(x_value, "%.4g") + "</text>\n";
        out += "<line x1=\"" + num(kLeft - 5) + "\" y1=\"" + num(gy) + "\" x2=\"" +
               num(kLeft) + "\" y2=\"" + num(gy) + "\" stroke=\"#444444\"/>\n";
        out += "<text x=\"" + num(kLeft - 8) + "\" y=\"" + num(gy + 4) +
               "\" text-anchor=\"end\">" + num(fy, "%.4g") + "</text>\n";
    }
    out += "<text x=\"" + num((kLeft + kRight) / 2) + "\" y=\"" + num(kHeight - 12) +
           "\" text-anchor=\"middle\">" + xml_escape(x_label_) + "</text>\n";
    out += "<text x=\"18\" y=\"" + num((kTop + kBottom) / 2) +
           "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
           num((kTop + kBottom) / 2) + ")\">" + xml_escape(y_label_) + "</text>\n";

    int color_index = 0;
    double legend_y = kTop + 10;
    for (const Series& s : series_) {
        const std::string color = kPalette[color_index % kPaletteSize];
        ++color_index;

        if (s.kind == Kind::scatter) {
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                out += "<circle cx=\"" + num(px(s.x[i])) + "\" cy=\"" + num(py(s.y[i])) +
                       "\" r=\"3\" fill=\"" + color + "\" fill-opacity=\"0.55\"/>\n";
            }
        } else {
            std::string points;
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                if (!usable(s.x[i], s.y[i])) continue;
                if (!points.empty()) points += ' ';
                points += num(px(s.x[i])) + "," + num(py(s.y[i]));
            }
            out += "<polyline fill=\"none\" stroke=\"" + color +
                   "\" stroke-width=\"1.8\" points=\"" + points + "\"/>\n";
        }

        out += "<line x1=\"705\" y1=\"" + num(legend_y) + "\" x2=\"735\" y2=\"" +
               num(legend_y) + "\" stroke=\"" + color + "\" stroke-width=\"3\"/>\n";
        out += "<text x=\"742\" y=\"" + num(legend_y + 4) + "\">" + xml_escape(s.label) +
               "</text>\n";
        legend_y += 22;
    }

    out += "</svg>\n";
    return out;
}

}  // namespace rfv
