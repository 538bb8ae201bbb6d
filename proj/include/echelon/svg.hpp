#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "echelon/errors.hpp"

namespace echelon::svg {

inline const std::vector<std::string>& palette() {
    static const std::vector<std::string> colors{"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b"};
    return colors;
}

namespace detail {

inline std::string fmt(double v, int precision = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

inline std::string tick_label(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return buf;
}

struct Frame {
    double width = 860.0, height = 480.0;
    double left = 70.0, right = 20.0, top = 40.0, bottom = 50.0;

    double plot_w() const { return width - left - right; }
    double plot_h() const { return height - top - bottom; }
};

inline void open_svg(std::ostringstream& out, const Frame& fr, const std::string& title) {
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fr.width << "\" height=\"" << fr.height
        << "\" viewBox=\"0 0 " << fr.width << " " << fr.height << "\">\n";
    out << "<rect width=\"" << fr.width << "\" height=\"" << fr.height << "\" fill=\"white\"/>\n";
    out << "<text x=\"" << fr.width / 2 << "\" y=\"22\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"15\" fill=\"#222\">" << title << "</text>\n";
}

inline void axes(std::ostringstream& out, const Frame& fr, double x_min, double x_max, double y_min, double y_max,
                 const std::string& x_label, const std::string& y_label) {
    const double x0 = fr.left, y0 = fr.height - fr.bottom;
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 + fr.plot_w() << "\" y2=\"" << y0
        << "\" stroke=\"#444\"/>\n";
    out << "<line x1=\"" << x0 << "\" y1=\"" << y0 << "\" x2=\"" << x0 << "\" y2=\"" << fr.top
        << "\" stroke=\"#444\"/>\n";
    for (int i = 0; i <= 5; ++i) {
        const double f = static_cast<double>(i) / 5.0;
        const double xv = x_min + f * (x_max - x_min);
        const double px = x0 + f * fr.plot_w();
        out << "<line x1=\"" << px << "\" y1=\"" << y0 << "\" x2=\"" << px << "\" y2=\"" << y0 + 4
            << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << px << "\" y=\"" << y0 + 18 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
            << "font-size=\"11\" fill=\"#444\">" << tick_label(xv) << "</text>\n";
        const double yv = y_min + f * (y_max - y_min);
        const double py = y0 - f * fr.plot_h();
        out << "<line x1=\"" << x0 - 4 << "\" y1=\"" << py << "\" x2=\"" << x0 << "\" y2=\"" << py
            << "\" stroke=\"#444\"/>\n";
        out << "<text x=\"" << x0 - 8 << "\" y=\"" << py + 4 << "\" text-anchor=\"end\" font-family=\"sans-serif\" "
            << "font-size=\"11\" fill=\"#444\">" << tick_label(yv) << "</text>\n";
    }
    out << "<text x=\"" << x0 + fr.plot_w() / 2 << "\" y=\"" << fr.height - 12
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\">" << x_label
        << "</text>\n";
    out << "<text x=\"16\" y=\"" << fr.top + fr.plot_h() / 2 << "\" text-anchor=\"middle\" font-family=\"sans-serif\" "
        << "font-size=\"12\" fill=\"#222\" transform=\"rotate(-90 16 " << fr.top + fr.plot_h() / 2 << ")\">" << y_label
        << "</text>\n";
}

}  // namespace detail

// ===== Line plot =====

struct LineSeries {
    std::string label;
    std::vector<double> y;
    std::vector<double> band_lo;  // optional shaded band (e.g. mean +- sd)
    std::vector<double> band_hi;
    std::string color;
};

class LinePlot {
public:
    LinePlot(std::string title, std::string x_label, std::string y_label)
        : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

    void set_x_start(double x0) { x_start_ = x0; }

    void add(LineSeries s) {
        if (s.y.empty()) throw DomainError("line series must not be empty");
        if (!s.band_lo.empty() && (s.band_lo.size() != s.y.size() || s.band_hi.size() != s.y.size())) {
            throw DomainError("band lengths must match the series");
        }
        if (s.color.empty()) s.color = palette()[series_.size() % palette().size()];
        series_.push_back(std::move(s));
    }

    std::string render() const {
        if (series_.empty()) throw DomainError("line plot needs at least one series");
        double y_min = std::numeric_limits<double>::infinity(), y_max = -y_min;
        std::size_t n = 0;
        for (const auto& s : series_) {
            n = std::max(n, s.y.size());
            for (double v : s.y) {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
            for (double v : s.band_lo) y_min = std::min(y_min, v);
            for (double v : s.band_hi) y_max = std::max(y_max, v);
        }
        if (y_min == y_max) {
            y_min -= 1.0;
            y_max += 1.0;
        }
        const double x_min = x_start_;
        const double x_max = x_start_ + static_cast<double>(n - 1);

        detail::Frame fr;
        std::ostringstream out;
        detail::open_svg(out, fr, title_);
        detail::axes(out, fr, x_min, x_max, y_min, y_max, x_label_, y_label_);

        const auto px = [&](std::size_t i) {
            return fr.left + (n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1) * fr.plot_w());
        };
        const auto py = [&](double v) {
            return fr.height - fr.bottom - (v - y_min) / (y_max - y_min) * fr.plot_h();
        };

        for (const auto& s : series_) {
            if (!s.band_lo.empty()) {
                out << "<polygon fill=\"" << s.color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
                for (std::size_t i = 0; i < s.y.size(); ++i) {
                    out << detail::fmt(px(i)) << "," << detail::fmt(py(s.band_hi[i])) << " ";
                }
                for (std::size_t i = s.y.size(); i-- > 0;) {
                    out << detail::fmt(px(i)) << "," << detail::fmt(py(s.band_lo[i])) << " ";
                }
                out << "\"/>\n";
            }
            out << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t i = 0; i < s.y.size(); ++i) {
                out << detail::fmt(px(i)) << "," << detail::fmt(py(s.y[i])) << " ";
            }
            out << "\"/>\n";
        }

        double ly = fr.top + 8;
        for (const auto& s : series_) {
            const double lx = fr.width - fr.right - 150;
            out << "<line x1=\"" << lx << "\" y1=\"" << ly << "\" x2=\"" << lx + 24 << "\" y2=\"" << ly
                << "\" stroke=\"" << s.color << "\" stroke-width=\"2\"/>\n";
            out << "<text x=\"" << lx + 30 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\" "
                << "fill=\"#222\">" << s.label << "</text>\n";
            ly += 18;
        }
        out << "</svg>\n";
        return out.str();
    }

private:
    std::string title_, x_label_, y_label_;
    double x_start_ = 0.0;
    std::vector<LineSeries> series_;
};

// ===== Grouped bar chart =====

class BarChart {
public:
    BarChart(std::string title, std::string y_label) : title_(std::move(title)), y_label_(std::move(y_label)) {}

    void set_categories(std::vector<std::string> cats) { categories_ = std::move(cats); }

    void add(const std::string& label, std::vector<double> values) {
        if (values.size() != categories_.size()) throw DomainError("bar values must match categories");
        labels_.push_back(label);
        values_.push_back(std::move(values));
    }

    std::string render() const {
        if (categories_.empty() || values_.empty()) throw DomainError("bar chart needs categories and values");
        double y_min = 0.0, y_max = -std::numeric_limits<double>::infinity();
        for (const auto& vs : values_) {
            for (double v : vs) {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
        if (y_max <= y_min) y_max = y_min + 1.0;

        detail::Frame fr;
        std::ostringstream out;
        detail::open_svg(out, fr, title_);
        const double y0 = fr.height - fr.bottom;
        const auto py = [&](double v) { return y0 - (v - y_min) / (y_max - y_min) * fr.plot_h(); };

        out << "<line x1=\"" << fr.left << "\" y1=\"" << py(0.0) << "\" x2=\"" << fr.left + fr.plot_w() << "\" y2=\""
            << py(0.0) << "\" stroke=\"#444\"/>\n";
        for (int i = 0; i <= 5; ++i) {
            const double f = static_cast<double>(i) / 5.0;
            const double yv = y_min + f * (y_max - y_min);
            out << "<text x=\"" << fr.left - 8 << "\" y=\"" << py(yv) + 4
                << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">"
                << detail::tick_label(yv) << "</text>\n";
        }

        const double group_w = fr.plot_w() / static_cast<double>(categories_.size());
        const double bar_w = group_w * 0.8 / static_cast<double>(values_.size());
        for (std::size_t c = 0; c < categories_.size(); ++c) {
            const double gx = fr.left + static_cast<double>(c) * group_w + group_w * 0.1;
            for (std::size_t s = 0; s < values_.size(); ++s) {
                const double v = values_[s][c];
                const double top = py(std::max(v, 0.0));
                const double bottom = py(std::min(v, 0.0));
                out << "<rect x=\"" << detail::fmt(gx + static_cast<double>(s) * bar_w) << "\" y=\""
                    << detail::fmt(top) << "\" width=\"" << detail::fmt(bar_w * 0.9) << "\" height=\""
                    << detail::fmt(std::max(0.5, bottom - top)) << "\" fill=\""
                    << palette()[s % palette().size()] << "\"/>\n";
            }
            out << "<text x=\"" << gx + group_w * 0.4 << "\" y=\"" << y0 + 18
                << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#444\">"
                << categories_[c] << "</text>\n";
        }

        double ly = fr.top + 8;
        for (std::size_t s = 0; s < labels_.size(); ++s) {
            const double lx = fr.width - fr.right - 150;
            out << "<rect x=\"" << lx << "\" y=\"" << ly - 8 << "\" width=\"12\" height=\"12\" fill=\""
                << palette()[s % palette().size()] << "\"/>\n";
            out << "<text x=\"" << lx + 18 << "\" y=\"" << ly + 2 << "\" font-family=\"sans-serif\" font-size=\"12\" "
                << "fill=\"#222\">" << labels_[s] << "</text>\n";
            ly += 18;
        }
        out << "<text x=\"16\" y=\"" << fr.top + fr.plot_h() / 2 << "\" text-anchor=\"middle\" "
            << "font-family=\"sans-serif\" font-size=\"12\" fill=\"#222\" transform=\"rotate(-90 16 "
            << fr.top + fr.plot_h() / 2 << ")\">" << y_label_ << "</text>\n";
        out << "</svg>\n";
        return out.str();
    }

private:
    std::string title_, y_label_;
    std::vector<std::string> categories_;
    std::vector<std::string> labels_;
    std::vector<std::vector<double>> values_;
};

}  // namespace echelon::svg
