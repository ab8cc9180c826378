#include "eoelab/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <vector>

#include "eoelab/errors.hpp"

namespace eoelab::svg {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 24.0;
constexpr double kTop = 44.0;
constexpr double kBottom = 58.0;

std::string fmt(double v, int precision = 2) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", precision, v);
    return buf;
}

std::string fmt_tick(double v) {
    if (v == 0.0) v = 0.0;  // normalize -0
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::string escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            default: out += c;
        }
    }
    return out;
}

// Tick positions at a "nice" step (1, 2 or 5 times a power of ten).
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo)) return {lo};
    const double raw = (hi - lo) / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = 10.0 * mag;
    for (double m : {1.0, 2.0, 5.0}) {
        if (m * mag >= raw) {
            step = m * mag;
            break;
        }
    }
    std::vector<double> ticks;
    const double eps = step * 1e-9;
    double t = std::ceil((lo - eps) / step) * step;
    for (; t <= hi + eps; t += step) ticks.push_back(std::abs(t) < eps ? 0.0 : t);
    return ticks;
}

struct Mapper {
    double lo = 0.0, hi = 1.0;
    double p0 = 0.0, p1 = 1.0;

    double at(double v) const { return p0 + (v - lo) / (hi - lo) * (p1 - p0); }
};

// Shared chart scaffolding: header, plot frame, ticks, labels.
struct Frame {
    std::string out;
    Mapper x, y;

    void open(const std::string& title) {
        out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth, 0) +
               "\" height=\"" + fmt(kHeight, 0) + "\" viewBox=\"0 0 " + fmt(kWidth, 0) + " " +
               fmt(kHeight, 0) + "\">\n";
        out += "<rect x=\"0\" y=\"0\" width=\"" + fmt(kWidth, 0) + "\" height=\"" +
               fmt(kHeight, 0) + "\" fill=\"#ffffff\"/>\n";
        out += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" " +
               "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"15\" fill=\"#222222\">" +
               escape(title) + "</text>\n";
    }

    void set_ranges(double xlo, double xhi, double ylo, double yhi) {
        x = {xlo, xhi, kLeft, kWidth - kRight};
        y = {ylo, yhi, kHeight - kBottom, kTop};
    }

    void axes(const std::string& x_label, const std::string& y_label) {
        const double bx = kLeft, by = kHeight - kBottom;
        const double ex = kWidth - kRight, ey = kTop;
        out += "<g stroke=\"#444444\" stroke-width=\"1\" fill=\"none\">\n";
        out += "<path d=\"M " + fmt(bx) + " " + fmt(ey) + " L " + fmt(bx) + " " + fmt(by) +
               " L " + fmt(ex) + " " + fmt(by) + "\"/>\n";
        out += "</g>\n";
        out += "<g font-family=\"Helvetica, Arial, sans-serif\" font-size=\"10\" fill=\"#333333\">\n";
        for (double t : nice_ticks(x.lo, x.hi)) {
            const double px = x.at(t);
            out += "<line x1=\"" + fmt(px) + "\" y1=\"" + fmt(by) + "\" x2=\"" + fmt(px) +
                   "\" y2=\"" + fmt(by + 4) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            out += "<text x=\"" + fmt(px) + "\" y=\"" + fmt(by + 16) +
                   "\" text-anchor=\"middle\">" + fmt_tick(t) + "</text>\n";
        }
        for (double t : nice_ticks(y.lo, y.hi)) {
            const double py = y.at(t);
            out += "<line x1=\"" + fmt(bx - 4) + "\" y1=\"" + fmt(py) + "\" x2=\"" + fmt(bx) +
                   "\" y2=\"" + fmt(py) + "\" stroke=\"#444444\" stroke-width=\"1\"/>\n";
            out += "<text x=\"" + fmt(bx - 7) + "\" y=\"" + fmt(py + 3.2) +
                   "\" text-anchor=\"end\">" + fmt_tick(t) + "</text>\n";
        }
        out += "</g>\n";
        out += "<text x=\"" + fmt((kLeft + kWidth - kRight) / 2) + "\" y=\"" +
               fmt(kHeight - 14) + "\" text-anchor=\"middle\" " +
               "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\" fill=\"#222222\">" +
               escape(x_label) + "</text>\n";
        out += "<text x=\"18\" y=\"" + fmt((kTop + kHeight - kBottom) / 2) +
               "\" text-anchor=\"middle\" transform=\"rotate(-90 18 " +
               fmt((kTop + kHeight - kBottom) / 2) + ")\" " +
               "font-family=\"Helvetica, Arial, sans-serif\" font-size=\"12\" fill=\"#222222\">" +
               escape(y_label) + "</text>\n";
    }

    void close() { out += "</svg>\n"; }
};

void pad_range(double& lo, double& hi) {
    if (hi > lo) {
        const double pad = 0.04 * (hi - lo);
        lo -= pad;
        hi += pad;
    } else {
        lo -= 0.5;
        hi += 0.5;
    }
}

std::string polyline(const std::vector<double>& xs, const std::vector<double>& ys,
                     const Frame& f, const char* color, const char* width,
                     const char* dash = nullptr) {
    std::string d;
    bool pen_down = false;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (!std::isfinite(ys[i])) {
            pen_down = false;
            continue;
        }
        d += pen_down ? " L " : (d.empty() ? "M " : " M ");
        d += fmt(f.x.at(xs[i])) + " " + fmt(f.y.at(ys[i]));
        pen_down = true;
    }
    std::string attrs = std::string("stroke=\"") + color + "\" stroke-width=\"" + width +
                        "\" fill=\"none\"";
    if (dash) attrs += std::string(" stroke-dasharray=\"") + dash + "\"";
    return "<path d=\"" + d + "\" " + attrs + "/>\n";
}

}  // namespace

std::string histogram_chart(std::span<const double> samples, int bin_count,
                            const distfit::FittedDistribution* overlay, const std::string& title,
                            const std::string& x_label, bool log_x) {
    if (samples.empty()) raise(errc::insufficient_data, "histogram needs samples");
    if (bin_count < 1) raise(errc::invalid_argument, "histogram needs at least one bin");

    std::vector<double> xs;
    xs.reserve(samples.size());
    for (double v : samples) {
        if (log_x) {
            if (v > 0.0) xs.push_back(std::log(v));
        } else {
            xs.push_back(v);
        }
    }
    if (xs.empty()) raise(errc::insufficient_data, "no positive samples for the log axis");

    double lo = *std::min_element(xs.begin(), xs.end());
    double hi = *std::max_element(xs.begin(), xs.end());
    if (!(hi > lo)) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double width = (hi - lo) / bin_count;
    const double n = static_cast<double>(xs.size());
    std::vector<double> density(static_cast<std::size_t>(bin_count), 0.0);
    for (double v : xs) {
        auto b = static_cast<std::size_t>((v - lo) / width);
        if (b >= density.size()) b = density.size() - 1;
        density[b] += 1.0 / (n * width);
    }

    // Overlay curve, transformed to the log domain when needed:
    // g(u) = f(e^u) * e^u.
    std::vector<double> cx, cy;
    double curve_max = 0.0;
    if (overlay) {
        const int steps = 256;
        for (int i = 0; i <= steps; ++i) {
            const double u = lo + (hi - lo) * i / steps;
            const double d = log_x ? distfit::pdf(*overlay, std::exp(u)) * std::exp(u)
                                   : distfit::pdf(*overlay, u);
            cx.push_back(u);
            cy.push_back(std::isfinite(d) ? d : std::numeric_limits<double>::quiet_NaN());
            if (std::isfinite(d)) curve_max = std::max(curve_max, d);
        }
    }

    const double dmax = *std::max_element(density.begin(), density.end());
    double ymax = std::max(dmax, curve_max);
    if (!(ymax > 0.0)) ymax = 1.0;

    Frame f;
    f.open(title);
    f.set_ranges(lo, hi, 0.0, 1.06 * ymax);
    f.axes(x_label, "density");
    f.out += "<g fill=\"#6b93b8\" stroke=\"#ffffff\" stroke-width=\"0.5\">\n";
    for (int b = 0; b < bin_count; ++b) {
        const double d = density[static_cast<std::size_t>(b)];
        if (d <= 0.0) continue;
        const double x0 = f.x.at(lo + b * width);
        const double x1 = f.x.at(lo + (b + 1) * width);
        const double y1 = f.y.at(d);
        const double y0 = f.y.at(0.0);
        f.out += "<rect x=\"" + fmt(x0) + "\" y=\"" + fmt(y1) + "\" width=\"" + fmt(x1 - x0) +
                 "\" height=\"" + fmt(y0 - y1) + "\"/>\n";
    }
    f.out += "</g>\n";
    if (overlay) f.out += polyline(cx, cy, f, "#b0413e", "1.5");
    f.close();
    return f.out;
}

std::string qq_chart(std::span<const double> samples, const distfit::FittedDistribution& dist,
                     const std::string& title) {
    if (samples.empty()) raise(errc::insufficient_data, "qq plot needs samples");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    const std::size_t n = sorted.size();

    std::vector<double> qx(n);
    for (std::size_t k = 1; k <= n; ++k)
        qx[k - 1] = distfit::quantile(dist, static_cast<double>(k) / (static_cast<double>(n) + 1.0));

    double lo = std::min(qx.front(), sorted.front());
    double hi = std::max(qx.back(), sorted.back());
    pad_range(lo, hi);

    Frame f;
    f.open(title);
    f.set_ranges(lo, hi, lo, hi);
    f.axes("fitted quantiles", "empirical quantiles");
    f.out += polyline({lo, hi}, {lo, hi}, f, "#999999", "1", "5,4");
    f.out += "<g fill=\"#35618a\">\n";
    for (std::size_t i = 0; i < n; ++i)
        f.out += "<circle cx=\"" + fmt(f.x.at(qx[i])) + "\" cy=\"" + fmt(f.y.at(sorted[i])) +
                 "\" r=\"2\"/>\n";
    f.out += "</g>\n";
    f.close();
    return f.out;
}

std::string scatter_chart(std::span<const double> actual, std::span<const double> predicted,
                          const std::string& title, const std::string& x_label,
                          const std::string& y_label) {
    if (actual.empty() || actual.size() != predicted.size())
        raise(errc::invalid_argument, "scatter needs equal-length non-empty series");

    double lo = actual[0], hi = actual[0];
    for (double v : actual) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    for (double v : predicted) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    pad_range(lo, hi);

    Frame f;
    f.open(title);
    f.set_ranges(lo, hi, lo, hi);
    f.axes(x_label, y_label);
    f.out += polyline({lo, hi}, {lo, hi}, f, "#999999", "1", "5,4");
    f.out += "<g fill=\"#35618a\" fill-opacity=\"0.75\">\n";
    for (std::size_t i = 0; i < actual.size(); ++i)
        f.out += "<circle cx=\"" + fmt(f.x.at(actual[i])) + "\" cy=\"" + fmt(f.y.at(predicted[i])) +
                 "\" r=\"2\"/>\n";
    f.out += "</g>\n";
    f.close();
    return f.out;
}

}  // namespace eoelab::svg
