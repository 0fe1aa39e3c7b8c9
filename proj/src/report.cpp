#include "motpipe/report.hpp"

#include <algorithm>

#include "motpipe/dataio.hpp"

namespace motpipe {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 400.0;
constexpr double kLeft = 60.0;
constexpr double kRight = 780.0;
constexpr double kTop = 48.0;
constexpr double kBottom = 352.0;

std::string num(double v) { return format_fixed(v, 2); }

std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

double y_of(double value) {
    const double v = std::clamp(value, 0.0, 1.0);
    return kBottom - v * (kBottom - kTop);
}

}  // namespace

std::string render_report_svg(const std::vector<SequenceEval>& evals) {
    const struct {
        const char* label;
        const char* color;
    } series[3] = {{"IDF1", "#4c78a8"}, {"MOTA", "#f58518"}, {"Precision", "#54a24b"}};

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " + num(kWidth) + " " +
           num(kHeight) + "\" font-family=\"sans-serif\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + num(kWidth) + "\" height=\"" + num(kHeight) +
           "\" fill=\"#ffffff\"/>\n";

    // Horizontal gridlines and axis labels at 0.25 steps.
    for (int i = 0; i <= 4; ++i) {
        const double v = 0.25 * i;
        const double y = y_of(v);
        svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(y) + "\" x2=\"" + num(kRight) +
               "\" y2=\"" + num(y) + "\" stroke=\"#cccccc\" stroke-width=\"1\"/>\n";
        svg += "<text x=\"" + num(kLeft - 8.0) + "\" y=\"" + num(y + 4.0) +
               "\" text-anchor=\"end\" font-size=\"11\" fill=\"#333333\">" + format_fixed(v, 2) +
               "</text>\n";
    }
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kTop) + "\" x2=\"" + num(kLeft) +
           "\" y2=\"" + num(kBottom) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
    svg += "<line x1=\"" + num(kLeft) + "\" y1=\"" + num(kBottom) + "\" x2=\"" + num(kRight) +
           "\" y2=\"" + num(kBottom) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // Legend across the top.
    double lx = kLeft;
    for (const auto& s : series) {
        svg += "<rect x=\"" + num(lx) + "\" y=\"14\" width=\"12\" height=\"12\" fill=\"" +
               s.color + "\"/>\n";
        svg += "<text x=\"" + num(lx + 16.0) + "\" y=\"24\" font-size=\"12\" fill=\"#333333\">" +
               std::string(s.label) + "</text>\n";
        lx += 110.0;
    }

    if (!evals.empty()) {
        const double group_width = (kRight - kLeft) / static_cast<double>(evals.size());
        const double bar_width = std::min(28.0, group_width / 4.0);
        for (size_t i = 0; i < evals.size(); ++i) {
            const auto& e = evals[i];
            const double center = kLeft + group_width * (static_cast<double>(i) + 0.5);
            const double values[3] = {e.idf1, e.mota.value_or(0.0), e.precision};
            for (int s = 0; s < 3; ++s) {
                const double x = center + (static_cast<double>(s) - 1.5) * bar_width;
                const double y = y_of(values[s]);
                svg += "<rect x=\"" + num(x) + "\" y=\"" + num(y) + "\" width=\"" +
                       num(bar_width) + "\" height=\"" + num(kBottom - y) + "\" fill=\"" +
                       series[s].color + "\"/>\n";
            }
            svg += "<text x=\"" + num(center) + "\" y=\"" + num(kBottom + 18.0) +
                   "\" text-anchor=\"middle\" font-size=\"11\" fill=\"#333333\">" +
                   escape(e.sequence) + "</text>\n";
        }
    }

    svg += "</svg>\n";
    return svg;
}

}  // namespace motpipe
