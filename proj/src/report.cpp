#include "ruinlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>

#include "ruinlab/errors.hpp"
#include "ruinlab/term.hpp"

namespace ruinlab {

namespace {

std::string csv_field(const std::string& f) {
  if (f.find_first_of(",\"\n") == std::string::npos) return f;
  std::string out = "\"";
  for (char c : f) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

void append_row(std::string& out, const std::vector<std::string>& row) {
  for (std::size_t i = 0; i < row.size(); ++i) {
    if (i > 0) out += ',';
    out += csv_field(row[i]);
  }
  out += '\n';
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fixed(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string tick_label(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

}  // namespace

std::string Table::to_csv() const {
  std::string out;
  append_row(out, header);
  for (const auto& r : rows) append_row(out, r);
  return out;
}

std::string render_svg(const Plot& plot) {
  constexpr double W = 640, H = 420, L = 70, R = 160, T = 40, B = 55;
  double x_lo = std::numeric_limits<double>::infinity(), x_hi = -x_lo;
  double y_lo = x_lo, y_hi = -x_lo;
  for (const auto& s : plot.series) {
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      x_lo = std::min(x_lo, std::log10(s.x[i]));
      x_hi = std::max(x_hi, std::log10(s.x[i]));
      y_lo = std::min(y_lo, s.y[i]);
      y_hi = std::max(y_hi, s.y[i]);
    }
  }
  if (plot.has_reference) {
    y_lo = std::min(y_lo, plot.reference);
    y_hi = std::max(y_hi, plot.reference);
  }
  if (!std::isfinite(x_lo)) x_lo = 0.0, x_hi = 1.0;
  if (!std::isfinite(y_lo)) y_lo = 0.0, y_hi = 1.0;
  if (x_hi - x_lo < 1e-9) x_lo -= 0.5, x_hi += 0.5;
  if (y_hi - y_lo < 1e-9) y_lo -= 0.5, y_hi += 0.5;
  const double pad = 0.08 * (y_hi - y_lo);
  y_lo -= pad;
  y_hi += pad;

  auto px = [&](double x) { return L + (std::log10(x) - x_lo) / (x_hi - x_lo) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y_lo) / (y_hi - y_lo) * (H - T - B); };

  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(W, 0) + "\" height=\"" +
                    fixed(H, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fixed(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         xml_escape(plot.title) + "</text>\n";
  svg += "<rect x=\"" + fixed(L) + "\" y=\"" + fixed(T) + "\" width=\"" + fixed(W - L - R) + "\" height=\"" +
         fixed(H - T - B) + "\" fill=\"none\" stroke=\"black\"/>\n";

  for (int i = 0; i <= 4; ++i) {
    const double lx = x_lo + (x_hi - x_lo) * i / 4.0;
    const double gx = L + (W - L - R) * i / 4.0;
    svg += "<text x=\"" + fixed(gx) + "\" y=\"" + fixed(H - B + 16) + "\" text-anchor=\"middle\">" +
           tick_label(std::pow(10.0, lx)) + "</text>\n";
    const double ly = y_lo + (y_hi - y_lo) * i / 4.0;
    svg += "<text x=\"" + fixed(L - 6) + "\" y=\"" + fixed(py(ly) + 4) + "\" text-anchor=\"end\">" +
           tick_label(ly) + "</text>\n";
  }
  svg += "<text x=\"" + fixed(L + (W - L - R) / 2) + "\" y=\"" + fixed(H - 12) + "\" text-anchor=\"middle\">" +
         xml_escape(plot.x_label) + " (log scale)</text>\n";
  svg += "<text x=\"16\" y=\"" + fixed(T + (H - T - B) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
         fixed(T + (H - T - B) / 2) + ")\">" + xml_escape(plot.y_label) + "</text>\n";

  if (plot.has_reference) {
    svg += "<line x1=\"" + fixed(L) + "\" x2=\"" + fixed(W - R) + "\" y1=\"" + fixed(py(plot.reference)) +
           "\" y2=\"" + fixed(py(plot.reference)) + "\" stroke=\"gray\" stroke-dasharray=\"4 3\"/>\n";
  }
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = kColors[k % std::size(kColors)];
    std::string points;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!(s.x[i] > 0.0) || !std::isfinite(s.y[i])) continue;
      if (!points.empty()) points += ' ';
      points += fixed(px(s.x[i])) + "," + fixed(py(s.y[i]));
      svg += "<circle cx=\"" + fixed(px(s.x[i])) + "\" cy=\"" + fixed(py(s.y[i])) + "\" r=\"3\" fill=\"" + color +
             "\"/>\n";
    }
    svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) + "\" stroke-width=\"1.5\" points=\"" + points +
           "\"/>\n";
    const double ly = T + 14 + 18.0 * static_cast<double>(k);
    svg += "<line x1=\"" + fixed(W - R + 10) + "\" x2=\"" + fixed(W - R + 30) + "\" y1=\"" + fixed(ly - 4) +
           "\" y2=\"" + fixed(ly - 4) + "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + fixed(W - R + 36) + "\" y=\"" + fixed(ly) + "\">" + xml_escape(s.label) + "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void write_file(const std::string& path, const std::string& contents) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open '" + tmp + "' for writing");
    out << contents;
    if (!out) throw Error("write to '" + tmp + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw Error("cannot rename '" + tmp + "' to '" + path + "': " + ec.message());
}

}  // namespace ruinlab
