#pragma once

#include <string>
#include <vector>

namespace ruinlab {

/// A CSV table. Fields containing commas, quotes or newlines are quoted.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::string to_csv() const;
};

struct PlotSeries {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

/// Line chart with a logarithmic x axis and an optional dashed reference line.
struct Plot {
  std::string title;
  std::string x_label = "x";
  std::string y_label = "ratio";
  std::vector<PlotSeries> series;
  bool has_reference = true;
  double reference = 1.0;
};

std::string render_svg(const Plot& plot);

/// Writes `contents` to `path` via a temporary file and rename.
void write_file(const std::string& path, const std::string& contents);

}  // namespace ruinlab
