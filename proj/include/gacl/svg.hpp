#pragma once

#include <string>
#include <vector>

#include "gacl/io.hpp"

namespace gacl::svg {

struct PlotSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
  // Shade y +/- se behind each series when a "<y>_se" column exists.
  bool se_bands = false;
};

// Renders one line chart: exactly one <polyline> per y column (bands are
// <polygon>, axes/legend use <line>/<rect>/<text>), written atomically.
void emit_svg(const io::Table& table, const std::string& x_col,
              const std::vector<std::string>& y_cols,
              const std::string& out_path, const PlotSpec& spec = {});

// Convenience: read the CSV, then render as above.
void emit_svg_from_csv(const std::string& csv_path, const std::string& x_col,
                       const std::vector<std::string>& y_cols,
                       const std::string& out_path, const PlotSpec& spec = {});

}  // namespace gacl::svg
