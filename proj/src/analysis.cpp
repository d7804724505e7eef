/* Copyright 2026 The switchnet Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#include "switchnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>

#include "switchnet/error.hpp"
#include "switchnet/serialize.hpp"

namespace switchnet {

std::string to_string(Statistic s) { return s == Statistic::kMean ? "mean" : "max"; }

Statistic statistic_from_string(const std::string& s) {
  if (s == "mean") return Statistic::kMean;
  if (s == "max") return Statistic::kMax;
  throw Error(ErrorKind::kParse, "unknown statistic '" + s + "'");
}

HeatmapMatrix heatmap(const ModularNetwork& net, std::span<const ObservationId> ids,
                      const Dataset& dataset, Statistic statistic) {
  const auto& groups = dataset.groups();
  std::map<GroupId, std::size_t> column;
  for (std::size_t c = 0; c < groups.size(); ++c) column[groups[c].id] = c;

  const std::size_t n_units = net.n_units();
  const double init = statistic == Statistic::kMean
                          ? 0.0
                          : -std::numeric_limits<double>::infinity();
  std::vector<std::vector<double>> acc(n_units, std::vector<double>(groups.size(), init));
  std::vector<std::size_t> counts(groups.size(), 0);

  for (ObservationId id : ids) {
    const Observation& o = dataset.at(id);
    const std::size_t c = column.at(o.group);
    const auto probe = probe_activations(net, o.features);
    for (std::size_t u = 0; u < n_units; ++u) {
      if (statistic == Statistic::kMean) {
        acc[u][c] += probe[u];
      } else {
        acc[u][c] = std::max(acc[u][c], probe[u]);
      }
    }
    ++counts[c];
  }
  for (std::size_t c = 0; c < groups.size(); ++c) {
    if (counts[c] == 0) {
      throw Error(ErrorKind::kInvalidArgument,
                  "heatmap column for group " + std::to_string(groups[c].id) +
                      " ('" + groups[c].name + "') has no observations");
    }
  }
  if (statistic == Statistic::kMean) {
    for (auto& row : acc) {
      for (std::size_t c = 0; c < row.size(); ++c) {
        row[c] /= static_cast<double>(counts[c]);
      }
    }
  }

  HeatmapMatrix m;
  m.values = std::move(acc);
  m.statistic = statistic;
  for (std::size_t u = 0; u < n_units; ++u) m.row_labels.push_back("Neuron " + std::to_string(u));
  for (const auto& g : groups) {
    m.col_labels.push_back(g.name);
    m.col_groups.push_back(g.id);
  }
  return m;
}

AttributionReport attribute(const HeatmapMatrix& matrix) {
  AttributionReport report;
  for (std::size_t u = 0; u < matrix.rows(); ++u) {
    const auto& row = matrix.values[u];
    if (row.empty()) {
      throw Error(ErrorKind::kInvalidArgument, "heatmap row has no columns");
    }
    std::size_t best = 0;
    for (std::size_t c = 1; c < row.size(); ++c) {
      if (row[c] > row[best]) best = c;
    }
    double runner_up = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c != best) runner_up = std::max(runner_up, row[c]);
    }
    AttributionRow r;
    r.unit = u;
    r.group = matrix.col_groups.empty() ? static_cast<GroupId>(best)
                                        : matrix.col_groups[best];
    r.margin = row.size() > 1 ? row[best] - runner_up : 0.0;
    report.rows.push_back(r);
  }
  return report;
}

namespace {

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  out += '"';
  return out;
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string field;
  bool quoted = false;
  bool any = false;
  for (std::size_t i = 0; i < text.size(); ++i) {
    const char ch = text[i];
    if (quoted) {
      if (ch == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          field += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field += ch;
      }
      continue;
    }
    if (ch == '"') {
      quoted = true;
      any = true;
    } else if (ch == ',') {
      row.push_back(std::move(field));
      field.clear();
      any = true;
    } else if (ch == '\n' || ch == '\r') {
      if (ch == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ++i;
      if (any || !field.empty()) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
      }
      row.clear();
      field.clear();
      any = false;
    } else {
      field += ch;
      any = true;
    }
  }
  if (any || !field.empty()) {
    row.push_back(std::move(field));
    rows.push_back(std::move(row));
  }
  return rows;
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    switch (ch) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += ch;
    }
  }
  return out;
}

struct Rgb {
  int r, g, b;
};

// Light for the matrix minimum, dark for the maximum.
constexpr Rgb kLight{247, 251, 255};
constexpr Rgb kDark{8, 48, 107};

std::string hex_color(double t) {
  auto lerp = [t](int a, int b) {
    return static_cast<int>(std::lround(a + (b - a) * t));
  };
  char buf[8];
  std::snprintf(buf, sizeof(buf), "#%02x%02x%02x", lerp(kLight.r, kDark.r),
                lerp(kLight.g, kDark.g), lerp(kLight.b, kDark.b));
  return buf;
}

}  // namespace

std::string heatmap_to_csv(const HeatmapMatrix& matrix) {
  std::string out = "unit";
  for (const auto& label : matrix.col_labels) out += "," + csv_field(label);
  out += '\n';
  for (std::size_t u = 0; u < matrix.rows(); ++u) {
    out += csv_field(u < matrix.row_labels.size() ? matrix.row_labels[u]
                                                  : std::to_string(u));
    for (double v : matrix.values[u]) out += "," + fixed(v, 6);
    out += '\n';
  }
  return out;
}

void export_heatmap_csv(const HeatmapMatrix& matrix, const std::filesystem::path& path) {
  write_text_file(path, heatmap_to_csv(matrix));
}

HeatmapMatrix parse_heatmap_csv(const std::string& text) {
  const auto rows = parse_csv(text);
  if (rows.empty() || rows[0].empty() || rows[0][0] != "unit") {
    throw Error(ErrorKind::kParse, "heatmap CSV must start with a 'unit' header");
  }
  HeatmapMatrix m;
  m.col_labels.assign(rows[0].begin() + 1, rows[0].end());
  for (std::size_t c = 0; c < m.col_labels.size(); ++c) {
    m.col_groups.push_back(static_cast<GroupId>(c));
  }
  for (std::size_t r = 1; r < rows.size(); ++r) {
    if (rows[r].size() != rows[0].size()) {
      throw Error(ErrorKind::kParse,
                  "wrong column count, line " + std::to_string(r + 1));
    }
    m.row_labels.push_back(rows[r][0]);
    std::vector<double> values;
    for (std::size_t c = 1; c < rows[r].size(); ++c) values.push_back(std::stod(rows[r][c]));
    m.values.push_back(std::move(values));
  }
  return m;
}

std::string heatmap_to_svg(const HeatmapMatrix& matrix) {
  constexpr int kCellW = 120;
  constexpr int kCellH = 44;
  constexpr int kLeft = 110;
  constexpr int kTop = 150;
  constexpr int kPad = 20;

  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& row : matrix.values) {
    for (double v : row) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  }
  const bool constant = !(hi > lo);

  const int width = kLeft + static_cast<int>(matrix.cols()) * kCellW + kPad;
  const int height = kTop + static_cast<int>(matrix.rows()) * kCellH + kPad;
  std::string out;
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(width) +
         "\" height=\"" + std::to_string(height) + "\" viewBox=\"0 0 " +
         std::to_string(width) + " " + std::to_string(height) +
         "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out += "<title>Neuron activation heatmap (" + to_string(matrix.statistic) +
         ")</title>\n";

  for (std::size_t c = 0; c < matrix.cols(); ++c) {
    const int x = kLeft + static_cast<int>(c) * kCellW + kCellW / 2;
    const int y = kTop - 8;
    out += "<text class=\"col-label\" x=\"" + std::to_string(x) + "\" y=\"" +
           std::to_string(y) + "\" transform=\"rotate(-35 " + std::to_string(x) + " " +
           std::to_string(y) + ")\">" + xml_escape(matrix.col_labels[c]) + "</text>\n";
  }
  for (std::size_t u = 0; u < matrix.rows(); ++u) {
    const int y = kTop + static_cast<int>(u) * kCellH + kCellH / 2 + 4;
    const std::string label =
        u < matrix.row_labels.size() ? matrix.row_labels[u] : std::to_string(u);
    out += "<text class=\"row-label\" x=\"" + std::to_string(kLeft - 8) + "\" y=\"" +
           std::to_string(y) + "\" text-anchor=\"end\">" + xml_escape(label) +
           "</text>\n";
  }
  for (std::size_t u = 0; u < matrix.rows(); ++u) {
    for (std::size_t c = 0; c < matrix.cols(); ++c) {
      const double v = matrix.values[u][c];
      const double t = constant ? 0.5 : (v - lo) / (hi - lo);
      const int x = kLeft + static_cast<int>(c) * kCellW;
      const int y = kTop + static_cast<int>(u) * kCellH;
      out += "<rect class=\"cell\" x=\"" + std::to_string(x) + "\" y=\"" +
             std::to_string(y) + "\" width=\"" + std::to_string(kCellW) +
             "\" height=\"" + std::to_string(kCellH) + "\" fill=\"" + hex_color(t) +
             "\" stroke=\"#ffffff\"/>\n";
      out += "<text class=\"value\" x=\"" + std::to_string(x + kCellW / 2) +
             "\" y=\"" + std::to_string(y + kCellH / 2 + 4) +
             "\" text-anchor=\"middle\" fill=\"" + (t > 0.55 ? "#ffffff" : "#000000") +
             "\">" + fixed(v, 3) + "</text>\n";
    }
  }
  out += "</svg>\n";
  return out;
}

void render_heatmap_svg(const HeatmapMatrix& matrix, const std::filesystem::path& path) {
  write_text_file(path, heatmap_to_svg(matrix));
}

}  // namespace switchnet
