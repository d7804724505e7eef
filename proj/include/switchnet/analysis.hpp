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

// Per-unit activation heatmaps and group attribution.

#ifndef SWITCHNET_ANALYSIS_HPP_
#define SWITCHNET_ANALYSIS_HPP_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "switchnet/network.hpp"

namespace switchnet {

enum class Statistic { kMean, kMax };
std::string to_string(Statistic s);
Statistic statistic_from_string(const std::string& s);

/// rows = units, columns = dataset groups (in dataset order).
struct HeatmapMatrix {
  std::vector<std::vector<double>> values;
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<GroupId> col_groups;
  Statistic statistic = Statistic::kMean;

  std::size_t rows() const noexcept { return values.size(); }
  std::size_t cols() const noexcept { return col_labels.size(); }
};

/// Entry (u, g) is the statistic of unit u's probe activation over the
/// observations of group g among `ids`. Every dataset group needs at least
/// one observation.
HeatmapMatrix heatmap(const ModularNetwork& net,
                      std::span<const ObservationId> ids,
                      const Dataset& dataset,
                      Statistic statistic = Statistic::kMean);

struct AttributionRow {
  UnitIndex unit = 0;
  GroupId group = 0;
  double margin = 0.0;  // top value minus runner-up; 0 for a single column
};

struct AttributionReport {
  std::vector<AttributionRow> rows;
};

/// Row-wise argmax; ties go to the earliest column.
AttributionReport attribute(const HeatmapMatrix& matrix);

std::string heatmap_to_csv(const HeatmapMatrix& matrix);
void export_heatmap_csv(const HeatmapMatrix& matrix,
                        const std::filesystem::path& path);
/// Parses the CSV written above (values only; statistic defaults to mean).
HeatmapMatrix parse_heatmap_csv(const std::string& text);

std::string heatmap_to_svg(const HeatmapMatrix& matrix);
void render_heatmap_svg(const HeatmapMatrix& matrix,
                        const std::filesystem::path& path);

}  // namespace switchnet

#endif  // SWITCHNET_ANALYSIS_HPP_
