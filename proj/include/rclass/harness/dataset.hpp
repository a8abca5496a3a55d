#pragma once

// CSV ingestion. Two layouts are recognised from the header row:
//  - tool-wear: 12 feature columns followed by the flank, nose and chipped
//    flags; the flag triple maps to one of four wear classes;
//  - generic: any numeric feature columns plus an integer `class` (or
//    `label`) column.

#include <istream>
#include <string>
#include <vector>

#include "rclass/types.hpp"

namespace rclass::harness {

struct DatasetSchema {
  std::vector<std::string> feature_columns;
  std::vector<std::string> label_columns;
  std::vector<std::string> class_names;
};

DatasetSchema tool_wear_schema();

// 000 -> 0, 100 -> 1, 110 -> 2, 111 -> 3; anything else throws BadRow.
int wear_class(int flank, int nose, int chipped, std::size_t row);

struct Dataset {
  std::vector<std::string> feature_names;
  std::vector<std::string> class_names;
  std::vector<StreamSample> samples;
  int n_classes = 0;

  int n_features() const { return static_cast<int>(feature_names.size()); }
};

// Rows are numbered from 1 for the first data line. Throws BadRow.
Dataset parse_dataset(std::istream& in);
Dataset load_dataset(const std::string& path);

// Per-feature min-max scaling fitted on a prefix.
struct MinMaxScaler {
  Vector lo;
  Vector hi;
  bool identity = true;  // the fitted prefix was already inside [0,1]

  static MinMaxScaler fit(const std::vector<StreamSample>& samples, std::size_t prefix);
  Vector apply(const Vector& x) const;
  void apply_all(std::vector<StreamSample>& samples) const;
};

// Writes the generic layout (f1..fu, class).
void write_dataset(const std::string& path, const std::vector<StreamSample>& samples,
                   int n_features);

}  // namespace rclass::harness
