#include "rclass/harness/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "rclass/errors.hpp"

namespace rclass::harness {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  for (auto& c : out) {
    const auto b = c.find_first_not_of(" \t\r\"");
    const auto e = c.find_last_not_of(" \t\r\"");
    c = b == std::string::npos ? std::string{} : c.substr(b, e - b + 1);
  }
  return out;
}

// lower-case letters only, so "Chip-ped" and "chipped" compare equal
std::string squash(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  return out;
}

double parse_number(const std::string& cell, std::size_t row, const std::string& column) {
  double v = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  if (first != last && *first == '+') ++first;
  const auto [p, ec] = std::from_chars(first, last, v);
  if (cell.empty() || ec != std::errc{} || p != last) {
    throw BadRow(row, "non-numeric value '" + cell + "' in column " + column);
  }
  return v;
}

int parse_flag(const std::string& cell, std::size_t row, const std::string& column) {
  const double v = parse_number(cell, row, column);
  if (v != 0.0 && v != 1.0) throw BadRow(row, "flag " + column + " must be 0 or 1");
  return static_cast<int>(v);
}

}  // namespace

DatasetSchema tool_wear_schema() {
  return {{"cutting_speed", "feed_rate", "depth_of_cut", "static_force_x", "static_force_y",
           "static_force_z", "dynamic_force_x", "dynamic_force_y", "dynamic_force_z",
           "acceleration_x", "acceleration_y", "acceleration_z"},
          {"flank", "nose", "chipped"},
          {"sharp", "flank", "flank+nose", "flank+chipped"}};
}

int wear_class(int flank, int nose, int chipped, std::size_t row) {
  const int code = flank * 100 + nose * 10 + chipped;
  switch (code) {
    case 0: return 0;
    case 100: return 1;
    case 110: return 2;
    case 111: return 3;
    default: break;
  }
  throw BadRow(row, "wear code " + std::to_string(flank) + std::to_string(nose) +
                        std::to_string(chipped) + " is not one of 000, 100, 110, 111");
}

Dataset parse_dataset(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw BadRow(0, "missing header row");
  const auto header = split_csv(line);

  const bool wear = header.size() >= 4 && squash(header[header.size() - 3]) == "flank" &&
                    squash(header[header.size() - 2]) == "nose" &&
                    squash(header[header.size() - 1]) == "chipped";
  std::size_t label_col = header.size();
  if (!wear) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      const auto name = squash(header[c]);
      if (name == "class" || name == "label") label_col = c;
    }
    if (label_col == header.size()) {
      throw BadRow(0, "header has neither flank/nose/chipped flags nor a class column");
    }
  }

  Dataset ds;
  const std::size_t n_feat = wear ? header.size() - 3 : header.size() - 1;
  for (std::size_t c = 0; c < header.size(); ++c) {
    if (wear ? c < n_feat : c != label_col) ds.feature_names.push_back(header[c]);
  }
  if (wear) ds.class_names = tool_wear_schema().class_names;

  int max_class = -1;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ++row;
    const auto cells = split_csv(line);
    if (cells.size() != header.size()) {
      throw BadRow(row, "expected " + std::to_string(header.size()) + " columns, got " +
                            std::to_string(cells.size()));
    }
    StreamSample s;
    s.index = row - 1;
    s.x.resize(static_cast<Eigen::Index>(n_feat));
    Eigen::Index j = 0;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (wear ? c < n_feat : c != label_col) s.x[j++] = parse_number(cells[c], row, header[c]);
    }
    if (wear) {
      s.label = wear_class(parse_flag(cells[n_feat], row, header[n_feat]),
                           parse_flag(cells[n_feat + 1], row, header[n_feat + 1]),
                           parse_flag(cells[n_feat + 2], row, header[n_feat + 2]), row);
    } else {
      const double v = parse_number(cells[label_col], row, header[label_col]);
      if (v < 0.0 || v != static_cast<double>(static_cast<int>(v))) {
        throw BadRow(row, "class must be a non-negative integer");
      }
      s.label = static_cast<int>(v);
    }
    max_class = std::max(max_class, *s.label);
    ds.samples.push_back(std::move(s));
  }
  ds.n_classes = wear ? 4 : std::max(2, max_class + 1);
  if (ds.class_names.empty()) {
    for (int o = 0; o < ds.n_classes; ++o) ds.class_names.push_back("class" + std::to_string(o));
  }
  return ds;
}

Dataset load_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open dataset " + path);
  return parse_dataset(in);
}

MinMaxScaler MinMaxScaler::fit(const std::vector<StreamSample>& samples, std::size_t prefix) {
  MinMaxScaler s;
  prefix = std::min(prefix, samples.size());
  if (prefix == 0) return s;
  s.lo = samples[0].x;
  s.hi = samples[0].x;
  for (std::size_t i = 1; i < prefix; ++i) {
    s.lo = s.lo.cwiseMin(samples[i].x);
    s.hi = s.hi.cwiseMax(samples[i].x);
  }
  s.identity = s.lo.minCoeff() >= 0.0 && s.hi.maxCoeff() <= 1.0;
  return s;
}

Vector MinMaxScaler::apply(const Vector& x) const {
  if (identity) return x;
  Vector out(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    const double span = hi[j] - lo[j];
    out[j] = span > 0.0 ? (x[j] - lo[j]) / span : 0.0;
  }
  return out;
}

void MinMaxScaler::apply_all(std::vector<StreamSample>& samples) const {
  if (identity) return;
  for (auto& s : samples) s.x = apply(s.x);
}

void write_dataset(const std::string& path, const std::vector<StreamSample>& samples,
                   int n_features) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out.precision(17);
  for (int j = 0; j < n_features; ++j) out << 'f' << j + 1 << ',';
  out << "class\n";
  for (const auto& s : samples) {
    for (int j = 0; j < n_features; ++j) out << s.x[j] << ',';
    out << s.label.value_or(0) << '\n';
  }
}

}  // namespace rclass::harness
