#include "slb/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace slb {

void Dataset::validate() const {
  if (n() < 1 || d() < 1) throw DataError("dataset must have n >= 1 and d >= 1");
  if (labels.size() != n()) throw DataError("label count does not match row count");
  if (feature_names.size() != d())
    throw DataError("feature name count does not match column count");
  for (double x : features.data)
    if (!std::isfinite(x)) throw DataError("non-finite feature value");
  for (int y : labels)
    if (y != -1 && y != 1) throw DataError("labels must be -1 or +1");
}

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

double parse_cell(const std::string& cell, std::size_t row, const std::string& col) {
  if (cell.empty())
    throw DataError("missing value at row " + std::to_string(row) + ", column " + col +
                    " (remove incomplete instances before loading)");
  double value = 0.0;
  const char* first = cell.data();
  const char* last = cell.data() + cell.size();
  auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw DataError("non-numeric cell '" + cell + "' at row " + std::to_string(row) +
                    ", column " + col);
  if (!std::isfinite(value))
    throw DataError("non-finite value at row " + std::to_string(row) + ", column " + col);
  return value;
}

}  // namespace

Dataset load_csv(const std::string& path, const std::string& label_column,
                 const std::string& positive_label) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open file: " + path);

  std::string line;
  if (!std::getline(in, line)) throw DataError("empty file: " + path);
  const auto header = split_line(line);

  std::size_t label_idx = header.size();
  for (std::size_t i = 0; i < header.size(); ++i)
    if (header[i] == label_column) label_idx = i;
  if (label_idx == header.size())
    throw DataError("label column '" + label_column + "' not found in " + path);
  if (header.size() < 2) throw DataError("no feature columns in " + path);

  std::vector<std::string> names;
  for (std::size_t i = 0; i < header.size(); ++i)
    if (i != label_idx) names.push_back(header[i]);

  std::vector<double> values;
  std::vector<std::string> raw_labels;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++row;
    const auto cells = split_line(line);
    if (cells.size() != header.size())
      throw DataError("row " + std::to_string(row) + " has " +
                      std::to_string(cells.size()) + " cells, expected " +
                      std::to_string(header.size()));
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i == label_idx) {
        if (cells[i].empty())
          throw DataError("missing label at row " + std::to_string(row));
        raw_labels.push_back(cells[i]);
      } else {
        values.push_back(parse_cell(cells[i], row, header[i]));
      }
    }
  }
  if (row == 0) throw DataError("no data rows in " + path);

  std::set<std::string> distinct(raw_labels.begin(), raw_labels.end());
  if (distinct.size() != 2)
    throw DataError("degenerate labels: expected exactly 2 distinct label values, found " +
                    std::to_string(distinct.size()));

  std::string positive = positive_label;
  if (positive.empty()) {
    positive = *std::max_element(distinct.begin(), distinct.end());
  } else if (!distinct.count(positive)) {
    throw DataError("positive label '" + positive + "' does not occur in the data");
  }

  Dataset ds;
  ds.feature_names = names;
  ds.features = Matrix(row, names.size());
  std::copy(values.begin(), values.end(), ds.features.data.begin());
  ds.labels.resize(row);
  for (std::size_t r = 0; r < row; ++r) ds.labels[r] = (raw_labels[r] == positive) ? 1 : -1;
  ds.validate();
  return ds;
}

std::string to_csv_string(const Dataset& ds, const std::string& label_column) {
  std::ostringstream out;
  for (const auto& name : ds.feature_names) out << name << ',';
  out << label_column << '\n';
  for (std::size_t r = 0; r < ds.n(); ++r) {
    for (std::size_t c = 0; c < ds.d(); ++c) out << format_double(ds.features(r, c)) << ',';
    out << (ds.labels[r] > 0 ? "1" : "-1") << '\n';
  }
  return out.str();
}

void write_csv(const Dataset& ds, const std::string& path, const std::string& label_column) {
  std::ofstream out(path);
  if (!out) throw DataError("cannot write file: " + path);
  out << to_csv_string(ds, label_column);
}

StratifiedFolds stratified_kfold(const Dataset& ds, int k, Rng rng) {
  if (k < 2) throw DataError("fold count must be >= 2");
  StratifiedFolds folds;
  folds.k = k;
  folds.assignments.assign(ds.n(), -1);
  for (int cls : {-1, +1}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < ds.n(); ++i)
      if (ds.labels[i] == cls) idx.push_back(i);
    if (idx.size() < static_cast<std::size_t>(k))
      throw DataError("class " + std::to_string(cls) + " has " +
                      std::to_string(idx.size()) + " samples, fewer than k=" +
                      std::to_string(k));
    rng.shuffle(idx);
    for (std::size_t pos = 0; pos < idx.size(); ++pos)
      folds.assignments[idx[pos]] = static_cast<int>(pos % static_cast<std::size_t>(k));
  }
  return folds;
}

std::pair<Dataset, StandardizeRecord> standardize(const Dataset& ds) {
  StandardizeRecord rec;
  rec.mean.resize(ds.d());
  rec.scale.resize(ds.d());
  for (std::size_t c = 0; c < ds.d(); ++c) {
    const auto col = ds.features.column(c);
    rec.mean[c] = mean(col);
    const double sd = stddev(col, /*unbiased=*/false);
    rec.scale[c] = (sd > 0.0) ? sd : 1.0;
  }
  return {apply_standardize(rec, ds), rec};
}

Dataset apply_standardize(const StandardizeRecord& rec, const Dataset& ds) {
  if (rec.mean.size() != ds.d()) throw DataError("standardize record dimension mismatch");
  Dataset out = ds;
  for (std::size_t r = 0; r < ds.n(); ++r)
    for (std::size_t c = 0; c < ds.d(); ++c)
      out.features(r, c) = (ds.features(r, c) - rec.mean[c]) / rec.scale[c];
  return out;
}

Dataset subset_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
  Dataset out;
  out.feature_names = ds.feature_names;
  out.features = Matrix(rows.size(), ds.d());
  out.labels.resize(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t c = 0; c < ds.d(); ++c) out.features(i, c) = ds.features(rows[i], c);
    out.labels[i] = ds.labels[rows[i]];
  }
  return out;
}

std::pair<Dataset, Dataset> split_fold(const Dataset& ds, const StratifiedFolds& folds,
                                       int fold) {
  std::vector<std::size_t> train, test;
  for (std::size_t i = 0; i < ds.n(); ++i)
    (folds.assignments[i] == fold ? test : train).push_back(i);
  return {subset_rows(ds, train), subset_rows(ds, test)};
}

}  // namespace slb
