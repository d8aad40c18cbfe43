#include "disco/metrics.hpp"

#include <algorithm>
#include <istream>
#include <sstream>

#include "disco/error.hpp"
#include "json.hpp"

namespace disco::metrics {

ConfusionMatrix::ConfusionMatrix(std::vector<std::string> labels)
    : labels_(std::move(labels)),
      counts_(labels_.size(), std::vector<std::uint64_t>(labels_.size(), 0)) {
  std::vector<std::string> sorted = labels_;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ValidationError("duplicate label in confusion matrix");
  }
}

std::size_t ConfusionMatrix::index_of(std::string_view label) const {
  const auto it = std::find(labels_.begin(), labels_.end(), label);
  if (it == labels_.end()) {
    throw ValidationError("label '" + std::string(label) +
                          "' is outside the label space");
  }
  return static_cast<std::size_t>(it - labels_.begin());
}

void ConfusionMatrix::add(std::string_view gold, std::string_view pred,
                          std::uint64_t n) {
  counts_[index_of(gold)][index_of(pred)] += n;
}

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t n = 0;
  for (const auto& row : counts_) {
    for (const auto c : row) n += c;
  }
  return n;
}

std::uint64_t ConfusionMatrix::diagonal() const {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < counts_.size(); ++i) n += counts_[i][i];
  return n;
}

std::uint64_t ConfusionMatrix::row_sum(std::size_t gold) const {
  std::uint64_t n = 0;
  for (const auto c : counts_[gold]) n += c;
  return n;
}

std::uint64_t ConfusionMatrix::col_sum(std::size_t pred) const {
  std::uint64_t n = 0;
  for (const auto& row : counts_) n += row[pred];
  return n;
}

std::string ConfusionMatrix::to_csv() const {
  std::ostringstream out;
  out << "gold\\pred";
  for (const auto& l : labels_) out << ',' << l;
  out << '\n';
  for (std::size_t g = 0; g < labels_.size(); ++g) {
    out << labels_[g];
    for (const auto c : counts_[g]) out << ',' << c;
    out << '\n';
  }
  return out.str();
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    cells.push_back(cell);
  }
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

ConfusionMatrix ConfusionMatrix::from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw ValidationError("empty confusion CSV");
  auto header = split_csv(line);
  if (header.empty()) throw ValidationError("confusion CSV has no header");
  header.erase(header.begin());
  ConfusionMatrix m(header);
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cells = split_csv(line);
    if (cells.size() != header.size() + 1) {
      throw FormatError("confusion CSV", row + 2, "wrong number of cells");
    }
    const std::size_t g = m.index_of(cells[0]);
    for (std::size_t p = 0; p < header.size(); ++p) {
      try {
        m.counts_[g][p] = cells[p + 1].empty() ? 0 : std::stoull(cells[p + 1]);
      } catch (const std::exception&) {
        throw FormatError("confusion CSV", row + 2,
                          "bad count '" + cells[p + 1] + "'");
      }
    }
    ++row;
  }
  return m;
}

ConfusionMatrix confusion(
    std::span<const std::pair<std::string, std::string>> gold_pred,
    std::vector<std::string> labels) {
  ConfusionMatrix m(std::move(labels));
  for (const auto& [gold, pred] : gold_pred) m.add(gold, pred);
  return m;
}

MetricsReport score(const ConfusionMatrix& matrix) {
  const std::uint64_t total = matrix.total();
  if (total == 0) throw ValidationError("cannot score an empty confusion matrix");
  MetricsReport report;
  report.evaluated_count = total;
  report.accuracy =
      static_cast<double>(matrix.diagonal()) / static_cast<double>(total);
  double f1_sum = 0.0;
  for (std::size_t k = 0; k < matrix.labels().size(); ++k) {
    ClassScores c;
    c.label = matrix.labels()[k];
    c.support = matrix.row_sum(k);
    c.predicted = matrix.col_sum(k);
    const auto tp = static_cast<double>(matrix.count(k, k));
    c.precision = c.predicted ? tp / static_cast<double>(c.predicted) : 0.0;
    c.recall = c.support ? tp / static_cast<double>(c.support) : 0.0;
    const double pr = c.precision + c.recall;
    c.f1 = pr > 0.0 ? 2.0 * c.precision * c.recall / pr : 0.0;
    c.averaged = c.support > 0 || c.predicted > 0;
    if (c.averaged) {
      f1_sum += c.f1;
      ++report.averaging_population;
    }
    report.per_class.push_back(std::move(c));
  }
  report.macro_f1 = f1_sum / static_cast<double>(report.averaging_population);
  return report;
}

std::string MetricsReport::to_json() const {
  nlohmann::ordered_json j;
  j["accuracy"] = accuracy;
  j["macro_f1"] = macro_f1;
  j["evaluated_count"] = evaluated_count;
  j["averaging_population"] = averaging_population;
  auto classes = nlohmann::ordered_json::array();
  for (const auto& c : per_class) {
    nlohmann::ordered_json e;
    e["label"] = c.label;
    e["precision"] = c.precision;
    e["recall"] = c.recall;
    e["f1"] = c.f1;
    e["support"] = c.support;
    e["predicted"] = c.predicted;
    e["averaged"] = c.averaged;
    classes.push_back(std::move(e));
  }
  j["per_class"] = std::move(classes);
  return j.dump(2) + "\n";
}

std::map<std::string, std::size_t> distribution(const Corpus& corpus,
                                                Level level) {
  std::map<std::string, std::size_t> counts;
  for (const auto& rel : corpus.relations()) {
    if (const auto label = rel.sense.label_at(level)) ++counts[*label];
  }
  return counts;
}

}  // namespace disco::metrics
