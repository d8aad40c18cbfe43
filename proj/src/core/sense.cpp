#include <array>

#include "disco/core.hpp"
#include "disco/error.hpp"

namespace disco {
namespace {

constexpr std::array<std::pair<TopSense, std::string_view>, 4> kTopNames{{
    {TopSense::kTemporal, "Temporal"},
    {TopSense::kContingency, "Contingency"},
    {TopSense::kComparison, "Comparison"},
    {TopSense::kExpansion, "Expansion"},
}};

struct SecondInfo {
  SecondSense sense;
  std::string_view name;
  TopSense parent;
};

// Canonical 11-way order.
constexpr std::array<SecondInfo, 11> kSecondInfo{{
    {SecondSense::kConcession, "Concession", TopSense::kComparison},
    {SecondSense::kContrast, "Contrast", TopSense::kComparison},
    {SecondSense::kCause, "Cause", TopSense::kContingency},
    {SecondSense::kJustification, "Justification", TopSense::kContingency},
    {SecondSense::kAlternative, "Alternative", TopSense::kExpansion},
    {SecondSense::kConjunction, "Conjunction", TopSense::kExpansion},
    {SecondSense::kInstantiation, "Instantiation", TopSense::kExpansion},
    {SecondSense::kList, "List", TopSense::kExpansion},
    {SecondSense::kRestatement, "Restatement", TopSense::kExpansion},
    {SecondSense::kAsynchronous, "Asynchronous", TopSense::kTemporal},
    {SecondSense::kSynchronous, "Synchronous", TopSense::kTemporal},
}};

const SecondInfo& info(SecondSense sense) {
  for (const auto& entry : kSecondInfo) {
    if (entry.sense == sense) return entry;
  }
  throw std::logic_error("unknown second-level sense");
}

std::optional<TopSense> find_top(std::string_view name) {
  for (const auto& [sense, n] : kTopNames) {
    if (n == name) return sense;
  }
  return std::nullopt;
}

std::optional<SecondSense> find_second(std::string_view name) {
  for (const auto& entry : kSecondInfo) {
    if (entry.name == name) return entry.sense;
  }
  return std::nullopt;
}

}  // namespace

std::string_view to_string(TopSense sense) {
  for (const auto& [s, name] : kTopNames) {
    if (s == sense) return name;
  }
  throw std::logic_error("unknown top-level sense");
}

std::string_view to_string(SecondSense sense) { return info(sense).name; }

TopSense parent_of(SecondSense sense) { return info(sense).parent; }

Level level_from_int(int level) {
  if (level == 4) return Level::kTop;
  if (level == 11) return Level::kSecond;
  throw ValidationError("classification level must be 4 or 11, got " +
                        std::to_string(level));
}

const std::vector<std::string>& label_space(Level level) {
  static const std::vector<std::string> top = {"Comparison", "Contingency",
                                               "Expansion", "Temporal"};
  static const std::vector<std::string> second = [] {
    std::vector<std::string> names;
    for (const auto& entry : kSecondInfo) names.emplace_back(entry.name);
    return names;
  }();
  return level == Level::kTop ? top : second;
}

SenseLabel::SenseLabel(TopSense top, SecondSense second)
    : top_(top), second_(second) {
  if (parent_of(second) != top) {
    throw ValidationError(std::string(disco::to_string(second)) +
                          " is not a child of " +
                          std::string(disco::to_string(top)));
  }
}

std::string SenseLabel::to_string() const {
  std::string out(disco::to_string(top_));
  if (second_) {
    out += '.';
    out += disco::to_string(*second_);
  }
  return out;
}

std::optional<std::string> SenseLabel::label_at(Level level) const {
  if (level == Level::kTop) return std::string(disco::to_string(top_));
  if (!second_) return std::nullopt;
  return std::string(disco::to_string(*second_));
}

SenseLabel parse_sense(std::string_view label) {
  const auto dot = label.find('.');
  const std::string_view top_name = label.substr(0, dot);
  const auto top = find_top(top_name);
  if (!top) {
    throw ValidationError("unknown top-level sense '" + std::string(top_name) +
                          "' in label '" + std::string(label) + "'");
  }
  if (dot == std::string_view::npos) return SenseLabel(*top);
  const std::string_view second_name = label.substr(dot + 1);
  const auto second = find_second(second_name);
  if (!second) {
    throw ValidationError("unknown second-level sense '" +
                          std::string(second_name) + "' in label '" +
                          std::string(label) + "'");
  }
  return SenseLabel(*top, *second);
}

SenseLabel parse_sense_lenient(std::string_view label) {
  if (label == "Contingency.Pragmatic cause") {
    return SenseLabel(TopSense::kContingency, SecondSense::kJustification);
  }
  return parse_sense(label);
}

SenseLabel sense_from_level_label(std::string_view name, Level level) {
  if (level == Level::kTop) {
    if (const auto top = find_top(name)) return SenseLabel(*top);
  } else if (const auto second = find_second(name)) {
    return SenseLabel(*second);
  }
  throw ValidationError("'" + std::string(name) + "' is not a " +
                        std::to_string(static_cast<int>(level)) +
                        "-way label");
}

TopSense coarsen(const SenseLabel& sense) { return sense.top(); }

}  // namespace disco
