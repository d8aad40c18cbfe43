#include <algorithm>
#include <unordered_map>

#include "disco/relclass.hpp"

namespace disco::relclass {
namespace {

std::string lowercase(std::string s) {
  for (char& c : s) {
    if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
  }
  return s;
}

// Lowercased tokens of each segment of a span.
std::vector<std::vector<std::string>> segment_words(const ArgumentSpan& span,
                                                    const Document& doc) {
  std::vector<std::vector<std::string>> out;
  for (const auto& seg : span.segments()) {
    auto& words = out.emplace_back();
    for (std::size_t t = seg.begin; t < seg.end; ++t) {
      words.push_back(lowercase(doc.tokens().at(t).surface));
    }
  }
  return out;
}

std::vector<std::string> top_words(
    const std::unordered_map<std::string, std::size_t>& counts,
    std::size_t top_k) {
  std::vector<std::pair<std::string, std::size_t>> sorted(counts.begin(),
                                                          counts.end());
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (sorted.size() > top_k) sorted.resize(top_k);
  std::vector<std::string> out;
  for (auto& [w, c] : sorted) out.push_back(std::move(w));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace

Featurizer::Featurizer(std::size_t top_k, std::vector<std::string> arg1_top,
                       std::vector<std::string> arg2_top)
    : top_k_(top_k),
      arg1_top_(std::move(arg1_top)),
      arg2_top_(std::move(arg2_top)) {
  std::sort(arg1_top_.begin(), arg1_top_.end());
  std::sort(arg2_top_.begin(), arg2_top_.end());
}

Featurizer Featurizer::fit(const Corpus& corpus, std::size_t top_k) {
  std::unordered_map<std::string, std::size_t> counts1;
  std::unordered_map<std::string, std::size_t> counts2;
  for (const auto& rel : corpus.relations()) {
    const Document& doc = corpus.document_of(rel);
    for (const auto& seg : segment_words(rel.arg1, doc)) {
      for (const auto& w : seg) ++counts1[w];
    }
    for (const auto& seg : segment_words(rel.arg2, doc)) {
      for (const auto& w : seg) ++counts2[w];
    }
  }
  return Featurizer(top_k, top_words(counts1, top_k), top_words(counts2, top_k));
}

FeatureVector Featurizer::featurize(const Relation& rel,
                                    const Document& doc) const {
  FeatureVector fv;
  std::map<std::string, double> frequent[2];
  const ArgumentSpan* spans[2] = {&rel.arg1, &rel.arg2};
  const std::vector<std::string>* tops[2] = {&arg1_top_, &arg2_top_};
  for (int k = 0; k < 2; ++k) {
    const std::string prefix = k == 0 ? "a1" : "a2";
    const auto segments = segment_words(*spans[k], doc);
    for (const auto& words : segments) {
      for (std::size_t i = 0; i < words.size(); ++i) {
        fv[prefix + ":" + words[i]] += 1.0;
        if (i + 1 < words.size()) {
          fv[prefix + ":" + words[i] + "_" + words[i + 1]] += 1.0;
        }
        if (std::binary_search(tops[k]->begin(), tops[k]->end(), words[i])) {
          frequent[k][words[i]] += 1.0;
        }
      }
    }
    fv[prefix + "_first:" + segments.front().front()] += 1.0;
    fv[prefix + "_last:" + segments.back().back()] += 1.0;
  }
  for (const auto& [w1, c1] : frequent[0]) {
    for (const auto& [w2, c2] : frequent[1]) fv["x:" + w1 + "|" + w2] += c1 * c2;
  }
  return fv;
}

}  // namespace disco::relclass
