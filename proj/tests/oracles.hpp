#pragma once

// Independent reference computations and random generators shared by the
// unit tests and the acceptance binary.

#include <cmath>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "disco/aligner.hpp"

namespace disco::testing {

using align::AlignmentSet;
using align::SentencePair;
using align::TranslationTable;

inline std::vector<std::string> words(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

inline std::vector<SentencePair> toy_corpus() {
  return {{words("the house"), words("das haus")},
          {words("the book"), words("das buch")},
          {words("a book"), words("ein buch")}};
}

// Textbook EM for Model 1 over dense maps, written independently of the
// trainer: t(f|e) starts uniform over the f co-occurring with e.
struct OracleEm {
  std::map<std::string, std::map<std::string, double>> t;
  std::vector<double> log_likelihood;

  OracleEm(const std::vector<SentencePair>& pairs, int iterations, bool null_word) {
    auto sources = [&](const SentencePair& p) {
      std::vector<std::string> s = p.source;
      if (null_word) s.insert(s.begin(), std::string(TranslationTable::kNullWord));
      return s;
    };
    for (const auto& p : pairs) {
      for (const auto& e : sources(p)) {
        for (const auto& f : p.target) t[e][f] = 0.0;
      }
    }
    for (auto& [e, row] : t) {
      for (auto& [f, v] : row) v = 1.0 / static_cast<double>(row.size());
    }
    for (int it = 0; it <= iterations; ++it) {
      std::map<std::string, std::map<std::string, double>> count;
      double ll = 0.0;
      for (const auto& p : pairs) {
        const auto src = sources(p);
        for (const auto& f : p.target) {
          double z = 0.0;
          for (const auto& e : src) z += t[e][f];
          ll += std::log(z);
          for (const auto& e : src) count[e][f] += t[e][f] / z;
        }
      }
      log_likelihood.push_back(ll);
      if (it == iterations) break;
      for (auto& [e, row] : t) {
        double total = 0.0;
        for (auto& [f, v] : row) total += count[e][f];
        for (auto& [f, v] : row) v = count[e][f] / total;
      }
    }
  }
};

inline std::vector<SentencePair> random_pairs(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> npairs(1, 12), len(1, 7), vocab(2, 9);
  const int vs = vocab(rng), vt = vocab(rng);
  std::vector<SentencePair> out(static_cast<std::size_t>(npairs(rng)));
  for (auto& p : out) {
    for (int k = len(rng); k > 0; --k) p.source.push_back("s" + std::to_string(rng() % vs));
    for (int k = len(rng); k > 0; --k) p.target.push_back("t" + std::to_string(rng() % vt));
  }
  return out;
}

inline AlignmentSet random_links(std::mt19937_64& rng, std::size_t n, std::size_t m,
                          std::string id) {
  AlignmentSet s{std::move(id), {}};
  std::bernoulli_distribution on(0.25);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (on(rng)) s.links.insert({i, j});
    }
  }
  return s;
}

// Each (i, j) link present independently with probability `density`.
inline AlignmentSet random_alignment(std::mt19937_64& rng, std::size_t n,
                                     std::size_t m, double density) {
  AlignmentSet a;
  std::bernoulli_distribution on(density);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      if (on(rng)) a.links.insert({i, j});
    }
  }
  return a;
}

}  // namespace disco::testing
