// Copyright 2026 The seqdim Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

// Scenarios and the symbolic algebra of projector words.
//
// A word lists (outcome, setting) letters in measurement order: the first
// letter is the first measurement applied to the state. The operator of a
// word w = (l_1, ..., l_n) is Pi_w = Pi_{l_n} ... Pi_{l_1}.

#include <algorithm>
#include <compare>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace seqdim {

/// Measurement scenario "m-l-o": m settings, sequences of length up to l,
/// o outcomes per setting.
struct Scenario {
  int m = 1;
  int l = 1;
  int o = 2;

  Scenario() = default;
  Scenario(int settings, int length, int outcomes) : m(settings), l(length), o(outcomes) {
    if (m < 1) throw std::domain_error("scenario: m must be >= 1");
    if (l < 1) throw std::domain_error("scenario: l must be >= 1");
    if (o < 2) throw std::domain_error("scenario: o must be >= 2");
  }

  std::string to_string() const {
    return std::to_string(m) + "-" + std::to_string(l) + "-" + std::to_string(o);
  }

  /// Parses "m-l-o". Errors name the offending field.
  static Scenario parse(std::string_view text) {
    std::vector<std::string> parts;
    std::string cur;
    for (char c : text) {
      if (c == '-') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(c);
      }
    }
    parts.push_back(cur);
    if (parts.size() != 3) {
      throw std::invalid_argument("scenario '" + std::string(text) +
                                  "': expected the form m-l-o (e.g. 3-2-2)");
    }
    static constexpr const char* names[3] = {"m", "l", "o"};
    int values[3];
    for (int i = 0; i < 3; ++i) {
      const auto& p = parts[i];
      if (p.empty() || p.size() > 6 ||
          !std::all_of(p.begin(), p.end(), [](char c) { return c >= '0' && c <= '9'; })) {
        throw std::invalid_argument("scenario '" + std::string(text) + "': field " + names[i] +
                                    " is not a positive integer");
      }
      values[i] = std::stoi(p);
    }
    if (values[0] < 1) throw std::invalid_argument("scenario: field m must be >= 1");
    if (values[1] < 1) throw std::invalid_argument("scenario: field l must be >= 1");
    if (values[2] < 2) throw std::invalid_argument("scenario: field o must be >= 2");
    return Scenario(values[0], values[1], values[2]);
  }

  friend bool operator==(const Scenario&, const Scenario&) = default;
};

/// One projector Pi_{r|s}.
struct Letter {
  int r = 0;
  int s = 0;

  friend bool operator==(const Letter&, const Letter&) = default;
  // Lexicographic on (s, r).
  friend std::strong_ordering operator<=>(const Letter& a, const Letter& b) {
    if (auto c = a.s <=> b.s; c != 0) return c;
    return a.r <=> b.r;
  }
};

class Word;
Word simplify(const Scenario& scenario, std::span<const Letter> raw);

/// Canonical product of projectors over the reduced outcome set {0..o-2}.
/// No two adjacent letters share a setting. The empty word is the identity;
/// a separate flag marks the annihilated product.
class Word {
 public:
  Word() = default;

  static Word identity(const Scenario& scenario) { return Word(scenario, {}, false); }
  static Word zero(const Scenario& scenario) { return Word(scenario, {}, true); }

  const Scenario& scenario() const { return scenario_; }
  const std::vector<Letter>& letters() const { return letters_; }
  std::size_t size() const { return letters_.size(); }
  bool is_zero() const { return zero_; }
  bool is_identity() const { return !zero_ && letters_.empty(); }

  Word reversed() const {
    Word w = *this;
    std::reverse(w.letters_.begin(), w.letters_.end());
    return w;
  }

  /// "r1|s1,r2|s2,..."; "1" for the identity and "0" for the zero word.
  std::string to_string() const {
    if (zero_) return "0";
    if (letters_.empty()) return "1";
    std::string out;
    for (std::size_t i = 0; i < letters_.size(); ++i) {
      if (i) out.push_back(',');
      out += std::to_string(letters_[i].r) + "|" + std::to_string(letters_[i].s);
    }
    return out;
  }

  static Word parse(const Scenario& scenario, std::string_view text);

  // Zero sorts first, then by length, then lexicographically on (s, r).
  friend std::strong_ordering operator<=>(const Word& a, const Word& b) {
    if (a.zero_ != b.zero_) return a.zero_ ? std::strong_ordering::less : std::strong_ordering::greater;
    if (auto c = a.letters_.size() <=> b.letters_.size(); c != 0) return c;
    return std::lexicographical_compare_three_way(a.letters_.begin(), a.letters_.end(),
                                                  b.letters_.begin(), b.letters_.end());
  }
  friend bool operator==(const Word& a, const Word& b) {
    return a.zero_ == b.zero_ && a.letters_ == b.letters_;
  }

 private:
  friend Word simplify(const Scenario& scenario, std::span<const Letter> raw);
  Word(const Scenario& scenario, std::vector<Letter> letters, bool zero)
      : scenario_(scenario), letters_(std::move(letters)), zero_(zero) {}

  Scenario scenario_;
  std::vector<Letter> letters_;
  bool zero_ = false;
};

/// Reduces a raw letter sequence with idempotency (equal adjacent letters
/// merge) and orthogonality (same setting, different outcome gives zero).
inline Word simplify(const Scenario& scenario, std::span<const Letter> raw) {
  std::vector<Letter> out;
  out.reserve(raw.size());
  for (const Letter& letter : raw) {
    if (letter.s < 0 || letter.s >= scenario.m) {
      throw std::domain_error("simplify: setting index " + std::to_string(letter.s) +
                              " outside 0.." + std::to_string(scenario.m - 1));
    }
    if (letter.r < 0 || letter.r > scenario.o - 2) {
      throw std::domain_error("simplify: outcome index " + std::to_string(letter.r) +
                              " outside the reduced range 0.." + std::to_string(scenario.o - 2));
    }
  }
  for (const Letter& letter : raw) {
    if (!out.empty() && out.back().s == letter.s) {
      if (out.back().r == letter.r) continue;
      return Word::zero(scenario);
    }
    out.push_back(letter);
  }
  return Word(scenario, std::move(out), false);
}

inline Word simplify(const Scenario& scenario, std::initializer_list<Letter> raw) {
  return simplify(scenario, std::span<const Letter>(raw.begin(), raw.size()));
}

inline Word Word::parse(const Scenario& scenario, std::string_view text) {
  if (text == "0") return zero(scenario);
  if (text == "1" || text.empty()) return identity(scenario);
  std::vector<Letter> letters;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find(',', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view item = text.substr(pos, end - pos);
    std::size_t bar = item.find('|');
    if (bar == std::string_view::npos || bar == 0 || bar + 1 == item.size()) {
      throw std::invalid_argument("word '" + std::string(text) + "': malformed letter '" +
                                  std::string(item) + "'");
    }
    try {
      letters.push_back({std::stoi(std::string(item.substr(0, bar))),
                         std::stoi(std::string(item.substr(bar + 1)))});
    } catch (const std::logic_error&) {
      throw std::invalid_argument("word '" + std::string(text) + "': non-numeric letter");
    }
    pos = end + 1;
  }
  Word w = simplify(scenario, letters);
  if (w.is_zero() || w.size() != letters.size()) {
    throw std::invalid_argument("word '" + std::string(text) + "' is not canonical");
  }
  return w;
}

/// Symbolic form of Pi_{a}^dagger Pi_{b} as a word in measurement order.
/// Since Pi_a^dagger Pi_b = Pi_{a_1}..Pi_{a_n} Pi_{b_m}..Pi_{b_1}, the
/// measurement-order letters are b followed by reverse(a).
inline Word product(const Word& a, const Word& b) {
  if (!(a.scenario() == b.scenario())) {
    throw std::domain_error("product: words belong to different scenarios (" +
                            a.scenario().to_string() + " vs " + b.scenario().to_string() + ")");
  }
  if (a.is_zero() || b.is_zero()) return Word::zero(a.scenario());
  std::vector<Letter> raw(b.letters());
  raw.insert(raw.end(), a.letters().rbegin(), a.letters().rend());
  return simplify(a.scenario(), raw);
}

/// 1 + sum_{t=1..L} m (m-1)^{t-1} (o-1)^t.
inline std::size_t canonical_word_count(const Scenario& sc, int max_len) {
  std::size_t total = 1;
  std::size_t term = 1;
  for (int t = 1; t <= max_len; ++t) {
    term = (t == 1) ? static_cast<std::size_t>(sc.m) * (sc.o - 1)
                    : term * static_cast<std::size_t>(sc.m - 1) * (sc.o - 1);
    total += term;
  }
  return total;
}

/// Ordered moment-matrix index set at hierarchy level k: all canonical words
/// of length <= l + k - 1, identity first.
class WordIndex {
 public:
  WordIndex() = default;
  WordIndex(const Scenario& scenario, int level) : scenario_(scenario), level_(level) {
    if (level < 1) throw std::domain_error("word index: level k must be >= 1");
    max_len_ = scenario.l + level - 1;
    words_.push_back(Word::identity(scenario));
    std::size_t begin = 0;
    for (int t = 1; t <= max_len_; ++t) {
      const std::size_t end = words_.size();
      for (std::size_t i = begin; i < end; ++i) {
        const Word prefix = words_[i];
        for (int s = 0; s < scenario.m; ++s) {
          if (!prefix.letters().empty() && prefix.letters().back().s == s) continue;
          for (int r = 0; r <= scenario.o - 2; ++r) {
            std::vector<Letter> letters = prefix.letters();
            letters.push_back({r, s});
            words_.push_back(simplify(scenario, letters));
          }
        }
      }
      begin = end;
    }
    for (std::size_t i = 0; i < words_.size(); ++i) position_.emplace(words_[i], i);
  }

  const Scenario& scenario() const { return scenario_; }
  int level() const { return level_; }
  int max_len() const { return max_len_; }
  std::size_t size() const { return words_.size(); }
  const std::vector<Word>& words() const { return words_; }
  const Word& operator[](std::size_t i) const { return words_[i]; }

  std::optional<std::size_t> position(const Word& w) const {
    auto it = position_.find(w);
    if (it == position_.end()) return std::nullopt;
    return it->second;
  }

  /// Positions of the experimentally observable words (length 1..l).
  std::vector<std::size_t> behavior_positions() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < words_.size(); ++i) {
      const auto n = words_[i].size();
      if (n >= 1 && n <= static_cast<std::size_t>(scenario_.l)) out.push_back(i);
    }
    return out;
  }

 private:
  Scenario scenario_;
  int level_ = 1;
  int max_len_ = 0;
  std::vector<Word> words_;
  std::map<Word, std::size_t> position_;
};

inline WordIndex enumerate_words(const Scenario& scenario, int k) { return WordIndex(scenario, k); }

/// Experimental event over the full outcome set {0..o-1}, in measurement order.
struct Event {
  Scenario scenario;
  std::vector<Letter> letters;

  /// Accepts the compact "r1r2..|s1s2.." form (single-digit indices, e.g.
  /// "110|011") or the word form "r1|s1,r2|s2".
  static Event parse(const Scenario& scenario, std::string_view text) {
    Event e{scenario, {}};
    const auto bar = text.find('|');
    const bool compact = bar != std::string_view::npos && text.find(',') == std::string_view::npos &&
                         text.find('|', bar + 1) == std::string_view::npos && bar * 2 + 1 == text.size();
    if (compact && bar > 1) {
      for (std::size_t i = 0; i < bar; ++i) {
        const char rc = text[i], sc = text[bar + 1 + i];
        if (rc < '0' || rc > '9' || sc < '0' || sc > '9') {
          throw std::invalid_argument("event '" + std::string(text) + "': non-digit index");
        }
        e.letters.push_back({rc - '0', sc - '0'});
      }
    } else {
      std::size_t pos = 0;
      while (pos < text.size()) {
        std::size_t end = text.find(',', pos);
        if (end == std::string_view::npos) end = text.size();
        std::string item(text.substr(pos, end - pos));
        const auto b = item.find('|');
        if (b == std::string::npos) throw std::invalid_argument("event '" + std::string(text) + "' is malformed");
        try {
          e.letters.push_back({std::stoi(item.substr(0, b)), std::stoi(item.substr(b + 1))});
        } catch (const std::logic_error&) {
          throw std::invalid_argument("event '" + std::string(text) + "' is malformed");
        }
        pos = end + 1;
      }
    }
    for (const Letter& l : e.letters) {
      if (l.s < 0 || l.s >= scenario.m || l.r < 0 || l.r >= scenario.o) {
        throw std::domain_error("event '" + std::string(text) + "': index out of range for scenario " +
                                scenario.to_string());
      }
    }
    if (e.letters.empty() || e.letters.size() > static_cast<std::size_t>(scenario.l)) {
      throw std::domain_error("event '" + std::string(text) + "': length must be in 1..l");
    }
    return e;
  }

  std::string to_string() const {
    std::string out;
    for (std::size_t i = 0; i < letters.size(); ++i) {
      if (i) out.push_back(',');
      out += std::to_string(letters[i].r) + "|" + std::to_string(letters[i].s);
    }
    return out;
  }
};

/// Writes Pi_event as a signed sum of reduced-word operators, substituting
/// Pi_{o-1|s} = 1 - sum_{r<o-1} Pi_{r|s}.
inline std::vector<std::pair<Word, double>> expand_event(const Event& event) {
  const Scenario& sc = event.scenario;
  std::map<Word, double> acc;
  std::vector<Letter> chosen;
  auto recurse = [&](auto&& self, std::size_t i, double coeff) -> void {
    if (i == event.letters.size()) {
      Word w = simplify(sc, chosen);
      if (!w.is_zero()) acc[w] += coeff;
      return;
    }
    const Letter& l = event.letters[i];
    if (l.r < sc.o - 1) {
      chosen.push_back(l);
      self(self, i + 1, coeff);
      chosen.pop_back();
      return;
    }
    self(self, i + 1, coeff);
    for (int r = 0; r < sc.o - 1; ++r) {
      chosen.push_back({r, l.s});
      self(self, i + 1, -coeff);
      chosen.pop_back();
    }
  };
  recurse(recurse, 0, 1.0);
  std::vector<std::pair<Word, double>> out;
  for (auto& [w, c] : acc) {
    if (c != 0.0) out.emplace_back(w, c);
  }
  return out;
}

}  // namespace seqdim
