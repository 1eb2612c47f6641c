#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sparselabel {

// Vector of per-label success probabilities. Entries are finite and lie in
// [0,1]; the length L is fixed at construction and must be >= 1.
class ProbVector {
 public:
  explicit ProbVector(std::vector<double> values);

  int size() const { return static_cast<int>(values_.size()); }
  double operator[](int i) const { return values_[static_cast<size_t>(i)]; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }

 private:
  std::vector<double> values_;
};

// Binary decision vector, one bit per label.
class LabelVector {
 public:
  explicit LabelVector(std::vector<std::uint8_t> bits);
  static LabelVector zeros(int size);
  static LabelVector ones(int size);

  int size() const { return static_cast<int>(bits_.size()); }
  std::uint8_t operator[](int i) const { return bits_[static_cast<size_t>(i)]; }
  const std::vector<std::uint8_t>& bits() const { return bits_; }

  // number of labels switched on
  int sparsity() const;

  bool operator==(const LabelVector& other) const { return bits_ == other.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// Permutation of {0,...,L-1}. order()[j] is the label with the j-th largest
// probability; ties are broken toward the smaller label index.
class Ranking {
 public:
  explicit Ranking(std::vector<std::int32_t> order);

  int size() const { return static_cast<int>(order_.size()); }
  std::int32_t operator[](int j) const { return order_[static_cast<size_t>(j)]; }
  const std::vector<std::int32_t>& order() const { return order_; }

 private:
  std::vector<std::int32_t> order_;
};

// Throws std::invalid_argument when any entry is NaN, infinite, or outside
// [0,1]; the message names the offending index.
void validate_probabilities(std::span<const double> values);

Ranking rank_descending(const ProbVector& v);

// Unchecked in-place variant for hot loops. `order` must have v.size() slots.
void rank_descending_into(std::span<const double> v, std::span<std::int32_t> order);

// --- CSV row handling -------------------------------------------------------
//
// A ProbVector row is L comma-separated decimal numbers; a LabelVector row is
// L comma-separated 0/1 entries. Parsers throw std::invalid_argument with the
// column index on malformed input.

std::vector<double> parse_prob_row(std::string_view row);
std::vector<std::uint8_t> parse_label_row(std::string_view row);

// %.12g formatting, the output precision used across the tools
std::string format_double(double value);
std::string format_prob_row(std::span<const double> values);
std::string format_label_row(std::span<const std::uint8_t> bits);

}  // namespace sparselabel
