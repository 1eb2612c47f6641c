#include "sparselabel/core.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <stdexcept>

namespace sparselabel {

void validate_probabilities(std::span<const double> values) {
  if (values.empty()) throw std::invalid_argument("probability vector must have at least one label");
  for (size_t i = 0; i < values.size(); ++i) {
    const double p = values[i];
    if (std::isnan(p)) throw std::invalid_argument("probability at index " + std::to_string(i) + " is NaN");
    if (!std::isfinite(p) || p < 0.0 || p > 1.0) {
      throw std::invalid_argument("probability at index " + std::to_string(i) + " is outside [0,1]");
    }
  }
}

ProbVector::ProbVector(std::vector<double> values) : values_(std::move(values)) {
  validate_probabilities(values_);
}

LabelVector::LabelVector(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
  if (bits_.empty()) throw std::invalid_argument("label vector must have at least one label");
  for (size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] > 1) throw std::invalid_argument("label at index " + std::to_string(i) + " is not 0/1");
  }
}

LabelVector LabelVector::zeros(int size) {
  return LabelVector(std::vector<std::uint8_t>(static_cast<size_t>(size), 0));
}

LabelVector LabelVector::ones(int size) {
  return LabelVector(std::vector<std::uint8_t>(static_cast<size_t>(size), 1));
}

int LabelVector::sparsity() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

Ranking::Ranking(std::vector<std::int32_t> order) : order_(std::move(order)) {
  std::vector<bool> seen(order_.size(), false);
  for (std::int32_t idx : order_) {
    if (idx < 0 || static_cast<size_t>(idx) >= order_.size() || seen[static_cast<size_t>(idx)]) {
      throw std::invalid_argument("ranking is not a permutation of {0,...,L-1}");
    }
    seen[static_cast<size_t>(idx)] = true;
  }
}

void rank_descending_into(std::span<const double> v, std::span<std::int32_t> order) {
  const int n = static_cast<int>(v.size());
  // insertion sort, stable: equal values keep ascending index order
  for (int i = 0; i < n; ++i) {
    const double vi = v[static_cast<size_t>(i)];
    int j = i;
    while (j > 0 && v[static_cast<size_t>(order[static_cast<size_t>(j - 1)])] < vi) {
      order[static_cast<size_t>(j)] = order[static_cast<size_t>(j - 1)];
      --j;
    }
    order[static_cast<size_t>(j)] = i;
  }
}

Ranking rank_descending(const ProbVector& v) {
  std::vector<std::int32_t> order(static_cast<size_t>(v.size()));
  rank_descending_into(v.span(), order);
  return Ranking(std::move(order));
}

namespace {

std::vector<std::string_view> split_row(std::string_view row) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  while (true) {
    size_t pos = row.find(',', start);
    if (pos == std::string_view::npos) {
      fields.push_back(row.substr(start));
      break;
    }
    fields.push_back(row.substr(start, pos - start));
    start = pos + 1;
  }
  return fields;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_field_double(std::string_view field, size_t column) {
  field = trim(field);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument("malformed number in column " + std::to_string(column + 1));
  }
  return value;
}

}  // namespace

std::vector<double> parse_prob_row(std::string_view row) {
  const auto fields = split_row(row);
  std::vector<double> values;
  values.reserve(fields.size());
  for (size_t c = 0; c < fields.size(); ++c) values.push_back(parse_field_double(fields[c], c));
  validate_probabilities(values);
  return values;
}

std::vector<std::uint8_t> parse_label_row(std::string_view row) {
  const auto fields = split_row(row);
  std::vector<std::uint8_t> bits;
  bits.reserve(fields.size());
  for (size_t c = 0; c < fields.size(); ++c) {
    const auto f = trim(fields[c]);
    if (f == "0") {
      bits.push_back(0);
    } else if (f == "1") {
      bits.push_back(1);
    } else {
      throw std::invalid_argument("label in column " + std::to_string(c + 1) + " is not 0/1");
    }
  }
  if (bits.empty()) throw std::invalid_argument("empty label row");
  return bits;
}

std::string format_double(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

std::string format_prob_row(std::span<const double> values) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::string format_label_row(std::span<const std::uint8_t> bits) {
  std::string out;
  for (size_t i = 0; i < bits.size(); ++i) {
    if (i > 0) out += ',';
    out += (bits[i] ? '1' : '0');
  }
  return out;
}

}  // namespace sparselabel
