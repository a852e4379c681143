// Copyright 2026 The Apollo Optimizer Authors
// SPDX-License-Identifier: Apache-2.0

#include "apollo/checkpoint.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>

#include "apollo/error.hpp"

namespace apollo {

std::string format_real(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  return std::string(buf, res.ptr);
}

double parse_real(const std::string& text) {
  double value = 0.0;
  const char* first = text.data();
  const char* last = first + text.size();
  const auto res = std::from_chars(first, last, value);
  if (res.ec != std::errc() || res.ptr != last)
    throw FormatError("not a real number: '" + text + "'");
  return value;
}

void CheckpointWriter::line(const std::string& key, const std::string& value) {
  os_ << key;
  if (!value.empty()) os_ << ' ' << value;
  os_ << '\n';
}

void CheckpointWriter::real(const std::string& key, double value) {
  line(key, format_real(value));
}

void CheckpointWriter::integer(const std::string& key, std::uint64_t value) {
  line(key, std::to_string(value));
}

void CheckpointWriter::tensor(const std::string& key, const Tensor& t) {
  os_ << key << ' ' << t.size();
  for (double v : t.data()) os_ << ' ' << format_real(v);
  os_ << '\n';
}

std::string CheckpointReader::line(const std::string& key) {
  std::string text;
  if (!std::getline(is_, text))
    throw FormatError("checkpoint truncated: expected '" + key + "'");
  ++line_no_;
  const auto space = text.find(' ');
  const std::string head = text.substr(0, space);
  if (head != key)
    throw FormatError("checkpoint line " + std::to_string(line_no_) + ": expected '" + key +
                      "', found '" + head + "'");
  return space == std::string::npos ? std::string() : text.substr(space + 1);
}

double CheckpointReader::real(const std::string& key) { return parse_real(line(key)); }

std::uint64_t CheckpointReader::integer(const std::string& key) {
  const std::string text = line(key);
  std::uint64_t value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw FormatError("checkpoint line " + std::to_string(line_no_) + ": bad integer '" +
                      text + "'");
  return value;
}

void CheckpointReader::tensor(const std::string& key, Tensor& t) {
  std::istringstream fields(line(key));
  std::size_t count = 0;
  if (!(fields >> count) || count != t.size())
    throw FormatError("checkpoint line " + std::to_string(line_no_) + ": '" + key +
                      "' expected " + std::to_string(t.size()) + " values");
  std::string token;
  for (std::size_t i = 0; i < count; ++i) {
    if (!(fields >> token))
      throw FormatError("checkpoint line " + std::to_string(line_no_) + ": '" + key +
                        "' is short");
    t[i] = parse_real(token);
  }
  if (fields >> token)
    throw FormatError("checkpoint line " + std::to_string(line_no_) + ": trailing data");
}

}  // namespace apollo
