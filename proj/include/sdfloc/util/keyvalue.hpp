// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <set>
#include <string>

namespace sdfloc {

/// Parsed view of a `key = value` config file ('#' comments, blank lines
/// allowed). Typed getters record which keys were consumed so callers can
/// reject leftovers.
class KeyValueMap {
 public:
  explicit KeyValueMap(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  bool get(const std::string& key, double& out) const;
  bool get(const std::string& key, int& out) const;
  bool get(const std::string& key, std::string& out) const;
  bool get(const std::string& key, bool& out) const;
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  /// Throws ConfigError naming the first key no getter consumed.
  void reject_unconsumed() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::set<std::string> consumed_;
};

/// Throws ConfigError on lines that are not `key = value`.
KeyValueMap parse_key_values(const std::string& text);

}  // namespace sdfloc
