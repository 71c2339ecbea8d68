// Copyright (c) 2026 The sdfloc Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sdfloc/util/keyvalue.hpp"

#include <cstdlib>
#include <sstream>

#include "sdfloc/errors.hpp"

namespace sdfloc {
namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) {
    return {};
  }
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

}  // namespace

bool KeyValueMap::get(const std::string& key, double& out) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    return false;
  }
  consumed_.insert(key);
  char* end = nullptr;
  const double v = std::strtod(it->second.c_str(), &end);
  if (end == it->second.c_str() || *end != '\0') {
    throw ConfigError("config: key '" + key + "' is not a number: " + it->second);
  }
  out = v;
  return true;
}

bool KeyValueMap::get(const std::string& key, int& out) const {
  double v;
  if (!get(key, v)) {
    return false;
  }
  const int i = static_cast<int>(v);
  if (static_cast<double>(i) != v) {
    throw ConfigError("config: key '" + key + "' is not an integer");
  }
  out = i;
  return true;
}

bool KeyValueMap::get(const std::string& key, std::string& out) const {
  const auto it = values_.find(key);
  if (it == values_.end()) {
    return false;
  }
  consumed_.insert(key);
  out = it->second;
  return true;
}

bool KeyValueMap::get(const std::string& key, bool& out) const {
  std::string v;
  if (!get(key, v)) {
    return false;
  }
  if (v == "true" || v == "1") {
    out = true;
  } else if (v == "false" || v == "0") {
    out = false;
  } else {
    throw ConfigError("config: key '" + key + "' is not a boolean: " + v);
  }
  return true;
}

void KeyValueMap::reject_unconsumed() const {
  for (const auto& [key, value] : values_) {
    if (consumed_.count(key) == 0) {
      throw ConfigError("config: unknown key '" + key + "'");
    }
  }
}

KeyValueMap parse_key_values(const std::string& text) {
  std::map<std::string, std::string> values;
  std::istringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) {
      line = line.substr(0, hash);
    }
    if (trim(line).empty()) {
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    values[key] = value;
  }
  return KeyValueMap(std::move(values));
}

}  // namespace sdfloc
