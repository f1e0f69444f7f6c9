// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace fpcsim {

/// Flat key-value configuration. Keys are dotted paths ("pc.alpha"), values
/// are scalars or comma lists. The canonical text form (sorted keys, "k=v"
/// lines, normalized whitespace) is what gets hashed into every output row.
class KeyValueConfig {
 public:
  KeyValueConfig() = default;

  /// Parse from config-file text. Lines are "key = value"; '#' starts a
  /// comment; blank lines are ignored.
  static KeyValueConfig parse(const std::string& text);
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  bool has(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& key,
                                      const std::vector<double>& fallback) const;

  /// Sorted "key=value" lines, one per key, lowercase keys, values with
  /// collapsed whitespace. This is the hashing pre-image.
  std::string canonical_text() const;

  /// FNV-1a 64 over canonical_text(), as 16 hex digits.
  std::string hash() const;

  const std::map<std::string, std::string>& entries() const { return entries_; }

  /// Throws ConfigError if any key is not in the accepted set.
  void check_known_keys(const std::vector<std::string>& known) const;

 private:
  std::map<std::string, std::string> entries_;
};

std::uint64_t fnv1a64(const std::string& text);

}  // namespace fpcsim
