#pragma once

#include "safetydash/records.hpp"

#include <istream>
#include <map>
#include <string>
#include <string_view>

namespace safetydash {

// UCR code -> category. Codes missing from the table map to `other`.
class UcrTable {
 public:
  UcrTable() = default;

  /// Part I / Part II summary groupings; violent = murder, rape, robbery,
  /// aggravated assault.
  static UcrTable defaults();

  /// One "code = category" pair per line; '#' starts a comment; values may be
  /// quoted. Throws FormatError with the line number on malformed lines.
  static UcrTable parse(std::istream& in);
  static UcrTable load(const std::string& path);

  CrimeCategory categorize(std::string_view code) const;
  bool contains(std::string_view code) const { return table_.find(std::string(code)) != table_.end(); }
  void set(std::string code, CrimeCategory c) { table_[std::move(code)] = c; }

  const std::map<std::string, CrimeCategory>& entries() const { return table_; }
  std::string to_text() const;

 private:
  std::map<std::string, CrimeCategory> table_;
};

}  // namespace safetydash
