#pragma once

#include <json.hpp>
#include <set>
#include <string>
#include <vector>

#include "hyplap/errors.hpp"

namespace hyplap::detail {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

/// SAX pass that records duplicated object keys (standard parsers silently
/// collapse them, but duplicate names are errors here).
class DuplicateKeyScan : public nlohmann::json_sax<json> {
 public:
  std::vector<std::string> duplicates;

  bool null() override { return true; }
  bool boolean(bool) override { return true; }
  bool number_integer(number_integer_t) override { return true; }
  bool number_unsigned(number_unsigned_t) override { return true; }
  bool number_float(number_float_t, const string_t&) override { return true; }
  bool string(string_t&) override { return true; }
  bool binary(binary_t&) override { return true; }
  bool start_object(std::size_t) override {
    scopes_.emplace_back();
    return true;
  }
  bool key(string_t& k) override {
    if (!scopes_.empty() && !scopes_.back().insert(k).second) duplicates.push_back(k);
    return true;
  }
  bool end_object() override {
    scopes_.pop_back();
    return true;
  }
  bool start_array(std::size_t) override { return true; }
  bool end_array() override { return true; }
  bool parse_error(std::size_t, const std::string&, const nlohmann::detail::exception&) override {
    return false;
  }

 private:
  std::vector<std::set<std::string>> scopes_;
};

inline json parse_json_strict(std::string_view text, const char* what) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded()) throw InputError(std::string("malformed JSON in ") + what);
  DuplicateKeyScan scan;
  json::sax_parse(text, &scan);
  if (!scan.duplicates.empty())
    throw InputError(std::string(what) + ": duplicate key '" + scan.duplicates.front() + "'");
  return doc;
}

}  // namespace hyplap::detail
