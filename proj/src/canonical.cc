// Copyright 2026 The CDI Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "cdi/canonical.h"

#include "cdi/error.h"

namespace cdi {

namespace {

// The default nlohmann object type is a std::map keyed by std::string, so
// iteration (and dump()) already emits keys in byte order, which for UTF-8
// equals Unicode code-point order. What remains is rejecting value kinds
// that have no canonical rendering.
void check_canonicalizable(const Json& value) {
  switch (value.type()) {
    case Json::value_t::object:
      for (const auto& [key, element] : value.items()) {
        (void)key;
        check_canonicalizable(element);
      }
      return;
    case Json::value_t::array:
      for (const auto& element : value) {
        check_canonicalizable(element);
      }
      return;
    case Json::value_t::string:
    case Json::value_t::boolean:
    case Json::value_t::number_integer:
    case Json::value_t::number_unsigned:
    case Json::value_t::null:
      return;
    case Json::value_t::number_float:
      throw Error("floating-point values are not canonicalizable");
    case Json::value_t::binary:
      throw Error("binary values are not canonicalizable");
    case Json::value_t::discarded:
      throw Error("discarded value is not canonicalizable");
  }
  throw Error("unsupported value kind");
}

}  // namespace

Bytes canonicalize(const Json& value) {
  check_canonicalizable(value);
  // Compact separators, raw UTF-8 output, throw on invalid UTF-8 strings.
  std::string text = value.dump(-1, ' ', false, Json::error_handler_t::strict);
  return to_bytes(text);
}

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text);
  } catch (const Json::exception& e) {
    throw DecodeError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace cdi
