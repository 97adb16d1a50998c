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

#pragma once

#include <nlohmann/json.hpp>

#include "cdi/bytes.h"

namespace cdi {

using Json = nlohmann::json;

// Deterministic byte serialization of a structured value: object keys sorted
// by Unicode code point, no insignificant whitespace, UTF-8, minimal integer
// rendering. Everything that gets signed or digested goes through here.
//
// Permitted value kinds: object, array, string, integer, boolean, null.
// Floating-point numbers are banned from metadata and raise Error.
Bytes canonicalize(const Json& value);

// Strict parse of canonical (or any) JSON text. Throws DecodeError on
// malformed input instead of nlohmann's own exception types.
Json parse_json(std::string_view text);

}  // namespace cdi
