// Copyright 2026 The segkit Authors. All Rights Reserved.
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

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace segkit::csv {

struct Row {
  std::size_t line = 0;  // 1-based, header is line 1
  std::vector<std::string> fields;
};

/// Splits one CSV record. Double-quoted fields may contain commas and "" escapes.
/// Throws ParseError tagged with `line` on an unterminated quote.
std::vector<std::string> SplitRecord(std::string_view record, std::size_t line);

/// Reads a whole CSV document, checks the header against `expected_header`
/// and returns the data rows. Blank lines are skipped; a trailing '\r' is
/// tolerated.
std::vector<Row> ReadTable(std::string_view text,
                           const std::vector<std::string>& expected_header);

/// Quotes a field if it needs quoting.
std::string Escape(std::string_view field);

}  // namespace segkit::csv
