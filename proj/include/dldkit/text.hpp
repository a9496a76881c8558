/* Copyright 2026 The dldkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef DLDKIT_TEXT_HPP_
#define DLDKIT_TEXT_HPP_

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dldkit::text {

// Splits on ASCII whitespace; empty tokens are dropped.
std::vector<std::string_view> SplitWhitespace(std::string_view line);

// Splits on a single delimiter character, keeping empty fields.
std::vector<std::string_view> Split(std::string_view line, char delim);

std::string_view Trim(std::string_view s);

// Strict parses: the whole token must be consumed.
std::optional<double> ParseReal(std::string_view token);
std::optional<long long> ParseInt(std::string_view token);

// Shortest decimal representation that round-trips to the same double.
std::string FormatReal(double value);

std::string ReadFile(const std::filesystem::path& path);
void WriteFile(const std::filesystem::path& path, std::string_view content);

}  // namespace dldkit::text

#endif  // DLDKIT_TEXT_HPP_
