#pragma once

// Helpers for the JSON document loaders (scene, lexicon, action table,
// machine, templates, traces). Private to the library.

#include <initializer_list>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "ensemble/error.h"
#include "ensemble/geometry.h"

namespace ensemble::json_util {

using nlohmann::json;

// Parses 'text', reporting syntax errors with their line number.
json Parse(std::string_view text, std::string_view what);

std::string ReadFile(const std::string& path);

[[noreturn]] void Fail(std::string_view what, const std::string& field,
                       const std::string& message);

void RequireObject(const json& j, std::string_view what,
                   const std::string& field);
void RejectUnknown(const json& j, std::initializer_list<std::string_view> keys,
                   std::string_view what, const std::string& field);

double Number(const json& j, std::string_view what, const std::string& field);
std::string String(const json& j, std::string_view what,
                   const std::string& field);
bool Boolean(const json& j, std::string_view what, const std::string& field);
Vec3 Vector(const json& j, std::string_view what, const std::string& field);

}  // namespace ensemble::json_util
