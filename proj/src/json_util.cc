#include "json_util.h"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ensemble::json_util {

json Parse(std::string_view text, std::string_view what) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    std::size_t offset = std::min<std::size_t>(e.byte, text.size());
    auto line = 1 + std::count(text.begin(), text.begin() + offset, '\n');
    throw Error(ErrorKind::kSchema, std::string(what) + ": line " +
                                        std::to_string(line) +
                                        ": malformed JSON");
  }
}

std::string ReadFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kSchema, "cannot open " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void Fail(std::string_view what, const std::string& field,
          const std::string& message) {
  throw Error(ErrorKind::kSchema, std::string(what) + ": field '" + field +
                                      "': " + message);
}

void RequireObject(const json& j, std::string_view what,
                   const std::string& field) {
  if (!j.is_object()) Fail(what, field, "expected an object");
}

void RejectUnknown(const json& j, std::initializer_list<std::string_view> keys,
                   std::string_view what, const std::string& field) {
  for (const auto& [key, value] : j.items()) {
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) {
      Fail(what, field.empty() ? key : field + "." + key, "unknown field");
    }
  }
}

double Number(const json& j, std::string_view what, const std::string& field) {
  if (!j.is_number()) Fail(what, field, "expected a number");
  return j.get<double>();
}

std::string String(const json& j, std::string_view what,
                   const std::string& field) {
  if (!j.is_string()) Fail(what, field, "expected a string");
  return j.get<std::string>();
}

bool Boolean(const json& j, std::string_view what, const std::string& field) {
  if (!j.is_boolean()) Fail(what, field, "expected true or false");
  return j.get<bool>();
}

Vec3 Vector(const json& j, std::string_view what, const std::string& field) {
  if (!j.is_array() || j.size() != 3) {
    Fail(what, field, "expected [x, y, z]");
  }
  return {Number(j[0], what, field + "[0]"), Number(j[1], what, field + "[1]"),
          Number(j[2], what, field + "[2]")};
}

}  // namespace ensemble::json_util
