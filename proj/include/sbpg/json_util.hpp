#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace sbpg {

/// Recursively merges `patch` into `base`. Every object key in `patch` must
/// already exist in `base`; arrays and scalars are replaced wholesale.
/// Throws ConfigError naming the dotted path of the first unknown key.
void merge_strict(nlohmann::json& base, const nlohmann::json& patch, const std::string& path = "");

/// Applies one `section.key=value` assignment. The value is parsed as JSON
/// when possible and taken as a string otherwise. Throws ConfigError if the
/// path does not exist in `doc`.
void apply_assignment(nlohmann::json& doc, const std::string& assignment);
void apply_assignments(nlohmann::json& doc, const std::vector<std::string>& assignments);

/// Throws ConfigError if `obj` is not an object or holds keys outside `allowed`.
void require_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                  const std::string& where);

/// Typed member access with ConfigError on a missing key or wrong type.
double get_number(const nlohmann::json& obj, const std::string& key, const std::string& where);
int get_int(const nlohmann::json& obj, const std::string& key, const std::string& where);
bool get_bool(const nlohmann::json& obj, const std::string& key, const std::string& where);
std::string get_string(const nlohmann::json& obj, const std::string& key,
                       const std::string& where);

}  // namespace sbpg
