#include "sbpg/json_util.hpp"

#include <stdexcept>

#include "sbpg/error.hpp"

namespace sbpg {
namespace {

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

const nlohmann::json& member(const nlohmann::json& obj, const std::string& key,
                             const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) {
    throw ConfigError(where + ": missing key '" + key + "'");
  }
  return obj.at(key);
}

}  // namespace

void merge_strict(nlohmann::json& base, const nlohmann::json& patch, const std::string& path) {
  if (!patch.is_object()) {
    throw ConfigError((path.empty() ? std::string("config") : path) + ": expected an object");
  }
  if (!base.is_object()) throw ConfigError(path + ": cannot merge an object into a scalar");
  for (const auto& [key, value] : patch.items()) {
    const std::string where = join(path, key);
    if (!base.contains(key)) throw ConfigError("unknown config key '" + where + "'");
    nlohmann::json& target = base[key];
    if (value.is_object() && target.is_object()) {
      merge_strict(target, value, where);
    } else if (target.is_object() && !value.is_object()) {
      throw ConfigError("config key '" + where + "' expects an object");
    } else {
      target = value;
    }
  }
}

void apply_assignment(nlohmann::json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ConfigError("override '" + assignment + "' is not of the form key=value");
  }
  const std::string path = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  nlohmann::json value = nlohmann::json::parse(text, nullptr, false);
  if (value.is_discarded()) value = text;

  nlohmann::json* node = &doc;
  std::size_t start = 0;
  while (true) {
    const auto dot = path.find('.', start);
    const std::string key = path.substr(start, dot == std::string::npos ? std::string::npos
                                                                         : dot - start);
    if (key.empty()) throw ConfigError("override '" + assignment + "' has an empty key");
    if (node->is_array()) {
      std::size_t index = 0;
      try {
        std::size_t used = 0;
        index = std::stoul(key, &used);
        if (used != key.size()) throw std::invalid_argument(key);
      } catch (const std::exception&) {
        throw ConfigError("override '" + path + "': '" + key + "' is not an array index");
      }
      if (index >= node->size()) throw ConfigError("override '" + path + "': index out of range");
      node = &(*node)[index];
    } else if (node->is_object() && node->contains(key)) {
      node = &(*node)[key];
    } else {
      throw ConfigError("unknown config key '" + path + "'");
    }
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  if (node->is_object()) {
    merge_strict(*node, value, path);
  } else {
    *node = std::move(value);
  }
}

void apply_assignments(nlohmann::json& doc, const std::vector<std::string>& assignments) {
  for (const auto& a : assignments) apply_assignment(doc, a);
}

void require_keys(const nlohmann::json& obj, const std::vector<std::string>& allowed,
                  const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, value] : obj.items()) {
    bool known = false;
    for (const auto& a : allowed) known = known || a == key;
    if (!known) throw ConfigError("unknown config key '" + join(where, key) + "'");
  }
}

double get_number(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  const auto& v = member(obj, key, where);
  if (!v.is_number()) throw ConfigError(join(where, key) + ": expected a number");
  return v.get<double>();
}

int get_int(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  const auto& v = member(obj, key, where);
  if (!v.is_number_integer()) throw ConfigError(join(where, key) + ": expected an integer");
  return v.get<int>();
}

bool get_bool(const nlohmann::json& obj, const std::string& key, const std::string& where) {
  const auto& v = member(obj, key, where);
  if (!v.is_boolean()) throw ConfigError(join(where, key) + ": expected a boolean");
  return v.get<bool>();
}

std::string get_string(const nlohmann::json& obj, const std::string& key,
                       const std::string& where) {
  const auto& v = member(obj, key, where);
  if (!v.is_string()) throw ConfigError(join(where, key) + ": expected a string");
  return v.get<std::string>();
}

}  // namespace sbpg
