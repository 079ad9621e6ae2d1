#include "ultratext/schema.h"

#include <cmath>
#include <fstream>

#include "ultratext/error.h"

namespace ultratext {
namespace {

bool has_type(const Json& v, const std::string& type) {
  if (type == "object") return v.is_object();
  if (type == "array") return v.is_array();
  if (type == "string") return v.is_string();
  if (type == "boolean") return v.is_boolean();
  if (type == "null") return v.is_null();
  if (type == "number") return v.is_number();
  if (type == "integer") {
    if (v.is_number_integer()) return true;
    if (v.is_number_float()) {
      const double d = v.get<double>();
      return std::isfinite(d) && d == std::floor(d);
    }
    return false;
  }
  return false;
}

void check(const Json& v, const Json& schema, const Json& root,
           const std::string& path, std::vector<std::string>& errors) {
  if (schema.is_boolean()) {
    if (!schema.get<bool>()) errors.push_back(path + ": not allowed");
    return;
  }
  if (auto it = schema.find("$ref"); it != schema.end()) {
    const std::string ref = it->get<std::string>();
    if (!ref.starts_with("#")) {
      throw DomainError("only local schema references are supported: " + ref);
    }
    const Json::json_pointer pointer(ref.substr(1));
    if (!root.contains(pointer)) {
      throw DomainError("unresolved schema reference: " + ref);
    }
    check(v, root.at(pointer), root, path, errors);
    return;
  }
  if (auto it = schema.find("anyOf"); it != schema.end()) {
    bool ok = false;
    for (const auto& option : *it) {
      std::vector<std::string> scratch;
      check(v, option, root, path, scratch);
      ok = ok || scratch.empty();
    }
    if (!ok) errors.push_back(path + ": matches no anyOf alternative");
  }
  if (auto it = schema.find("type"); it != schema.end()) {
    bool ok = false;
    if (it->is_string()) {
      ok = has_type(v, it->get<std::string>());
    } else {
      for (const auto& t : *it) ok = ok || has_type(v, t.get<std::string>());
    }
    if (!ok) {
      errors.push_back(path + ": expected type " + it->dump());
      return;
    }
  }
  if (auto it = schema.find("enum"); it != schema.end()) {
    bool found = false;
    for (const auto& option : *it) found = found || option == v;
    if (!found) errors.push_back(path + ": value not in enum");
  }
  if (v.is_number()) {
    const double d = v.get<double>();
    if (auto it = schema.find("minimum");
        it != schema.end() && d < it->get<double>()) {
      errors.push_back(path + ": below minimum");
    }
    if (auto it = schema.find("maximum");
        it != schema.end() && d > it->get<double>()) {
      errors.push_back(path + ": above maximum");
    }
  }
  if (v.is_array()) {
    if (auto it = schema.find("minItems");
        it != schema.end() && v.size() < it->get<std::size_t>()) {
      errors.push_back(path + ": too few items");
    }
    if (auto it = schema.find("maxItems");
        it != schema.end() && v.size() > it->get<std::size_t>()) {
      errors.push_back(path + ": too many items");
    }
    if (auto it = schema.find("items"); it != schema.end()) {
      for (std::size_t i = 0; i < v.size(); ++i) {
        check(v[i], *it, root, path + "/" + std::to_string(i), errors);
      }
    }
  }
  if (v.is_object()) {
    if (auto it = schema.find("required"); it != schema.end()) {
      for (const auto& key : *it) {
        if (!v.contains(key.get<std::string>())) {
          errors.push_back(path + ": missing " + key.get<std::string>());
        }
      }
    }
    const auto props = schema.find("properties");
    const auto extra = schema.find("additionalProperties");
    for (const auto& [key, value] : v.items()) {
      const std::string child = path + "/" + key;
      if (props != schema.end() && props->contains(key)) {
        check(value, (*props)[key], root, child, errors);
      } else if (extra != schema.end()) {
        check(value, *extra, root, child, errors);
      }
    }
  }
}

}  // namespace

std::vector<std::string> validate_schema(const Json& instance,
                                         const Json& schema) {
  std::vector<std::string> errors;
  check(instance, schema, schema, "", errors);
  return errors;
}

Json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read file: " + path.string());
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw DomainError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

}  // namespace ultratext
