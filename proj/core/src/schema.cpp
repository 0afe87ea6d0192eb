// Validation against the JSON Schema draft-07 keywords used by the shipped
// schemas: type, enum, const, minimum/maximum (and exclusive forms),
// minLength, pattern, items, minItems, maxItems, required, properties,
// additionalProperties, allOf/anyOf/oneOf and $ref (local pointers and
// other embedded schemas by file name).

#include <cmath>
#include <regex>

#include "geotrend/io.hpp"

namespace geotrend::io {

namespace detail {
struct EmbeddedSchema {
  const char* name;
  const char* text;
};
extern const EmbeddedSchema kEmbeddedSchemas[];
extern const std::size_t kEmbeddedSchemaCount;
}  // namespace detail

namespace {

const std::vector<std::pair<std::string, Json>>& registry() {
  static const auto schemas = [] {
    std::vector<std::pair<std::string, Json>> out;
    for (std::size_t i = 0; i < detail::kEmbeddedSchemaCount; ++i) {
      out.emplace_back(detail::kEmbeddedSchemas[i].name,
                       Json::parse(detail::kEmbeddedSchemas[i].text));
    }
    return out;
  }();
  return schemas;
}

bool has_type(const Json& v, const std::string& t) {
  if (t == "object") return v.is_object();
  if (t == "array") return v.is_array();
  if (t == "string") return v.is_string();
  if (t == "boolean") return v.is_boolean();
  if (t == "null") return v.is_null();
  if (t == "number") return v.is_number();
  if (t == "integer") {
    if (v.is_number_integer()) return true;
    if (!v.is_number_float()) return false;
    const double d = v.get<double>();
    return std::isfinite(d) && d == std::floor(d);
  }
  return false;
}

class Validator {
 public:
  explicit Validator(std::vector<std::string>& errors) : errors_(errors) {}

  void check(const Json& v, const Json& s, const Json& root, const std::string& at) {
    if (s.is_boolean()) {
      if (!s.get<bool>()) fail(at, "no value allowed");
      return;
    }
    if (s.contains("$ref")) {
      const auto [target, target_root] = resolve(s["$ref"].get<std::string>(), root);
      if (target) check(v, *target, *target_root, at);
      return;
    }
    if (s.contains("type")) {
      const Json& t = s["type"];
      bool ok = false;
      if (t.is_string()) ok = has_type(v, t.get<std::string>());
      else for (const auto& alt : t) ok = ok || has_type(v, alt.get<std::string>());
      if (!ok) {
        fail(at, "expected type " + t.dump() + ", found " + std::string(v.type_name()));
        return;
      }
    }
    if (s.contains("enum")) {
      bool found = false;
      for (const auto& e : s["enum"]) found = found || e == v;
      if (!found) fail(at, "value " + v.dump() + " not in " + s["enum"].dump());
    }
    if (s.contains("const") && s["const"] != v) {
      fail(at, "expected " + s["const"].dump());
    }
    if (v.is_number()) check_number(v.get<double>(), s, at);
    if (v.is_string()) {
      const std::string str = v.get<std::string>();
      if (s.contains("minLength") && str.size() < s["minLength"].get<std::size_t>()) {
        fail(at, "string shorter than " + s["minLength"].dump());
      }
      if (s.contains("pattern") &&
          !std::regex_search(str, std::regex(s["pattern"].get<std::string>()))) {
        fail(at, "string does not match " + s["pattern"].dump());
      }
    }
    if (v.is_array()) {
      if (s.contains("minItems") && v.size() < s["minItems"].get<std::size_t>()) {
        fail(at, "fewer than " + s["minItems"].dump() + " items");
      }
      if (s.contains("maxItems") && v.size() > s["maxItems"].get<std::size_t>()) {
        fail(at, "more than " + s["maxItems"].dump() + " items");
      }
      if (s.contains("items")) {
        for (std::size_t i = 0; i < v.size(); ++i) {
          check(v[i], s["items"], root, at + "/" + std::to_string(i));
        }
      }
    }
    if (v.is_object()) check_object(v, s, root, at);
    if (s.contains("allOf")) {
      for (const auto& sub : s["allOf"]) check(v, sub, root, at);
    }
    if (s.contains("anyOf") || s.contains("oneOf")) {
      const bool one = s.contains("oneOf");
      int matches = 0;
      for (const auto& sub : s[one ? "oneOf" : "anyOf"]) {
        std::vector<std::string> scratch;
        Validator(scratch).check(v, sub, root, at);
        matches += scratch.empty() ? 1 : 0;
      }
      if (one ? matches != 1 : matches == 0) {
        fail(at, std::string("value matches ") + std::to_string(matches) + " of the " +
                     (one ? "oneOf" : "anyOf") + " alternatives");
      }
    }
  }

 private:
  void fail(const std::string& at, const std::string& what) {
    errors_.push_back((at.empty() ? std::string("/") : at) + ": " + what);
  }

  void check_number(double d, const Json& s, const std::string& at) {
    if (s.contains("minimum") && d < s["minimum"].get<double>()) {
      fail(at, "below minimum " + s["minimum"].dump());
    }
    if (s.contains("maximum") && d > s["maximum"].get<double>()) {
      fail(at, "above maximum " + s["maximum"].dump());
    }
    if (s.contains("exclusiveMinimum") && d <= s["exclusiveMinimum"].get<double>()) {
      fail(at, "not above " + s["exclusiveMinimum"].dump());
    }
    if (s.contains("exclusiveMaximum") && d >= s["exclusiveMaximum"].get<double>()) {
      fail(at, "not below " + s["exclusiveMaximum"].dump());
    }
  }

  void check_object(const Json& v, const Json& s, const Json& root, const std::string& at) {
    if (s.contains("required")) {
      for (const auto& key : s["required"]) {
        if (!v.contains(key.get<std::string>())) {
          fail(at, "missing required property " + key.dump());
        }
      }
    }
    const Json* props = s.contains("properties") ? &s["properties"] : nullptr;
    for (auto it = v.begin(); it != v.end(); ++it) {
      const std::string child = at + "/" + it.key();
      if (props && props->contains(it.key())) {
        check(it.value(), (*props)[it.key()], root, child);
      } else if (s.contains("additionalProperties")) {
        check(it.value(), s["additionalProperties"], root, child);
      }
    }
  }

  std::pair<const Json*, const Json*> resolve(const std::string& ref, const Json& root) {
    const auto hash = ref.find('#');
    const std::string file = ref.substr(0, hash);
    const std::string pointer = hash == std::string::npos ? "" : ref.substr(hash + 1);
    const Json* base = &root;
    if (!file.empty()) base = &schema(file);
    if (pointer.empty()) return {base, base};
    const Json::json_pointer ptr(pointer);
    if (!base->contains(ptr)) {
      fail("", "unresolvable $ref " + ref);
      return {nullptr, nullptr};
    }
    return {&base->at(ptr), base};
  }

  std::vector<std::string>& errors_;
};

}  // namespace

const Json& schema(std::string_view name) {
  for (const auto& [n, s] : registry()) {
    if (n == name) return s;
  }
  throw Error(ErrorKind::Schema, "unknown schema '" + std::string(name) + "'");
}

std::vector<std::string> schema_names() {
  std::vector<std::string> out;
  for (const auto& entry : registry()) out.push_back(entry.first);
  return out;
}

std::vector<std::string> validate(const Json& doc, const Json& sch) {
  std::vector<std::string> errors;
  Validator(errors).check(doc, sch, sch, "");
  return errors;
}

void require_valid(const Json& doc, std::string_view name) {
  const auto errors = validate(doc, schema(name));
  if (errors.empty()) return;
  std::string msg = "document violates " + std::string(name) + ":";
  for (std::size_t i = 0; i < errors.size() && i < 10; ++i) msg += "\n  " + errors[i];
  if (errors.size() > 10) msg += "\n  ...";
  throw Error(ErrorKind::Schema, msg);
}

}  // namespace geotrend::io
