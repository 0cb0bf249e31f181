#include "homeodyn/integrator.hpp"

namespace homeodyn {

Method parse_method(std::string_view name) {
  if (name == "rk4") return Method::rk4;
  if (name == "forward-euler" || name == "euler" || name == "forward_euler")
    return Method::forward_euler;
  throw ConfigError("unknown method '" + std::string(name) +
                    "' (expected rk4 or forward-euler)");
}

std::string_view to_string(Method m) {
  return m == Method::rk4 ? "rk4" : "forward-euler";
}

}  // namespace homeodyn
