#ifndef ARCCONF_VERSION_HPP
#define ARCCONF_VERSION_HPP

namespace arcconf {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace arcconf

#endif  // ARCCONF_VERSION_HPP
