#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>

namespace cscope {

// Opaque integer identifier, assigned in insertion order. The tag keeps
// concept and document ids from being mixed up.
template <typename Tag>
struct Id {
  std::uint64_t value = 0;

  constexpr Id() = default;
  constexpr explicit Id(std::uint64_t v) : value(v) {}

  auto operator<=>(const Id&) const = default;

  std::string str() const { return std::to_string(value); }
};

using ConceptId = Id<struct ConceptTag>;
using DocId = Id<struct DocTag>;

}  // namespace cscope

template <typename Tag>
struct std::hash<cscope::Id<Tag>> {
  std::size_t operator()(const cscope::Id<Tag>& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
