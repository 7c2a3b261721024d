#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace stencillab::taskrt {

/// Loop schedule of parallel_for.
struct Schedule {
  enum class Kind { Static, Dynamic };

  Kind kind = Kind::Static;
  std::size_t chunk = 1;  // dynamic only

  static Schedule static_split() { return {}; }
  static Schedule dynamic(std::size_t chunk) { return {Kind::Dynamic, chunk}; }

  std::string to_string() const;  // "static" or "dynamic:<chunk>"
  static std::optional<Schedule> parse(std::string_view text);

  friend bool operator==(const Schedule&, const Schedule&) = default;
};

struct IndexRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end > begin ? end - begin : 0; }
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

/// Near-equal contiguous split of [begin, end) into `parts` pieces; the
/// first (size % parts) pieces are one longer.
std::vector<IndexRange> static_chunks(IndexRange range, unsigned parts);

}  // namespace stencillab::taskrt
