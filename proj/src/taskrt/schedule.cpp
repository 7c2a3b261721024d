#include "stencillab/taskrt/schedule.hpp"

#include <charconv>

namespace stencillab::taskrt {

std::string Schedule::to_string() const {
  if (kind == Kind::Static) return "static";
  return "dynamic:" + std::to_string(chunk);
}

std::optional<Schedule> Schedule::parse(std::string_view text) {
  if (text == "static") return static_split();
  constexpr std::string_view prefix = "dynamic:";
  if (text == "dynamic") return dynamic(1);
  if (!text.starts_with(prefix)) return std::nullopt;
  text.remove_prefix(prefix.size());
  std::size_t chunk = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), chunk);
  if (ec != std::errc() || ptr != text.data() + text.size() || chunk == 0) return std::nullopt;
  return dynamic(chunk);
}

std::vector<IndexRange> static_chunks(IndexRange range, unsigned parts) {
  std::vector<IndexRange> out;
  if (parts == 0) return out;
  const std::size_t len = range.size();
  const std::size_t base = len / parts;
  const std::size_t extra = len % parts;
  std::size_t at = range.begin;
  for (unsigned i = 0; i < parts; ++i) {
    const std::size_t piece = base + (i < extra ? 1 : 0);
    out.push_back({at, at + piece});
    at += piece;
  }
  return out;
}

}  // namespace stencillab::taskrt
