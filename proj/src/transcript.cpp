#include "stinger/transcript.hpp"

#include <filesystem>

#include "stinger/util.hpp"

namespace stinger {

void TranscriptWriter::write(const nlohmann::json& entry) {
  const auto dir = std::filesystem::path(path_).parent_path();
  if (!dir.empty()) std::filesystem::create_directories(dir);
  append_line(path_, entry.dump());
  ++entries_;
}

}  // namespace stinger
