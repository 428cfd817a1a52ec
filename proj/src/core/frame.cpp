#include "egonav/core/frame.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>

namespace egonav {

// debugging aid, not part of the pipeline
void save_pgm(const Frame& f, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  check(out.good(), "cannot write ", path.string());
  out << "P5\n" << f.width << " " << f.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(f.pixels.data()),
            static_cast<std::streamsize>(f.pixels.size()));
}

}  // namespace egonav
