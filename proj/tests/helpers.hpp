#pragma once

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "geostat/corpus.hpp"

namespace testutil {

/// Picture with already-preprocessed tags, bypassing file ingestion.
inline geostat::Picture pic(std::string id, std::vector<std::string> tags,
                            std::optional<geostat::GeoTag> geo = std::nullopt,
                            std::optional<std::int64_t> ts = std::nullopt) {
    geostat::Picture p;
    p.id = std::move(id);
    p.tags = std::move(tags);
    p.geo = geo;
    p.ts = ts;
    return p;
}

inline geostat::Corpus corpus_of(std::vector<geostat::Picture> pics) {
    geostat::Corpus c;
    for (auto& p : pics) c.add(std::move(p));
    return c;
}

/// Scratch file that cleans up after itself.
class TempFile {
  public:
    explicit TempFile(const std::string& contents, const std::string& suffix = ".tmp") {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("geostat_test_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++) + suffix))
                    .string();
        std::ofstream out(path_);
        out << contents;
    }
    ~TempFile() { std::remove(path_.c_str()); }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

class TempDir {
  public:
    TempDir() {
        static int counter = 0;
        path_ = (std::filesystem::temp_directory_path() /
                 ("geostat_dir_" + std::to_string(::getpid()) + "_" +
                  std::to_string(counter++)))
                    .string();
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::string& path() const { return path_; }

  private:
    std::string path_;
};

}  // namespace testutil
