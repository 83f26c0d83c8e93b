#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "awe/common.hpp"
#include "awe/embedding_io.hpp"

namespace awe::test {

inline std::string data_path(const std::string& name) { return std::string(AWE_TEST_DATA_DIR) + "/" + name; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("test: cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void spit(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
}

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
public:
    TempDir() {
        static std::atomic<int> counter{0};
        const auto stamp = std::chrono::steady_clock::now().time_since_epoch().count();
        path_ = std::filesystem::temp_directory_path() /
                ("awe_test_" + std::to_string(stamp) + "_" + std::to_string(counter++));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    std::string str() const { return path_.string(); }
    std::string operator/(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

inline Vector random_vector(Rng& rng, std::size_t dim, double scale = 1.0) {
    Vector v(dim);
    for (double& x : v) x = rng.uniform(-scale, scale);
    return v;
}

inline EmbeddingTable table_from(const std::vector<std::pair<std::string, Vector>>& rows) {
    Vocabulary vocab;
    std::vector<double> values;
    for (const auto& [token, vec] : rows) {
        vocab.add(token);
        values.insert(values.end(), vec.begin(), vec.end());
    }
    const std::size_t dim = rows.empty() ? 1 : rows.front().second.size();
    return EmbeddingTable(std::move(vocab), dim, std::move(values));
}

}  // namespace awe::test
