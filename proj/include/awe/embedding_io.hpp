#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "awe/common.hpp"

namespace awe {

/// Bidirectional token <-> id map. Ids are contiguous and follow insertion order.
class Vocabulary {
public:
    Vocabulary() = default;
    explicit Vocabulary(const std::vector<std::string>& tokens);

    /// Adds the token if absent; returns its id either way.
    std::size_t add(std::string_view token);

    std::optional<std::size_t> lookup(std::string_view token) const;
    bool contains(std::string_view token) const { return lookup(token).has_value(); }
    const std::string& token_of(std::size_t id) const { return tokens_.at(id); }
    const std::vector<std::string>& tokens() const noexcept { return tokens_; }
    std::size_t size() const noexcept { return tokens_.size(); }
    bool empty() const noexcept { return tokens_.empty(); }

private:
    std::vector<std::string> tokens_;
    std::unordered_map<std::string, std::size_t> index_;
};

/// Dense row-major word-vector table.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(Vocabulary vocab, std::size_t dim, std::vector<double> values);

    const Vocabulary& vocab() const noexcept { return vocab_; }
    std::size_t dim() const noexcept { return dim_; }
    std::size_t rows() const noexcept { return vocab_.size(); }

    std::span<const double> row(std::size_t id) const;
    std::span<double> row(std::size_t id);
    std::optional<std::span<const double>> find(std::string_view token) const;

    const std::vector<double>& values() const noexcept { return values_; }

private:
    Vocabulary vocab_;
    std::size_t dim_ = 0;
    std::vector<double> values_;
};

struct LoadReport {
    std::size_t duplicates = 0;
    bool had_header = false;
};

/// Reads the GloVe-style "token v1 ... vdim" text format.
///
/// A first line made of exactly two integers is taken as a "count dim"
/// header. Later duplicates of a token are dropped and counted in `report`.
/// Throws ParseError on dimension mismatch or a non-numeric field, Error on
/// an empty stream.
EmbeddingTable load_text_embeddings(std::istream& in,
                                    std::optional<std::size_t> expected_dim = std::nullopt,
                                    LoadReport* report = nullptr);

EmbeddingTable load_text_embeddings_file(const std::string& path,
                                         std::optional<std::size_t> expected_dim = std::nullopt,
                                         LoadReport* report = nullptr);

/// Writes one line per row with six fractional digits. Throws on an empty
/// table or a failed write.
void save_text_embeddings(const EmbeddingTable& table, std::ostream& out);
void save_text_embeddings_file(const EmbeddingTable& table, const std::string& path);

/// a.b / (|a| |b|), clamped to [-1, 1]. Throws std::domain_error on a
/// zero-norm input and std::invalid_argument on a length mismatch.
double cosine(std::span<const double> a, std::span<const double> b);

}  // namespace awe
