#include "awe/embedding_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace awe {

Vocabulary::Vocabulary(const std::vector<std::string>& tokens) {
    for (const auto& t : tokens) {
        if (index_.count(t) != 0) throw Error("duplicate token in vocabulary: " + t);
        add(t);
    }
}

std::size_t Vocabulary::add(std::string_view token) {
    std::string key(token);
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const std::size_t id = tokens_.size();
    tokens_.push_back(key);
    index_.emplace(std::move(key), id);
    return id;
}

std::optional<std::size_t> Vocabulary::lookup(std::string_view token) const {
    auto it = index_.find(std::string(token));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

EmbeddingTable::EmbeddingTable(Vocabulary vocab, std::size_t dim, std::vector<double> values)
    : vocab_(std::move(vocab)), dim_(dim), values_(std::move(values)) {
    if (dim_ == 0) throw Error("embedding dimension must be positive");
    if (values_.size() != vocab_.size() * dim_) {
        throw Error("embedding table has " + std::to_string(values_.size()) +
                    " values, expected " + std::to_string(vocab_.size() * dim_));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw Error("embedding table contains a non-finite value");
    }
}

std::span<const double> EmbeddingTable::row(std::size_t id) const {
    return {values_.data() + id * dim_, dim_};
}

std::span<double> EmbeddingTable::row(std::size_t id) {
    return {values_.data() + id * dim_, dim_};
}

std::optional<std::span<const double>> EmbeddingTable::find(std::string_view token) const {
    auto id = vocab_.lookup(token);
    if (!id) return std::nullopt;
    return row(*id);
}

namespace {

std::vector<std::string_view> split_spaces(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && line[pos] == ' ') ++pos;
        if (pos >= line.size()) break;
        std::size_t end = line.find(' ', pos);
        if (end == std::string_view::npos) end = line.size();
        fields.push_back(line.substr(pos, end - pos));
        pos = end;
    }
    return fields;
}

bool parse_unsigned(std::string_view s, std::size_t& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size();
}

bool parse_double(std::string_view s, double& out) {
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc() && ptr == s.data() + s.size() && std::isfinite(out);
}

}  // namespace

EmbeddingTable load_text_embeddings(std::istream& in, std::optional<std::size_t> expected_dim,
                                    LoadReport* report) {
    Vocabulary vocab;
    std::vector<double> values;
    std::size_t dim = expected_dim.value_or(0);
    LoadReport local;
    std::string line;
    std::size_t lineno = 0;
    bool any_data = false;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto fields = split_spaces(line);
        if (fields.empty()) continue;

        if (!any_data && lineno == 1 && fields.size() == 2) {
            std::size_t count = 0, header_dim = 0;
            if (parse_unsigned(fields[0], count) && parse_unsigned(fields[1], header_dim)) {
                if (header_dim == 0) throw ParseError(lineno, "header declares dimension 0");
                if (dim != 0 && dim != header_dim) {
                    throw ParseError(lineno, "header dimension " + std::to_string(header_dim) +
                                                 " differs from expected " + std::to_string(dim));
                }
                dim = header_dim;
                local.had_header = true;
                continue;
            }
        }

        const std::size_t n_values = fields.size() - 1;
        if (n_values == 0) throw ParseError(lineno, "token without vector values");
        if (dim == 0) dim = n_values;
        if (n_values != dim) {
            throw ParseError(lineno, "expected " + std::to_string(dim) + " values, found " +
                                         std::to_string(n_values));
        }
        std::vector<double> row(dim);
        for (std::size_t k = 0; k < dim; ++k) {
            if (!parse_double(fields[k + 1], row[k])) {
                throw ParseError(lineno, "non-numeric field '" + std::string(fields[k + 1]) + "'");
            }
        }
        any_data = true;
        if (vocab.contains(fields[0])) {
            ++local.duplicates;
            continue;
        }
        vocab.add(fields[0]);
        values.insert(values.end(), row.begin(), row.end());
    }
    if (in.bad()) throw Error("read failure while loading embeddings");
    if (!any_data) throw Error("embedding stream contains no vectors");
    if (report) *report = local;
    return EmbeddingTable(std::move(vocab), dim, std::move(values));
}

EmbeddingTable load_text_embeddings_file(const std::string& path,
                                         std::optional<std::size_t> expected_dim,
                                         LoadReport* report) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open embedding file: " + path);
    try {
        return load_text_embeddings(in, expected_dim, report);
    } catch (const ParseError& e) {
        throw ParseError(e.line(), e.detail(), path);
    }
}

void save_text_embeddings(const EmbeddingTable& table, std::ostream& out) {
    if (table.rows() == 0 || table.dim() == 0) throw Error("cannot save an empty embedding table");
    char buf[64];
    for (std::size_t id = 0; id < table.rows(); ++id) {
        out << table.vocab().token_of(id);
        for (double v : table.row(id)) {
            std::snprintf(buf, sizeof buf, " %.6f", v);
            out << buf;
        }
        out << '\n';
    }
    out.flush();
    if (!out) throw Error("write failure while saving embeddings");
}

void save_text_embeddings_file(const EmbeddingTable& table, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot open for writing: " + path);
    save_text_embeddings(table, out);
}

double cosine(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("cosine: vector lengths differ");
    double ab = 0.0, aa = 0.0, bb = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        ab += a[k] * b[k];
        aa += a[k] * a[k];
        bb += b[k] * b[k];
    }
    if (aa <= 0.0 || bb <= 0.0) throw std::domain_error("cosine: zero-norm vector");
    return std::clamp(ab / (std::sqrt(aa) * std::sqrt(bb)), -1.0, 1.0);
}

}  // namespace awe
