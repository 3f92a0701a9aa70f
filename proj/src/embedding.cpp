#include "convqa/embedding.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "convqa/error.hpp"

namespace convqa {

void EmbeddingModel::add(std::string token, Vector vector) {
    if (dimension_ == 0 && vectors_.empty()) dimension_ = vector.size();
    if (vector.size() != dimension_) {
        throw Error("vector for '" + token + "' has dimension " + std::to_string(vector.size()) + ", expected " +
                    std::to_string(dimension_));
    }
    vectors_.insert_or_assign(std::move(token), std::move(vector));
}

const Vector* EmbeddingModel::find(std::string_view token) const {
    if (auto it = vectors_.find(std::string(token)); it != vectors_.end()) return &it->second;
    std::string lower(token);
    bool changed = false;
    for (char& c : lower) {
        const char l = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        changed |= l != c;
        c = l;
    }
    if (!changed) return nullptr;
    if (auto it = vectors_.find(lower); it != vectors_.end()) return &it->second;
    return nullptr;
}

Vector EmbeddingModel::lookup(std::string_view token) const {
    if (const Vector* v = find(token)) return *v;
    return Vector(dimension_, 0.0);
}

EmbeddingModel load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open embeddings file " + path.string());

    EmbeddingModel model;
    std::string line;
    long line_no = 0;
    std::size_t declared_dim = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::istringstream fields(line);
        std::string token;
        if (!(fields >> token)) continue;

        std::vector<std::string> rest;
        for (std::string f; fields >> f;) rest.push_back(std::move(f));

        if (line_no == 1 && rest.size() == 1) {
            std::size_t count = 0;
            std::size_t dim = 0;
            const auto r1 = std::from_chars(token.data(), token.data() + token.size(), count);
            const auto r2 = std::from_chars(rest[0].data(), rest[0].data() + rest[0].size(), dim);
            if (r1.ec == std::errc() && r2.ec == std::errc() && r1.ptr == token.data() + token.size() &&
                r2.ptr == rest[0].data() + rest[0].size()) {
                declared_dim = dim;
                model = EmbeddingModel(dim);
                continue;
            }
        }

        Vector v;
        v.reserve(rest.size());
        for (const std::string& f : rest) {
            char* end = nullptr;
            const double x = std::strtod(f.c_str(), &end);
            if (end != f.c_str() + f.size()) {
                throw FormatError(path.string() + " line " + std::to_string(line_no) + ": bad number '" + f + "'");
            }
            v.push_back(x);
        }
        if (v.empty() || (declared_dim != 0 && v.size() != declared_dim) ||
            (model.dimension() != 0 && v.size() != model.dimension())) {
            throw FormatError(path.string() + " line " + std::to_string(line_no) + ": expected " +
                              std::to_string(model.dimension()) + " values, got " + std::to_string(v.size()));
        }
        if (model.contains(token)) continue;
        model.add(std::move(token), std::move(v));
    }
    return model;
}

Vector embed(std::string_view text, const EmbeddingModel& model, TokenizerMode mode) {
    Vector sum(model.dimension(), 0.0);
    std::size_t hits = 0;
    for (const Token& t : tokenize(text, mode)) {
        const Vector* v = model.find(t.text);
        if (v == nullptr) continue;
        for (std::size_t i = 0; i < sum.size(); ++i) sum[i] += (*v)[i];
        ++hits;
    }
    if (hits > 0) {
        for (double& x : sum) x /= static_cast<double>(hits);
    }
    return sum;
}

ScoreFunction parse_score_function(std::string_view name) {
    if (name == "cosine") return ScoreFunction::cosine;
    if (name == "dot") return ScoreFunction::dot;
    throw FormatError("unknown score function '" + std::string(name) + "'");
}

std::string_view to_string(ScoreFunction fn) { return fn == ScoreFunction::dot ? "dot" : "cosine"; }

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw Error("dimension mismatch in dot product");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    const double na = std::sqrt(dot(a, a));
    const double nb = std::sqrt(dot(b, b));
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot(a, b) / (na * nb);
}

double similarity(ScoreFunction fn, std::span<const double> a, std::span<const double> b) {
    return fn == ScoreFunction::dot ? dot(a, b) : cosine(a, b);
}

}  // namespace convqa
