#include "fixtures.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include "convqa/error.hpp"
#include "convqa/search.hpp"

namespace convqa::testing {
namespace fs = std::filesystem;

fs::path data_path(const std::string& name) { return fs::path(CONVQA_TEST_DATA) / name; }

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
}

TempDir::TempDir() {
    std::random_device rd;
    for (;;) {
        path_ = fs::temp_directory_path() / ("convqa-test-" + std::to_string(rd()));
        if (fs::create_directory(path_)) break;
    }
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

AppConfig fixture_config() { return load_config(data_path("config.json")); }

std::shared_ptr<Pipeline> fixture_pipeline() {
    return std::make_shared<Pipeline>(build_components(fixture_config()));
}

PipelineComponents retrieval_components() {
    PipelineComponents c;
    c.connector = std::make_shared<OfflineCorpusConnector>(load_corpus(data_path("corpus.jsonl")));
    c.scorer = std::make_shared<LexicalRerankScorer>();
    c.embeddings = std::make_shared<const EmbeddingModel>(load_embeddings(data_path("vectors.txt")));
    return c;
}

std::shared_ptr<Pipeline> function_pipeline(FunctionBackend::Fn fn) {
    PipelineComponents c = retrieval_components();
    auto backend = std::make_shared<FunctionBackend>(std::move(fn));
    for (auto role : {BackendRole::refiner, BackendRole::keyword_extractor, BackendRole::responder,
                      BackendRole::judge}) {
        c.backends[role] = backend;
    }
    return std::make_shared<Pipeline>(std::move(c));
}

}  // namespace convqa::testing
