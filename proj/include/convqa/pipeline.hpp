#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "convqa/backend.hpp"
#include "convqa/codec.hpp"
#include "convqa/dataset.hpp"
#include "convqa/embedding.hpp"
#include "convqa/prompt.hpp"
#include "convqa/rerank.hpp"
#include "convqa/search.hpp"
#include "convqa/trace.hpp"
#include "convqa/types.hpp"

namespace convqa {

/// Components removed for an ablation run: QF the question refiner, FR the
/// fine-grained retriever (segment / recall / rerank), SC the self-check.
struct Ablations {
    bool qf = false;
    bool fr = false;
    bool sc = false;

    /// Comma-separated codes ("qf,fr,sc", case-insensitive), "all" or "none".
    [[nodiscard]] static Ablations parse(std::string_view codes);
    /// "full", "-QF", "-FR", "-SC", "-ALL" or a concatenation like "-QF-SC".
    [[nodiscard]] std::string label() const;
    [[nodiscard]] std::vector<std::string> codes() const;

    friend bool operator==(const Ablations&, const Ablations&) = default;
};

struct PipelineConfig {
    std::size_t max_documents = 5;  // M
    std::size_t k_recall = 20;
    std::size_t top_n = 3;  // |P_top|
    Ablations ablations;
    TokenizerMode tokenizer = TokenizerMode::unicode;
    ScoreFunction score_function = ScoreFunction::cosine;
    std::size_t max_context_turns = 10;
    std::size_t max_paragraph_tokens = 512;
    int max_output_tokens = 512;
    double temperature = 0.0;

    /// Throws FormatError unless 1 <= top_n <= k_recall and max_documents >= 1.
    void validate() const;
};

[[nodiscard]] Json encode(const PipelineConfig& config);
[[nodiscard]] PipelineConfig decode_pipeline_config(const Json& j);

struct TurnResult {
    RefinedQuestion refined_question;
    KeywordSet keywords;
    std::size_t documents_fetched = 0;
    std::vector<ScoredParagraph> p_top;
    std::vector<HelpfulnessVerdict> verdicts;
    std::string response;
    Trace trace;
};

struct EncodeOptions {
    bool include_trace = true;
    bool include_timings = true;
};

[[nodiscard]] Json encode(const TraceEvent& event, bool include_timings = true);
[[nodiscard]] Json encode(const TurnResult& result, const EncodeOptions& options = {});

/// One conversation served by the pipeline. Turns are appended only after a
/// turn completes; at most one turn runs at a time.
class Session {
  public:
    Session(std::string id, PipelineConfig config, Conversation history = {});

    [[nodiscard]] const std::string& id() const noexcept { return id_; }
    [[nodiscard]] const PipelineConfig& config() const noexcept { return config_; }
    [[nodiscard]] Conversation conversation() const;
    [[nodiscard]] bool busy() const noexcept { return busy_.load(); }

  private:
    friend class Pipeline;

    std::string id_;
    PipelineConfig config_;
    mutable std::mutex mutex_;
    Conversation conversation_;
    std::atomic<bool> busy_{false};
};

/// Models and retrieval resources a pipeline runs on. `backends` must bind
/// the refiner, keyword_extractor and responder roles (one instance may
/// serve several).
struct PipelineComponents {
    std::map<BackendRole, std::shared_ptr<TextBackend>> backends;
    std::shared_ptr<SearchConnector> connector;
    std::shared_ptr<RerankScorer> scorer;
    std::shared_ptr<const EmbeddingModel> embeddings;
    TemplateSet templates;
};

class Pipeline {
  public:
    /// Throws Error when a required component is missing.
    explicit Pipeline(PipelineComponents components);

    /// Runs refine -> extract -> search -> segment -> recall -> rerank ->
    /// generate -> self_check over `context`, skipping ablated stages.
    /// Throws StageError naming the failed stage.
    [[nodiscard]] TurnResult answer(const Conversation& context, std::string_view question,
                                    const PipelineConfig& config) const;

    /// `answer` over the session history with the session's config; the
    /// (question, response) turn is appended on success only. Throws
    /// SessionBusyError when the session is already answering.
    TurnResult answer_turn(Session& session, std::string_view question) const;

    [[nodiscard]] const PipelineComponents& components() const noexcept { return components_; }

  private:
    [[nodiscard]] TextBackend& backend(BackendRole role) const;

    PipelineComponents components_;
};

struct RecordOutcome {
    DatasetRecord record;
    std::optional<TurnResult> result;
    std::string error;  // set iff result is empty
};

/// Answers each record with its stored context as history. Failures are
/// captured per record; output is aligned with input.
[[nodiscard]] std::vector<RecordOutcome> run_dataset(const std::vector<DatasetRecord>& records,
                                                     const Pipeline& pipeline, const PipelineConfig& config);

/// One JSON line per record: conv_id, turn_index, question, response
/// (or error) and the full turn result.
void write_predictions(const std::vector<RecordOutcome>& outcomes, const std::filesystem::path& path,
                       const EncodeOptions& options = {true, false});

/// Response texts from a predictions file ("response"), a dataset file
/// ("reference_response") or a plain {"reference": ...} file, in file order.
[[nodiscard]] std::vector<std::string> load_texts(const std::filesystem::path& path);

}  // namespace convqa
