#pragma once

// Boundary to external generation services, with deterministic mocks.
//
// Every client is safe to call from several threads at once. Mocks are pure
// functions of their inputs and seed.

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "multipun/divfilter.h"

namespace multipun::clients {

enum class Provenance { kMock, kLive };
std::string_view to_string(Provenance p);

// ---------------------------------------------------------------------------
// Text generation

struct TextGenRequest {
  std::string prompt;
  std::uint64_t seed = 0;
};

struct TextGenResponse {
  std::string text;
  Provenance provenance = Provenance::kMock;
  bool refused = false;  // the service declined; `text` is empty
};

class TextGenerator {
 public:
  virtual ~TextGenerator() = default;
  virtual TextGenResponse generate(const TextGenRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Checks the request then forwards it. Throws ArgumentError on an empty prompt.
TextGenResponse generate_text(TextGenerator& client, const TextGenRequest& req);

// Recognises the creative, explicative-substitution and random-substitution
// prompts and answers them in the expected labelled format, built from the
// words and definitions found in the prompt. Anything else gets a short
// completion derived from a hash of (prompt, seed).
class MockTextGenerator : public TextGenerator {
 public:
  // When set, creative captions deliberately leave out the pun word; used to
  // exercise validity failures.
  explicit MockTextGenerator(bool omit_pun_word = false) : omit_pun_word_(omit_pun_word) {}
  TextGenResponse generate(const TextGenRequest& req) override;
  std::string name() const override { return "mock-text"; }

 private:
  bool omit_pun_word_;
};

// ---------------------------------------------------------------------------
// Images

struct ImageGenRequest {
  std::string description;
  std::uint64_t seed = 0;
};

// Content address: lowercase hex sha256 of the image bytes.
struct ImageRef {
  std::string sha256;
  std::size_t bytes = 0;

  bool operator==(const ImageRef&) const = default;
};

// Directory of images keyed by content hash: <root>/<h[0:2]>/<h>.<ext>.
class ImageStore {
 public:
  explicit ImageStore(std::filesystem::path root, std::string extension = "ppm");

  ImageRef put(std::string_view bytes);
  std::filesystem::path path_of(const ImageRef& ref) const;
  bool contains(const ImageRef& ref) const;
  std::string get(const ImageRef& ref) const;  // LookupError when missing
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path root_;
  std::string extension_;
  mutable std::mutex mu_;
};

class ImageGenerator {
 public:
  virtual ~ImageGenerator() = default;
  virtual ImageRef render(const ImageGenRequest& req) = 0;
  virtual std::string name() const = 0;
};

// Renders a small binary PPM whose pixels are a hash of (description, seed).
// Bytes are written to `store` when one is given.
class MockImageGenerator : public ImageGenerator {
 public:
  explicit MockImageGenerator(std::shared_ptr<ImageStore> store = nullptr, int size = 16)
      : store_(std::move(store)), size_(size) {}
  ImageRef render(const ImageGenRequest& req) override;
  std::string name() const override { return "mock-image"; }

  std::string render_bytes(const ImageGenRequest& req) const;

 private:
  std::shared_ptr<ImageStore> store_;
  int size_;
};

// ---------------------------------------------------------------------------
// Embeddings

class Embedder {
 public:
  virtual ~Embedder() = default;
  // One row per input text, all of the same dimension.
  virtual std::vector<std::vector<double>> embed_rows(const std::vector<std::string>& texts) = 0;
  virtual std::string name() const = 0;
};

// Character trigrams of the lowercased, space-padded text hashed into
// `dim` buckets, then L2-normalised.
class MockEmbedder : public Embedder {
 public:
  static constexpr std::size_t kDefaultDim = 64;
  explicit MockEmbedder(std::size_t dim = kDefaultDim) : dim_(dim) {}
  std::vector<std::vector<double>> embed_rows(const std::vector<std::string>& texts) override;
  std::string name() const override { return "mock-embed"; }

  std::vector<double> embed_one(std::string_view text) const;

 private:
  std::size_t dim_;
};

// Row i corresponds to texts[i]; ids default to "0", "1", ...
// Throws ArgumentError on an empty list.
divfilter::EmbeddingMatrix embed(Embedder& client, const std::vector<std::string>& texts,
                                 std::vector<std::string> ids = {});

// ---------------------------------------------------------------------------
// Vision-language subject under evaluation

struct SubjectQuery {
  std::string prompt;
  std::optional<ImageRef> image;
  std::uint64_t seed = 0;
};

class VlmSubject {
 public:
  virtual ~VlmSubject() = default;
  virtual std::string answer(const SubjectQuery& q) = 0;
  virtual std::string name() const = 0;
};

class MockSubject : public VlmSubject {
 public:
  enum class Mode {
    kAlwaysPun,     // {"is_pun": true, ...} for every prompt
    kNeverPun,      // {"is_pun": false}
    kFollowsBias,   // pun under the to-pun phrasing, non-pun under the inverted one
    kHashed,        // verdict and picked word from a hash of (prompt, seed)
  };
  explicit MockSubject(Mode mode = Mode::kHashed) : mode_(mode) {}
  std::string answer(const SubjectQuery& q) override;
  std::string name() const override;

 private:
  Mode mode_;
};

// ---------------------------------------------------------------------------
// Pairwise judge

enum class JudgeVerdict { kWin, kTie, kLoss };
std::string_view to_string(JudgeVerdict v);

enum class JudgeSlot { kA, kB, kTie };

// Reads "WINNER: A", "WINNER: B" or "WINNER: TIE" (case-insensitive, first
// occurrence wins). Throws JudgeFormatError otherwise.
JudgeSlot parse_judge_output(std::string_view text);
// Candidate-perspective verdict given which slot held the candidate.
JudgeVerdict verdict_for_candidate(JudgeSlot slot, bool candidate_in_a);
// Seeded slot assignment used by LlmJudge.
bool candidate_goes_first(std::string_view caption, std::uint64_t seed);

class PairJudge {
 public:
  virtual ~PairJudge() = default;
  virtual JudgeVerdict judge(const std::string& caption, const std::string& candidate,
                             const std::string& reference, std::uint64_t seed) = 0;
  virtual std::string name() const = 0;
};

class MockJudge : public PairJudge {
 public:
  JudgeVerdict judge(const std::string&, const std::string&, const std::string&,
                     std::uint64_t) override {
    return JudgeVerdict::kTie;
  }
  std::string name() const override { return "mock-judge"; }
};

// Asks a text generator to compare two explanations placed in seeded slots.
class LlmJudge : public PairJudge {
 public:
  explicit LlmJudge(std::shared_ptr<TextGenerator> generator) : gen_(std::move(generator)) {}
  JudgeVerdict judge(const std::string& caption, const std::string& candidate,
                     const std::string& reference, std::uint64_t seed) override;
  std::string name() const override { return "llm-judge:" + gen_->name(); }

  static std::string build_prompt(std::string_view caption, std::string_view explanation_a,
                                  std::string_view explanation_b);

 private:
  std::shared_ptr<TextGenerator> gen_;
};

// Validates inputs (ArgumentError on empty explanations) then asks `judge`.
JudgeVerdict judge_pair(PairJudge& judge, const std::string& caption,
                        const std::string& candidate, const std::string& reference,
                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Live HTTP adapters (OpenAI-compatible endpoints)

struct HttpResponse {
  int status = 0;  // 0 when the connection itself failed
  std::string body;
  std::string error;
};

// Minimal POST transport so adapters can be exercised with a test double.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse post(const std::string& path, const std::string& body,
                            const std::map<std::string, std::string>& headers) = 0;
};

// cpp-httplib client for `base_url` ("https://host[:port]").
std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   int timeout_seconds = 60);

struct LiveConfig {
  std::string base_url = "https://api.openai.com";
  std::string model;
  std::string api_key_env = "OPENAI_API_KEY";
  int max_in_flight = 4;
  int max_retries = 3;
  int backoff_base_ms = 500;
  int timeout_seconds = 60;
  std::uint64_t jitter_seed = 0;
  std::string audit_log;  // JSONL path; empty disables auditing

  void validate() const;  // ConfigError
};

// Each live client owns the retry and concurrency policy of its LiveConfig.
// `transport` defaults to make_http_transport(cfg.base_url).
std::shared_ptr<TextGenerator> make_live_text_generator(
    const LiveConfig& cfg, std::shared_ptr<HttpTransport> transport = nullptr);
std::shared_ptr<ImageGenerator> make_live_image_generator(
    const LiveConfig& cfg, std::shared_ptr<ImageStore> store,
    std::shared_ptr<HttpTransport> transport = nullptr);
std::shared_ptr<Embedder> make_live_embedder(const LiveConfig& cfg,
                                             std::shared_ptr<HttpTransport> transport = nullptr);
std::shared_ptr<VlmSubject> make_live_subject(const LiveConfig& cfg,
                                              std::shared_ptr<ImageStore> images,
                                              std::shared_ptr<HttpTransport> transport = nullptr);

}  // namespace multipun::clients
