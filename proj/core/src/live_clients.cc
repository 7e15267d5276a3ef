#include <openssl/evp.h>

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <semaphore>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "multipun/clients.h"
#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::clients {

using nlohmann::json;

namespace {

class HttplibTransport : public HttpTransport {
 public:
  HttplibTransport(std::string base_url, int timeout_seconds)
      : base_url_(std::move(base_url)), timeout_(timeout_seconds) {}

  HttpResponse post(const std::string& path, const std::string& body,
                    const std::map<std::string, std::string>& headers) override {
    // A client per call keeps the transport usable from many threads.
    httplib::Client cli(base_url_);
    cli.set_connection_timeout(timeout_, 0);
    cli.set_read_timeout(timeout_, 0);
    cli.set_write_timeout(timeout_, 0);
    httplib::Headers h(headers.begin(), headers.end());
    auto res = cli.Post(path, h, body, "application/json");
    if (!res) return {0, {}, httplib::to_string(res.error())};
    return {res->status, res->body, {}};
  }

 private:
  std::string base_url_;
  int timeout_;
};

std::string base64_encode(std::string_view bytes) {
  std::string out(4 * ((bytes.size() + 2) / 3), '\0');
  int n = EVP_EncodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(bytes.data()),
                          static_cast<int>(bytes.size()));
  out.resize(static_cast<std::size_t>(n));
  return out;
}

std::string base64_decode(std::string_view b64) {
  std::string clean;
  for (char c : b64) {
    if (!std::isspace(static_cast<unsigned char>(c))) clean.push_back(c);
  }
  if (clean.size() % 4 != 0) throw GenerationFormatError("malformed base64 image payload", clean);
  std::string out(clean.size() / 4 * 3, '\0');
  int n = EVP_DecodeBlock(reinterpret_cast<unsigned char*>(out.data()),
                          reinterpret_cast<const unsigned char*>(clean.data()),
                          static_cast<int>(clean.size()));
  if (n < 0) throw GenerationFormatError("malformed base64 image payload", clean);
  std::size_t pad = 0;
  if (!clean.empty() && clean.back() == '=') ++pad;
  if (clean.size() > 1 && clean[clean.size() - 2] == '=') ++pad;
  out.resize(static_cast<std::size_t>(n) - pad);
  return out;
}

std::string mime_of(std::string_view bytes) {
  if (bytes.starts_with("\x89PNG")) return "image/png";
  if (bytes.starts_with("\xff\xd8")) return "image/jpeg";
  return "image/x-portable-pixmap";
}

const LiveConfig& checked(const LiveConfig& cfg) {
  cfg.validate();
  return cfg;
}

// Retry, concurrency limit, credentials and audit trail shared by adapters.
class LiveSession {
 public:
  LiveSession(const LiveConfig& cfg, std::shared_ptr<HttpTransport> transport)
      : cfg_(checked(cfg)),
        transport_(transport ? std::move(transport)
                             : make_http_transport(cfg_.base_url, cfg_.timeout_seconds)),
        slots_(cfg_.max_in_flight),
        jitter_(cfg_.jitter_seed) {
    if (!cfg_.api_key_env.empty()) {
      const char* key = std::getenv(cfg_.api_key_env.c_str());
      if (!key || !*key) {
        throw ConfigError("environment variable " + cfg_.api_key_env + " is not set");
      }
      api_key_ = key;
    }
    if (!cfg_.audit_log.empty()) {
      audit_.open(cfg_.audit_log, std::ios::app);
      if (!audit_) throw ConfigError("cannot open audit log " + cfg_.audit_log);
    }
  }

  const LiveConfig& config() const { return cfg_; }

  json post(const std::string& path, const json& body) {
    const std::string payload = body.dump();
    std::map<std::string, std::string> headers;
    if (!api_key_.empty()) headers["Authorization"] = "Bearer " + api_key_;

    const int max_attempts = cfg_.max_retries + 1;
    std::string last_error;
    for (int attempt = 1; attempt <= max_attempts; ++attempt) {
      HttpResponse res;
      {
        slots_.acquire();
        struct Release {
          std::counting_semaphore<>& s;
          ~Release() { s.release(); }
        } release{slots_};
        res = transport_->post(path, payload, headers);
      }
      audit(path, attempt, payload, res);

      if (res.status >= 200 && res.status < 300) {
        try {
          return json::parse(res.body);
        } catch (const json::parse_error&) {
          throw GenerationFormatError("response from " + path + " is not JSON", res.body);
        }
      }
      last_error = res.status == 0 ? res.error : "HTTP " + std::to_string(res.status);
      const bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
      if (!retryable) throw TransportError(path + ": " + last_error, attempt);
      if (attempt < max_attempts) sleep_backoff(attempt);
    }
    throw TransportError(path + ": " + last_error, max_attempts);
  }

 private:
  void sleep_backoff(int attempt) {
    if (cfg_.backoff_base_ms <= 0) return;
    double factor;
    {
      std::lock_guard lock(jitter_mu_);
      factor = 0.5 + jitter_.unit();
    }
    double ms = cfg_.backoff_base_ms * std::ldexp(1.0, attempt - 1) * factor;
    std::this_thread::sleep_for(std::chrono::microseconds(static_cast<long long>(ms * 1000)));
  }

  void audit(const std::string& path, int attempt, const std::string& payload,
             const HttpResponse& res) {
    if (!audit_.is_open()) return;
    json entry = {{"endpoint", path},    {"model", cfg_.model},  {"attempt", attempt},
                  {"status", res.status}, {"request", payload}, {"response", res.body}};
    if (!res.error.empty()) entry["error"] = res.error;
    std::lock_guard lock(audit_mu_);
    audit_ << entry.dump() << '\n';
    audit_.flush();
  }

  LiveConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  std::counting_semaphore<> slots_;
  std::string api_key_;
  std::mutex jitter_mu_;
  text::SeededRng jitter_;
  std::mutex audit_mu_;
  std::ofstream audit_;
};

TextGenResponse read_chat_completion(const json& body) {
  try {
    const auto& message = body.at("choices").at(0).at("message");
    if (message.contains("refusal") && !message["refusal"].is_null()) {
      return {"", Provenance::kLive, true};
    }
    const auto& content = message.at("content");
    if (content.is_null()) return {"", Provenance::kLive, true};
    return {content.get<std::string>(), Provenance::kLive, false};
  } catch (const json::exception&) {
    throw GenerationFormatError("chat completion without choices[0].message.content",
                                body.dump());
  }
}

class LiveTextGenerator : public TextGenerator {
 public:
  LiveTextGenerator(const LiveConfig& cfg, std::shared_ptr<HttpTransport> t)
      : session_(cfg, std::move(t)) {}

  TextGenResponse generate(const TextGenRequest& req) override {
    json body = {{"model", session_.config().model},
                 {"messages", json::array({{{"role", "user"}, {"content", req.prompt}}})},
                 {"seed", req.seed}};
    return read_chat_completion(session_.post("/v1/chat/completions", body));
  }
  std::string name() const override { return "live-text:" + session_.config().model; }

 private:
  LiveSession session_;
};

class LiveImageGenerator : public ImageGenerator {
 public:
  LiveImageGenerator(const LiveConfig& cfg, std::shared_ptr<ImageStore> store,
                     std::shared_ptr<HttpTransport> t)
      : session_(cfg, std::move(t)), store_(std::move(store)) {
    if (!store_) throw ConfigError("live image generator needs an image store");
  }

  ImageRef render(const ImageGenRequest& req) override {
    json body = {{"model", session_.config().model},
                 {"prompt", req.description},
                 {"n", 1},
                 {"response_format", "b64_json"}};
    json res = session_.post("/v1/images/generations", body);
    std::string b64;
    try {
      b64 = res.at("data").at(0).at("b64_json").get<std::string>();
    } catch (const json::exception&) {
      throw GenerationFormatError("image response without data[0].b64_json", res.dump());
    }
    return store_->put(base64_decode(b64));
  }
  std::string name() const override { return "live-image:" + session_.config().model; }

 private:
  LiveSession session_;
  std::shared_ptr<ImageStore> store_;
};

class LiveEmbedder : public Embedder {
 public:
  LiveEmbedder(const LiveConfig& cfg, std::shared_ptr<HttpTransport> t)
      : session_(cfg, std::move(t)) {}

  std::vector<std::vector<double>> embed_rows(const std::vector<std::string>& texts) override {
    json body = {{"model", session_.config().model}, {"input", texts}};
    json res = session_.post("/v1/embeddings", body);
    std::vector<std::vector<double>> rows(texts.size());
    try {
      for (const auto& item : res.at("data")) {
        auto idx = item.at("index").get<std::size_t>();
        if (idx >= rows.size()) throw GenerationFormatError("embedding index out of range", res.dump());
        rows[idx] = item.at("embedding").get<std::vector<double>>();
      }
    } catch (const json::exception&) {
      throw GenerationFormatError("malformed embeddings response", res.dump());
    }
    for (const auto& r : rows) {
      if (r.empty()) throw GenerationFormatError("embeddings response is missing rows", res.dump());
    }
    return rows;
  }
  std::string name() const override { return "live-embed:" + session_.config().model; }

 private:
  LiveSession session_;
};

class LiveSubject : public VlmSubject {
 public:
  LiveSubject(const LiveConfig& cfg, std::shared_ptr<ImageStore> images,
              std::shared_ptr<HttpTransport> t)
      : session_(cfg, std::move(t)), images_(std::move(images)) {}

  std::string answer(const SubjectQuery& q) override {
    json content = json::array({{{"type", "text"}, {"text", q.prompt}}});
    if (q.image) {
      if (!images_) throw ConfigError("query carries an image but no image store is configured");
      std::string bytes = images_->get(*q.image);
      content.push_back({{"type", "image_url"},
                         {"image_url",
                          {{"url", "data:" + mime_of(bytes) + ";base64," + base64_encode(bytes)}}}});
    }
    json body = {{"model", session_.config().model},
                 {"messages", json::array({{{"role", "user"}, {"content", content}}})},
                 {"seed", q.seed}};
    return read_chat_completion(session_.post("/v1/chat/completions", body)).text;
  }
  std::string name() const override { return "live-subject:" + session_.config().model; }

 private:
  LiveSession session_;
  std::shared_ptr<ImageStore> images_;
};

}  // namespace

void LiveConfig::validate() const {
  if (model.empty()) throw ConfigError("live client needs a model name");
  if (base_url.empty()) throw ConfigError("live client needs a base URL");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (backoff_base_ms < 0) throw ConfigError("backoff_base_ms must be >= 0");
  if (timeout_seconds < 1) throw ConfigError("timeout_seconds must be >= 1");
}

std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url,
                                                   int timeout_seconds) {
  return std::make_shared<HttplibTransport>(base_url, timeout_seconds);
}

std::shared_ptr<TextGenerator> make_live_text_generator(const LiveConfig& cfg,
                                                        std::shared_ptr<HttpTransport> transport) {
  return std::make_shared<LiveTextGenerator>(cfg, std::move(transport));
}

std::shared_ptr<ImageGenerator> make_live_image_generator(
    const LiveConfig& cfg, std::shared_ptr<ImageStore> store,
    std::shared_ptr<HttpTransport> transport) {
  return std::make_shared<LiveImageGenerator>(cfg, std::move(store), std::move(transport));
}

std::shared_ptr<Embedder> make_live_embedder(const LiveConfig& cfg,
                                             std::shared_ptr<HttpTransport> transport) {
  return std::make_shared<LiveEmbedder>(cfg, std::move(transport));
}

std::shared_ptr<VlmSubject> make_live_subject(const LiveConfig& cfg,
                                              std::shared_ptr<ImageStore> images,
                                              std::shared_ptr<HttpTransport> transport) {
  return std::make_shared<LiveSubject>(cfg, std::move(images), std::move(transport));
}

}  // namespace multipun::clients
