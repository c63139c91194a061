#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include <unistd.h>

#include "httplib.h"
#include "humor/annotate.hpp"
#include "humor/corpus.hpp"
#include "humor/lexicons.hpp"

namespace humor::testing {

inline std::filesystem::path data_path(const std::string& rel = "") {
  return std::filesystem::path(HUMOR_TEST_DATA) / rel;
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    static std::atomic<int> counter{0};
    path_ = std::filesystem::temp_directory_path() /
            ("humor-" + tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

inline std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const std::filesystem::path& p, const std::string& content) {
  std::ofstream out(p, std::ios::binary);
  out << content;
}

inline LexiconSet fixture_lexicons() { return LexiconSet::load(data_path("lexicons")); }

inline std::vector<AnnotatedJoke> conllu_fixture(const std::string& stem) {
  const auto jokes = load_corpus(data_path("conllu/" + stem + ".jsonl"), CorpusFormat::kJsonl);
  return attach_conllu(jokes, group_documents(parse_conllu_file(data_path("conllu/" + stem + ".conllu"))));
}

// Local HTTP server answering POST /infill with `handler(body) -> (status, body)`.
class StubServer {
 public:
  using Handler = std::function<std::pair<int, std::string>(const std::string&)>;

  explicit StubServer(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/infill", [this](const httplib::Request& req, httplib::Response& res) {
      ++requests_;
      auto [status, body] = handler_(req.body);
      res.status = status;
      res.set_content(body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~StubServer() {
    server_.stop();
    thread_.join();
  }

  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }
  int requests() const { return requests_; }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::atomic<int> requests_{0};
};

}  // namespace humor::testing
