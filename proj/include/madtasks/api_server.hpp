#pragma once

// Read-only HTTP service over one immutable dataset. `Service::handle` is a
// pure function of (dataset, path, query); `HttpServer` binds it to
// cpp-httplib.

#include <csignal>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <pthread.h>

#include <httplib.h>

#include "madtasks/analysis.hpp"
#include "madtasks/cooccur.hpp"
#include "madtasks/dataset.hpp"
#include "madtasks/serialize.hpp"

namespace madtasks {

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

using Query = std::map<std::string, std::string>;

// Parameter bounds accepted on the wire.
inline constexpr long long kMaxTopK = 62;
inline constexpr long long kMaxMinCount = 1'000'000'000;

class Service {
 public:
  explicit Service(Dataset ds, std::optional<std::filesystem::path> assets = std::nullopt)
      : ds_(std::move(ds)), assets_(std::move(assets)) {}

  const Dataset& dataset() const { return ds_; }

  Response handle(std::string_view path, const Query& q) const {
    try {
      std::string p(path);
      if (p.rfind("/api/v1/", 0) == 0) p = "/api/" + p.substr(8);
      if (p == "/api/event-types") return ok(event_types());
      if (p == "/api/graph") return ok(graph(q));
      if (p == "/api/compare") return ok(compare(q));
      if (p == "/api/prevalence") return ok(prevalence_json(prevalence_report(ds_, taxonomy(q))));
      if (p == "/api/odds") return ok(odds_json(compute_report(ds_, taxonomy(q))));
      if (p == "/" || p == "/index.html") return asset("index.html");
      if (p.rfind("/assets/", 0) == 0) return asset(p.substr(8));
      return error(404, "not_found", "no route for " + p);
    } catch (const HttpError& e) {
      return error(e.status, e.code, e.what());
    } catch (const ZeroCellError& e) {
      return error(422, e.code(), e.what());
    } catch (const EmptyPopulationError& e) {
      return error(422, e.code(), e.what());
    } catch (const Error& e) {
      return error(400, e.code(), e.what());
    }
  }

 private:
  struct HttpError : std::runtime_error {
    HttpError(int s, std::string c, const std::string& m) : std::runtime_error(m), status(s), code(std::move(c)) {}
    int status;
    std::string code;
  };

  static Response ok(const ojson& j) { return Response{200, "application/json", dump(j)}; }

  static Response error(int status, const std::string& code, const std::string& message) {
    ojson j;
    j["code"] = code;
    j["message"] = message;
    return Response{status, "application/json", dump(j)};
  }

  static std::optional<std::string> param(const Query& q, const std::string& key) {
    auto it = q.find(key);
    if (it == q.end()) return std::nullopt;
    return it->second;
  }

  static long long int_param(const Query& q, const std::string& key, long long def, long long lo, long long hi) {
    auto v = param(q, key);
    if (!v) return def;
    std::size_t used = 0;
    long long x = 0;
    try {
      x = std::stoll(*v, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (v->empty() || used != v->size()) throw HttpError(400, "bad_parameter", key + " must be an integer");
    if (x < lo || x > hi) {
      throw HttpError(400, "out_of_range",
                      key + " must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    }
    return x;
  }

  static Taxonomy taxonomy(const Query& q) {
    auto v = param(q, "taxonomy");
    if (!v) return Taxonomy::Shrp2;
    auto t = parse_taxonomy(*v);
    if (!t) throw HttpError(400, "bad_parameter", "unknown taxonomy \"" + *v + "\"");
    return *t;
  }

  static EventType event_type(const std::string& label) {
    auto t = parse_event_type(label);
    if (!t) throw HttpError(404, "unknown_event_type", "unknown event type \"" + label + "\"");
    return *t;
  }

  static Cutoffs cutoffs(const Query& q, const char* top_k_key) {
    Cutoffs c;
    c.top_k = static_cast<std::size_t>(int_param(q, top_k_key, 5, 1, kMaxTopK));
    c.min_count = static_cast<std::uint64_t>(int_param(q, "min_count", 0, 0, kMaxMinCount));
    c.min_rel_prev = static_cast<double>(int_param(q, "min_rel_prev", 0, 0, 100)) / 100.0;
    return c;
  }

  ojson event_types() const {
    std::array<std::uint64_t, kEventTypes.size()> n{};
    for (const auto& e : ds_.events) {
      const auto m = membership_of(e);
      for (auto t : kEventTypes) n[static_cast<std::size_t>(t)] += m.contains(t);
    }
    ojson j;
    j["schema"] = "event-types/" + std::to_string(kSchemaVersion);
    auto arr = ojson::array();
    for (auto t : kEventTypes) {
      ojson o;
      o["label"] = to_string(t);
      o["population"] = n[static_cast<std::size_t>(t)];
      arr.push_back(std::move(o));
    }
    j["event_types"] = std::move(arr);
    return j;
  }

  ojson graph(const Query& q) const {
    auto label = param(q, "type");
    if (!label) throw HttpError(400, "missing_parameter", "type is required");
    const auto t = event_type(*label);
    return to_json(build_graph(ds_, t, cutoffs(q, "top_k"), taxonomy(q)));
  }

  ojson compare(const Query& q) const {
    auto list = param(q, "types");
    if (!list) throw HttpError(400, "missing_parameter", "types is required");
    std::vector<EventType> types;
    std::stringstream ss(*list);
    std::string item;
    while (std::getline(ss, item, ',')) types.push_back(event_type(item));
    if (types.size() < 2) throw HttpError(400, "bad_parameter", "types needs at least two event types");
    const auto c = cutoffs(q, "per_type_top_k");
    return to_json(build_comparison(ds_, types, c.top_k, c, taxonomy(q)));
  }

  static std::string mime_for(const std::filesystem::path& p) {
    const auto ext = p.extension().string();
    if (ext == ".html") return "text/html; charset=utf-8";
    if (ext == ".js" || ext == ".mjs") return "text/javascript";
    if (ext == ".css") return "text/css";
    if (ext == ".svg") return "image/svg+xml";
    if (ext == ".json") return "application/json";
    if (ext == ".png") return "image/png";
    return "application/octet-stream";
  }

  Response asset(const std::string& rel) const {
    if (rel.empty() || rel.find("..") != std::string::npos || rel.front() == '/') {
      return error(404, "not_found", "no such asset");
    }
    if (!assets_) {
      if (rel == "index.html") {
        return Response{200, "text/html; charset=utf-8",
                        "<!doctype html>\n<title>madtasks</title>\n<p>Explorer assets are not installed. "
                        "The JSON API is under <code>/api/v1/</code>.</p>\n"};
      }
      return error(404, "not_found", "no such asset");
    }
    const auto file = *assets_ / rel;
    std::ifstream in(file, std::ios::binary);
    if (!in) return error(404, "not_found", "no such asset");
    std::ostringstream buf;
    buf << in.rdbuf();
    return Response{200, mime_for(file), buf.str()};
  }

  Dataset ds_;
  std::optional<std::filesystem::path> assets_;
};

class HttpServer {
 public:
  explicit HttpServer(const Service& service) : service_(service) {
    server_.Get(".*", [this](const httplib::Request& req, httplib::Response& res) {
      Query q;
      for (const auto& [k, v] : req.params) q.emplace(k, v);  // first value wins
      const auto r = service_.handle(req.path, q);
      res.status = r.status;
      res.set_content(r.body, r.content_type);
    });
  }

  // Port 0 picks a free port. Returns the bound port, or -1.
  int bind(const std::string& host, int port) {
    if (port == 0) return server_.bind_to_any_port(host);
    return server_.bind_to_port(host, port) ? port : -1;
  }
  bool listen() { return server_.listen_after_bind(); }
  void stop() { server_.stop(); }
  void wait_until_ready() { server_.wait_until_ready(); }

 private:
  const Service& service_;
  httplib::Server server_;
};

// Blocks until SIGINT or SIGTERM, then drains and returns. Call before other
// threads are started so they inherit the blocked signal mask.
inline int serve(const Service& service, const std::string& host, int port, std::ostream& log) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  HttpServer http(service);
  const int bound = http.bind(host, port);
  if (bound < 0) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    http.stop();
  });
  log << "listening on http://" << host << ":" << bound << "\n" << std::flush;
  http.listen();
  // listen() may also return on its own; wake the waiter in that case.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  return 0;
}

}  // namespace madtasks
