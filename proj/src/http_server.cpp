#include "meqa/service.hpp"

#include <httplib.h>

#include "meqa/log.hpp"

namespace meqa::app {

namespace {

void send(httplib::Response& res, const HttpReply& reply) {
  res.status = reply.status;
  res.set_content(reply.body.dump(), "application/json; charset=utf-8");
}

}  // namespace

bool serve_http(Service& service, const std::string& host, int port, const ListeningHook& on_listening) {
  httplib::Server server;
  server.Post("/ask", [&](const httplib::Request& req, httplib::Response& res) { send(res, service.ask(req.body)); });
  server.Post("/feedback",
              [&](const httplib::Request& req, httplib::Response& res) { send(res, service.feedback(req.body)); });
  server.Get(R"(/leaflets/([^/]+))", [&](const httplib::Request& req, httplib::Response& res) {
    send(res, service.leaflet(req.matches[1]));
  });
  server.Get("/health", [&](const httplib::Request&, httplib::Response& res) { send(res, service.health()); });
  server.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "internal error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    log::error("request failed: " + what);
    send(res, {500, {{"error", "Internal"}, {"message", what}}});
  });

  if (port == 0) {
    port = server.bind_to_any_port(host);
    if (port < 0) port = 0;
  } else if (!server.bind_to_port(host, port)) {
    port = 0;
  }
  if (port == 0) {
    log::error("cannot bind " + host);
    return false;
  }
  log::info("listening on " + host + ":" + std::to_string(port));
  if (on_listening) on_listening(port, [&server] { server.stop(); });
  return server.listen_after_bind();
}

}  // namespace meqa::app
