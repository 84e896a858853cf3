// Mounts a Service on a cpp-httplib server.
#pragma once

#include "lukq/service.hpp"

#include <httplib.h>

#include <string>

namespace lukq {

inline void mount(Service& service, httplib::Server& server) {
    server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                                {"Access-Control-Allow-Methods", "GET, PUT, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});

    auto route = [&service](const char* method) {
        return [&service, method](const httplib::Request& req, httplib::Response& res) {
            Response r = service.handle(method, req.path, req.body);
            res.status = r.status;
            res.set_content(r.text(), "application/json");
        };
    };
    server.Get("/schema", route("GET"));
    server.Put("/normalization", route("PUT"));
    server.Post("/query", route("POST"));
    server.Post("/transpile", route("POST"));
    server.Post("/synth-literal", route("POST"));
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.set_error_handler([](const httplib::Request& req, httplib::Response& res) {
        if (!res.body.empty()) return;
        Response r = error_response(res.status, {ApiErrorCode::Internal, "no route " + req.method + " " + req.path});
        res.set_content(r.text(), "application/json");
    });
}

}  // namespace lukq
