/*
 *  Copyright (c) 2026 The Hemobank Authors.
 *
 *  Licensed under the Apache License, Version 2.0 (the "License");
 *  you may not use this file except in compliance with the License.
 *  You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 *  Unless required by applicable law or agreed to in writing, software
 *  distributed under the License is distributed on an "AS IS" BASIS,
 *  WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *  See the License for the specific language governing permissions and
 *  limitations under the License.
 */

#include "hemobank/api/http_server.hpp"

#include <httplib.h>

namespace hemobank::api {

namespace {

Request to_request(const httplib::Request& in) {
    Request out;
    out.method = in.method;
    out.path = in.path;
    for (const auto& [k, v] : in.params) out.query.emplace(k, v);  // first value wins
    for (const auto& [k, v] : in.headers) out.headers.emplace(k, v);
    out.body = in.body;
    return out;
}

}  // namespace

HttpServer::HttpServer(Service& service)
    : service_(service), server_(std::make_unique<httplib::Server>()) {
    auto handler = [this](const httplib::Request& in, httplib::Response& out) {
        const Response r = service_.handle(to_request(in));
        out.status = r.status;
        for (const auto& [k, v] : r.headers) out.set_header(k, v);
        if (!r.body.is_null()) out.set_content(r.body.dump(), "application/json");
    };
    // The library default sets SO_REUSEPORT, which would let a second process
    // share an occupied port.
    server_->set_socket_options([](int sock) {
        int yes = 1;
        setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
    });
    const std::string any = ".*";
    server_->Get(any, handler);
    server_->Post(any, handler);
    server_->Put(any, handler);
    server_->Delete(any, handler);
    server_->Options(any, handler);
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return server_->bind_to_any_port(host);
    return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::run() { return server_->listen_after_bind(); }

void HttpServer::stop() {
    if (server_->is_running()) server_->stop();
}

bool HttpServer::running() const { return server_->is_running(); }

}  // namespace hemobank::api
