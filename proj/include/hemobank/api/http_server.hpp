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

#pragma once

#include <memory>
#include <string>

#include "hemobank/api/service.hpp"

namespace httplib {
class Server;
}

namespace hemobank::api {

/// Serves a Service over HTTP/1.1.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();

    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds without accepting yet. Port 0 picks a free port. Returns the
    /// bound port, or -1 when the address is unavailable.
    int bind(const std::string& host, int port);

    /// Accepts until stop(). Blocks; returns false if not bound.
    bool run();

    /// Stops accepting and lets in-flight requests finish. Safe from any thread.
    void stop();

    bool running() const;

private:
    Service& service_;
    std::unique_ptr<httplib::Server> server_;
};

}  // namespace hemobank::api
