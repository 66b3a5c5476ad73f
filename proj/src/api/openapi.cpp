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

#include <string>

#include "hemobank/api/service.hpp"

namespace hemobank::api {

namespace {

nlohmann::json roles_of(const Access& a) {
    nlohmann::json out = nlohmann::json::array();
    if (a.admin) out.push_back("ADMIN");
    if (a.donor) out.push_back("DONOR");
    if (a.patient) out.push_back("PATIENT");
    return out;
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

}  // namespace

nlohmann::json openapi_document(const std::vector<RouteInfo>& routes) {
    nlohmann::json paths = nlohmann::json::object();
    for (const RouteInfo& r : routes) {
        nlohmann::json op = {{"operationId", lower(r.method) + r.pattern}};
        if (r.pattern.find("{id}") != std::string::npos) {
            op["parameters"] = {{{"name", "id"},
                                 {"in", "path"},
                                 {"required", true},
                                 {"schema", {{"type", "integer"}, {"minimum", 1}}}}};
        }
        if (r.access.anonymous) {
            op["security"] = nlohmann::json::array();
        } else {
            op["security"] = {{{"bearerAuth", nlohmann::json::array()}}};
            op["x-roles"] = roles_of(r.access);
        }
        op["responses"] = {{"default",
                            {{"description", "JSON body; errors use {\"error\": {code, message, details}}"}}}};
        paths[r.pattern][lower(r.method)] = std::move(op);
    }
    return {{"openapi", "3.0.3"},
            {"info", {{"title", "Hemobank API"}, {"version", "1.0.0"}}},
            {"components",
             {{"securitySchemes",
               {{"bearerAuth", {{"type", "http"}, {"scheme", "bearer"}}}}}}},
            {"paths", paths}};
}

}  // namespace hemobank::api
