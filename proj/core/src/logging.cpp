/*
 * Copyright 2026 The cirl authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "cirl/logging.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace cirl {

LogLevel log_level() {
    static const LogLevel level = [] {
        const char* env = std::getenv("CIRL_LOG");
        if (env == nullptr) return LogLevel::error;
        const std::string value(env);
        if (value == "debug") return LogLevel::debug;
        if (value == "info") return LogLevel::info;
        return LogLevel::error;
    }();
    return level;
}

namespace {
std::mutex log_mutex;

void emit(const char* tag, const std::string& msg) {
    std::lock_guard<std::mutex> lock(log_mutex);
    std::cerr << "[cirl " << tag << "] " << msg << "\n";
}
}  // namespace

void log_info(const std::string& msg) {
    if (log_level() >= LogLevel::info) emit("info", msg);
}

void log_debug(const std::string& msg) {
    if (log_level() >= LogLevel::debug) emit("debug", msg);
}

}  // namespace cirl
