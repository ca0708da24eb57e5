/*
 * Copyright 2026 The avxsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <stdexcept>
#include <string>

namespace avxsim {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller asked the frequency model for something that makes no sense
/// (e.g. an L0 "demand").
class InvalidDemandError : public Error {
public:
    using Error::Error;
};

/// The simulation reached a state that should be impossible. Always a bug.
class InternalInconsistencyError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    ConfigError(const std::string& field, const std::string& message)
        : Error(field + ": " + message), field_(field) {}
    const std::string& field() const { return field_; }

private:
    std::string field_;
};

class ParseError : public Error {
public:
    ParseError(int line, const std::string& message)
        : Error("line " + std::to_string(line) + ": " + message), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

} // namespace avxsim
