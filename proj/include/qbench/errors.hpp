// Copyright 2026 The qbench Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#pragma once

#include <stdexcept>
#include <string>

namespace qbench {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

/// Malformed input text; carries the 1-based line and column of the offending cell.
class ParseError : public Error {
  public:
    ParseError(const std::string &what, std::size_t line, std::size_t column)
        : Error(what + " (line " + std::to_string(line) + ", column " +
                std::to_string(column) + ")"),
          line_(line), column_(column) {}

    [[nodiscard]] std::size_t line() const noexcept { return line_; }
    [[nodiscard]] std::size_t column() const noexcept { return column_; }

  private:
    std::size_t line_;
    std::size_t column_;
};

class ValidationError : public Error {
    using Error::Error;
};
class DegenerateError : public Error {
    using Error::Error;
};
class RangeError : public Error {
    using Error::Error;
};
class SizeError : public Error {
    using Error::Error;
};
class IndexError : public Error {
    using Error::Error;
};
class NumericalError : public Error {
    using Error::Error;
};
class BudgetError : public Error {
    using Error::Error;
};
class ConfigError : public Error {
    using Error::Error;
};
class EmptyError : public Error {
    using Error::Error;
};
class NoFeasibleSubset : public Error {
    using Error::Error;
};
class IoError : public Error {
    using Error::Error;
};

} // namespace qbench
