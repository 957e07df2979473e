// Copyright 2026 The uwloc Authors.
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

//! \file uwloc/errors.hpp
//! Exception type shared by all uwloc modules.

#pragma once

#include <stdexcept>
#include <string>

namespace uwloc {

//! Failure categories. The C API maps these one-to-one onto status codes.
enum class ErrorCode
{
    invalid_argument = 1,
    parse_error,
    io_error,
    out_of_range,
    infeasible_angle,  //!< ray turns before traversing the segment
    unreachable,       //!< target time shorter than the vertical-ray time
    beyond_range,      //!< target value larger than any direct ray achieves
    solver_failure,    //!< bisection exhausted its iteration cap
    degenerate_geometry,
    insufficient_data,
};

class Error : public std::runtime_error
{
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace uwloc
