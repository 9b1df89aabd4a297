// Copyright 2026 The ctv Authors
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

#include <string>
#include <string_view>

#include "ctv/ir.hpp"

namespace ctv {

// Annotation files are key/value text:
//
//   # comment
//   sources: in
//   sinks:   out
//   flush:   r1, r2
//   public:
//   excluded:
//     more_names_on_continuation_lines
//
// Names are separated by commas or whitespace. Keys are fixed; an unknown
// key is an error.
Annotations parse_annotations(std::string_view text);
std::string print_annotations(const Annotations& a);

// Checks `a` against the top module of `p`. Every name must be a top-level
// net; sinks must be nonempty; excluded and Public must be disjoint; the
// clock may be neither a source nor a sink. Returns `a` unchanged.
Annotations validate_annotations(const Program& p, const Annotations& a);

}  // namespace ctv
