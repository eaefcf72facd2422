///////////////////////////////////////////////////////////////////////
// File:        utf8.hpp
// Description: UTF-8 <-> code point conversion.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
///////////////////////////////////////////////////////////////////////

#ifndef OCRVOTE_UTF8_HPP
#define OCRVOTE_UTF8_HPP

#include <string>
#include <string_view>

namespace ocrvote {

// All text inside the library is held as code points; one char32_t is one
// OCR "character".

/// Throws DataError on malformed input (overlong forms, surrogates, ...).
std::u32string decode_utf8(std::string_view bytes);

std::string encode_utf8(std::u32string_view text);
std::string encode_utf8(char32_t ch);

}  // namespace ocrvote

#endif  // OCRVOTE_UTF8_HPP
