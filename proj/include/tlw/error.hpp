/* Copyright 2026 The TLW Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#ifndef TLW_ERROR_HPP_
#define TLW_ERROR_HPP_

#include <stdexcept>
#include <string>

namespace tlw {

enum class ErrorKind {
  UnboundVariable,
  UnknownConstant,
  UnknownRelation,
  UnknownBasicType,
  TypeMismatch,
  ModeViolation,
  DuplicateName,
  Parse,
  RuleNotInMode,
  SideConditionViolated,
  SchemaMismatch,
  MemberOutOfRange,
  InvalidSpace,
  InvalidSheaf,
  BaseMismatch,
  ParentMismatch,
  NotEtale,
  NotDecidable,
  InvalidModel,
  EscapesCarrier,
  SizeLimit,
  Io,
};

const char* error_kind_name(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind) {}

  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) {
  throw Error(kind, message);
}

}  // namespace tlw

#endif  // TLW_ERROR_HPP_
