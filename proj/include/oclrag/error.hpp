// Copyright 2026 the oclrag authors
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
#include <string_view>

namespace oclrag {

enum class ErrorCode {
  NoDeclarationsFound,
  MalformedRecord,
  InconsistentModel,
  SampleTooLarge,
  IoFailure,
  CorruptKbFile,
  ProviderUnavailable,
  DimensionMismatch,
  EncoderNotFitted,
  ZeroVector,
  EmptyCorpus,
  UnknownModel,
  DanglingAssociation,
  EmptySpecification,
  EmptyText,
  EmptyRecordSet,
  ClientUnavailable,
  ClientTimeout,
  InvalidConfig,
  InvalidArgument,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NoDeclarationsFound: return "NoDeclarationsFound";
    case ErrorCode::MalformedRecord: return "MalformedRecord";
    case ErrorCode::InconsistentModel: return "InconsistentModel";
    case ErrorCode::SampleTooLarge: return "SampleTooLarge";
    case ErrorCode::IoFailure: return "IoFailure";
    case ErrorCode::CorruptKbFile: return "CorruptKbFile";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EncoderNotFitted: return "EncoderNotFitted";
    case ErrorCode::ZeroVector: return "ZeroVector";
    case ErrorCode::EmptyCorpus: return "EmptyCorpus";
    case ErrorCode::UnknownModel: return "UnknownModel";
    case ErrorCode::DanglingAssociation: return "DanglingAssociation";
    case ErrorCode::EmptySpecification: return "EmptySpecification";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::EmptyRecordSet: return "EmptyRecordSet";
    case ErrorCode::ClientUnavailable: return "ClientUnavailable";
    case ErrorCode::ClientTimeout: return "ClientTimeout";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace oclrag
