/* Copyright 2026 The dldkit Authors. All Rights Reserved.

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

#include "dldkit/error.hpp"

namespace dldkit {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kMalformedLine: return "MalformedLine";
    case ErrorCode::kEmptyCategory: return "EmptyCategory";
    case ErrorCode::kVocabularyTooSmall: return "VocabularyTooSmall";
    case ErrorCode::kInvalidRatio: return "InvalidRatio";
    case ErrorCode::kRecordMismatch: return "RecordMismatch";
    case ErrorCode::kUnknownCategory: return "UnknownCategory";
    case ErrorCode::kIdMismatch: return "IdMismatch";
    case ErrorCode::kInsufficientPoints: return "InsufficientPoints";
    case ErrorCode::kIllConditioned: return "IllConditioned";
    case ErrorCode::kScheduleSingular: return "ScheduleSingular";
    case ErrorCode::kDivergenceDetected: return "DivergenceDetected";
    case ErrorCode::kIo: return "Io";
    case ErrorCode::kConfig: return "Config";
  }
  return "Unknown";
}

}  // namespace dldkit
