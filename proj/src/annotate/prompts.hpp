#pragma once

namespace aix::annotate::detail {

extern const char* const kHowPrompt;
extern const char* const kRepetitivenessPrompt;
extern const char* const kNaturePrompt;

}  // namespace aix::annotate::detail
