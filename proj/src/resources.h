#pragma once

// JSON documents shipped with the library, embedded at build time from data/.

#include <string_view>

namespace ensemble::resources {

extern const std::string_view kLexicon;
extern const std::string_view kActionTable;
extern const std::string_view kTemplates;
extern const std::string_view kInteractionMachine;
extern const std::string_view kKitchenScene;

}  // namespace ensemble::resources
