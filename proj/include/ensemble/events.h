#pragma once

#include <cstdint>
#include <string>
#include <variant>

#include "ensemble/geometry.h"

namespace ensemble {

struct Utterance {
  std::string text;
  friend bool operator==(const Utterance&, const Utterance&) = default;
};

struct DeixisGesture {
  Vec3 origin;
  Vec3 direction;
  friend bool operator==(const DeixisGesture&, const DeixisGesture&) = default;
};

struct StaticIconicGesture {
  std::string shape_id;
  friend bool operator==(const StaticIconicGesture&,
                         const StaticIconicGesture&) = default;
};

struct DynamicIconicGesture {
  std::string motion_id;
  friend bool operator==(const DynamicIconicGesture&,
                         const DynamicIconicGesture&) = default;
};

struct HeadGesture {
  bool positive = true;
  friend bool operator==(const HeadGesture&, const HeadGesture&) = default;
};

using Gesture = std::variant<DeixisGesture, StaticIconicGesture,
                             DynamicIconicGesture, HeadGesture>;

// One multimodal move from the human.
struct InputEvent {
  std::uint64_t time = 0;
  std::variant<Utterance, Gesture> payload;

  bool IsSpeech() const { return std::holds_alternative<Utterance>(payload); }
  friend bool operator==(const InputEvent&, const InputEvent&) = default;
};

// Throws Error(kValidation) for deixis with a zero or non-finite direction.
void Validate(const InputEvent& event);

}  // namespace ensemble
