#pragma once

#include <functional>
#include <utility>

// Continuation-passing combinators. A computation producing an A, with final
// answer type R, is a function that takes "what to do next" (A -> R).
namespace ensemble::cps {

template <typename A, typename R>
using Comp = std::function<R(std::function<R(A)>)>;

template <typename R, typename A>
Comp<A, R> Pure(A value) {
  return [value = std::move(value)](std::function<R(A)> k) { return k(value); };
}

// cpsApply m n = \k -> n (\b -> m (\a -> k (a b)))
template <typename A, typename B, typename R>
Comp<B, R> Apply(Comp<std::function<B(A)>, R> m, Comp<A, R> n) {
  return [m = std::move(m), n = std::move(n)](std::function<R(B)> k) {
    return n([&](A b) {
      return m([&](std::function<B(A)> a) { return k(a(std::move(b))); });
    });
  };
}

// Runs a computation whose answer type equals its result type.
template <typename A>
A Run(const Comp<A, A>& computation) {
  return computation([](A a) { return a; });
}

}  // namespace ensemble::cps
