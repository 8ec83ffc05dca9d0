#pragma once

#include <stdexcept>
#include <string>

namespace rootrecon {

// A desk-scale size or length guard was exceeded.
class Guard_violation : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent experiment configuration; the message names the key.
class Config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// The observation has zero probability under every candidate root state.
class Impossible_observation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace rootrecon
