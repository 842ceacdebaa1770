#ifndef TOMOLAB_ERRORS_HPP
#define TOMOLAB_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace tomolab {

/// Malformed or inconsistent experiment configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear solve or factorization that could not be carried out.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Classifier cannot run on the given input (e.g. 2-means with fewer than
/// three pair values).
class UnsupportedMethod : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tomolab

#endif  // TOMOLAB_ERRORS_HPP
