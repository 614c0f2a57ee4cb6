#ifndef UPLIFTFS_ERROR_H_
#define UPLIFTFS_ERROR_H_

#include <stdexcept>
#include <string>

namespace upliftfs {

// Raised on contract violations and malformed input. The message is meant to
// be shown to a user as-is.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& message) : std::runtime_error(message) {}
};

}  // namespace upliftfs

#endif  // UPLIFTFS_ERROR_H_
