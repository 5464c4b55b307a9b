#ifndef NETDIFF_ERRORS_HPP
#define NETDIFF_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace netdiff {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read, written or renamed.
class IoError : public Error {
 public:
  using Error::Error;
};

// Input bytes do not follow the expected container format
// (pcap header, image file, profile document).
class FormatError : public Error {
 public:
  using Error::Error;
};

// Input is well-formed but semantically invalid (bad header fields,
// broken invariants, unusable arguments).
class DataError : public Error {
 public:
  using Error::Error;
};

// One rule broken by one packet/row. Shared between the matrix decoder
// and the compliance validator.
struct Violation {
  int packet_index = -1;
  std::string field;
  std::string rule;
  std::string message;
};

// Thrown by decode_packet / decode_flow; carries the full violation list
// so callers can route the row through repair instead.
class DecodeError : public DataError {
 public:
  DecodeError(std::string msg, std::vector<Violation> violations)
      : DataError(std::move(msg)), violations_(std::move(violations)) {}
  const std::vector<Violation>& violations() const { return violations_; }

 private:
  std::vector<Violation> violations_;
};

}  // namespace netdiff

#endif
