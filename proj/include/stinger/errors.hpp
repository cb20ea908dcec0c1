#ifndef STINGER_ERRORS_HPP_
#define STINGER_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace stinger {

// Base for all library errors. Subclasses carry the failing datum in the
// message and, where useful, as a typed field.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

// --- behavior_store ---

class MissingColumn : public Error {
 public:
  explicit MissingColumn(const std::string& column)
      : Error("missing required column: " + column), column_(column) {}
  const std::string& column() const { return column_; }

 private:
  std::string column_;
};

class DuplicateId : public Error {
 public:
  explicit DuplicateId(const std::string& id)
      : Error("duplicate behavior_id: " + id), id_(id) {}
  const std::string& id() const { return id_; }

 private:
  std::string id_;
};

class EmptyText : public Error {
 public:
  explicit EmptyText(size_t row)
      : Error("empty behavior text at row " + std::to_string(row)),
        row_(row) {}
  size_t row() const { return row_; }

 private:
  size_t row_;
};

class UnknownSplit : public Error {
 public:
  explicit UnknownSplit(const std::string& value)
      : Error("unknown split value: " + value), value_(value) {}
  const std::string& value() const { return value_; }

 private:
  std::string value_;
};

// --- suffix_corpus ---

class EmptyFile : public Error {
 public:
  using Error::Error;
};

class EmptySuffix : public Error {
 public:
  using Error::Error;
};

// --- similarity ---

class NoReferences : public Error {
 public:
  NoReferences() : Error("no reference suffixes available") {}
};

class EmptyCandidate : public Error {
 public:
  EmptyCandidate() : Error("candidate token sequence is empty") {}
};

// --- victim gateway ---

class Timeout : public Error {
 public:
  using Error::Error;
};

class RateLimited : public Error {
 public:
  using Error::Error;
};

class UpstreamError : public Error {
 public:
  UpstreamError(int status, const std::string& detail)
      : Error("upstream error (status " + std::to_string(status) + "): " +
              detail),
        status_(status) {}
  int status() const { return status_; }

 private:
  int status_;
};

class AuthMissing : public Error {
 public:
  explicit AuthMissing(const std::string& env_var)
      : Error("missing credential: set " + env_var), env_var_(env_var) {}
  const std::string& env_var() const { return env_var_; }

 private:
  std::string env_var_;
};

// --- judge ---

class JudgeUnavailable : public Error {
 public:
  using Error::Error;
};

// --- rl_core ---

class NoSeeds : public Error {
 public:
  NoSeeds() : Error("seed suffix list is empty") {}
};

class SpanMismatch : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class DegenerateBatch : public Error {
 public:
  using Error::Error;
};

// --- campaign ---

class MissingCheckpoint : public Error {
 public:
  using Error::Error;
};

class MissingArchive : public Error {
 public:
  using Error::Error;
};

class NoScoredOutcomes : public Error {
 public:
  NoScoredOutcomes() : Error("no scored outcomes; cannot compute ASR") {}
};

}  // namespace stinger

#endif  // STINGER_ERRORS_HPP_
