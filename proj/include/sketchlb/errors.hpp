#pragma once

#include <stdexcept>
#include <string>

namespace sketchlb {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class GraphError : public Error {
 public:
  using Error::Error;
};

class UnknownNode : public GraphError {
 public:
  explicit UnknownNode(long id)
      : GraphError("unknown node id " + std::to_string(id)), id_(id) {}
  long id() const noexcept { return id_; }

 private:
  long id_;
};

class EncodingOverflow : public Error {
 public:
  EncodingOverflow(long node, std::size_t bits, std::size_t max_bits)
      : Error("node " + std::to_string(node) + " emitted " + std::to_string(bits) +
              " bits, budget is " + std::to_string(max_bits)) {}
};

class DecodeError : public Error {
 public:
  using Error::Error;
};

class TooSmall : public Error {
 public:
  TooSmall() : Error("minimum cut needs at least two nodes") {}
};

class DeterminismRequired : public Error {
 public:
  explicit DeterminismRequired(const std::string& protocol)
      : Error("protocol '" + protocol + "' is randomized; a deterministic protocol is required") {}
};

/// Invalid lower-bound graph description. `rule()` names the violated rule
/// (E1..E5, C0/C1, sizes, partition, roles, k-range).
class SpecError : public Error {
 public:
  SpecError(std::string rule, const std::string& what)
      : Error(rule + ": " + what), rule_(std::move(rule)) {}
  const std::string& rule() const noexcept { return rule_; }

 private:
  std::string rule_;
};

class FamilyTooSparse : public Error {
 public:
  FamilyTooSparse(std::size_t best, std::size_t target)
      : Error("set family reached only " + std::to_string(best) + " of " +
              std::to_string(target) + " members"),
        best_(best) {}
  std::size_t best() const noexcept { return best_; }

 private:
  std::size_t best_;
};

class NoGoodPartition : public Error {
 public:
  NoGoodPartition() : Error("no node has an indistinguishable separated pair in any trial") {}
};

/// Invalid UniqueOverlap instance. `property()` is P1, P2, support-size,
/// length or s-range.
class InvalidInstance : public Error {
 public:
  InvalidInstance(std::string property, const std::string& what)
      : Error(property + ": " + what), property_(std::move(property)) {}
  const std::string& property() const noexcept { return property_; }

 private:
  std::string property_;
};

class HypothesisViolated : public Error {
 public:
  using Error::Error;
};

class BlockPropertyViolated : public Error {
 public:
  using Error::Error;
};

class NotEnoughGoodNodes : public Error {
 public:
  NotEnoughGoodNodes(std::size_t found, std::size_t needed)
      : Error("found " + std::to_string(found) + " good nodes, need " + std::to_string(needed)),
        found_(found),
        needed_(needed) {}
  std::size_t found() const noexcept { return found_; }
  std::size_t needed() const noexcept { return needed_; }

 private:
  std::size_t found_;
  std::size_t needed_;
};

}  // namespace sketchlb
