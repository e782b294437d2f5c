#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "qubus/phase_space.hpp"

namespace qubus {

/// D(beta) on the bus, independent of the qubits.
struct UncondDisp {
  Complex beta;
};

/// exp(-i theta sigma_z(qubit) a^dag a).
struct CondRot {
  double theta = 0.0;
  std::size_t qubit = 0;
};

/// D(beta sigma_z(qubit)).
struct CondDisp {
  Complex beta;
  std::size_t qubit = 0;
};

/// exp(-i t [eps X(drive_phase) + sign chi sigma_z(qubit) a^dag a]) with
/// X(phi) = a^dag e^{i phi} + a e^{-i phi}.
struct DrivePulse {
  double eps = 0.0;
  double drive_phase = 0.0;
  int sign = +1;
  double duration = 0.0;
  double chi = 0.0;
  std::size_t qubit = 0;
};

using PrimitiveOp = std::variant<UncondDisp, CondRot, CondDisp, DrivePulse>;

struct Primitive {
  PrimitiveOp op;
  std::optional<double> loss;  // beam-splitter reflectivity eta, CondDisp only
};

/// Ordered primitives, applied first to last.
class GateSequence {
 public:
  GateSequence() = default;
  explicit GateSequence(std::vector<Primitive> primitives);

  GateSequence& add(PrimitiveOp op, std::optional<double> loss = std::nullopt);
  GateSequence& append(const GateSequence& other);

  const std::vector<Primitive>& primitives() const { return primitives_; }
  std::size_t size() const { return primitives_.size(); }
  bool empty() const { return primitives_.empty(); }
  const Primitive& operator[](std::size_t i) const { return primitives_[i]; }

  /// Largest qubit index referenced plus one (0 for bus-only sequences).
  std::size_t qubits_referenced() const;
  bool has_loss() const;

  /// Throws std::invalid_argument for negative durations, bad signs, loss
  /// outside [0, 1) or loss on anything but CondDisp, or non-finite values.
  void validate(std::size_t num_qubits) const;

  bool operator==(const GateSequence& other) const;

 private:
  std::vector<Primitive> primitives_;
};

bool operator==(const Primitive& a, const Primitive& b);

/// Line-oriented text form, one primitive per line:
///   uncond_disp beta=<c>
///   cond_rot theta=<r> qubit=<i>
///   cond_disp beta=<c> qubit=<i> [loss=<r>]
///   drive eps=<r> phase=<r> sign=<+1|-1> t=<r> chi=<r> qubit=<i>
/// Complex values use the re+imi form; reals use shortest round-trip digits.
std::string serialize(const GateSequence& seq);

/// Inverse of serialize; '#' starts a comment. Throws ParseError with line context.
GateSequence deserialize(std::string_view text);

}  // namespace qubus
