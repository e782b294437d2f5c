#include "qubus/sequence.hpp"

#include <cmath>
#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>
#include <stdexcept>

#include "qubus/errors.hpp"
#include "qubus/text.hpp"

namespace qubus {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool finite(Complex z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

GateSequence::GateSequence(std::vector<Primitive> primitives)
    : primitives_(std::move(primitives)) {}

GateSequence& GateSequence::add(PrimitiveOp op, std::optional<double> loss) {
  primitives_.push_back({std::move(op), loss});
  return *this;
}

GateSequence& GateSequence::append(const GateSequence& other) {
  primitives_.insert(primitives_.end(), other.primitives_.begin(), other.primitives_.end());
  return *this;
}

std::size_t GateSequence::qubits_referenced() const {
  std::size_t n = 0;
  for (const auto& p : primitives_) {
    std::visit(Overloaded{[](const UncondDisp&) {},
                          [&](const auto& op) { n = std::max(n, op.qubit + 1); }},
               p.op);
  }
  return n;
}

bool GateSequence::has_loss() const {
  for (const auto& p : primitives_) {
    if (p.loss && *p.loss != 0.0) return true;
  }
  return false;
}

void GateSequence::validate(std::size_t num_qubits) const {
  for (std::size_t i = 0; i < primitives_.size(); ++i) {
    const auto& p = primitives_[i];
    const std::string where = "primitive " + std::to_string(i) + ": ";
    std::visit(Overloaded{
                   [&](const UncondDisp& op) {
                     if (!finite(op.beta)) throw std::invalid_argument(where + "non-finite beta");
                   },
                   [&](const CondRot& op) {
                     if (!std::isfinite(op.theta)) {
                       throw std::invalid_argument(where + "non-finite theta");
                     }
                   },
                   [&](const CondDisp& op) {
                     if (!finite(op.beta)) throw std::invalid_argument(where + "non-finite beta");
                   },
                   [&](const DrivePulse& op) {
                     if (!std::isfinite(op.eps) || !std::isfinite(op.chi) ||
                         !std::isfinite(op.duration) || !std::isfinite(op.drive_phase)) {
                       throw std::invalid_argument(where + "non-finite drive parameter");
                     }
                     if (op.duration < 0.0) throw std::invalid_argument(where + "negative duration");
                     if (op.sign != 1 && op.sign != -1) {
                       throw std::invalid_argument(where + "sign must be +1 or -1");
                     }
                   }},
               p.op);
    std::visit(Overloaded{[](const UncondDisp&) {},
                          [&](const auto& op) {
                            if (op.qubit >= num_qubits) {
                              throw IndexError(where + "qubit " + std::to_string(op.qubit) +
                                               " out of range");
                            }
                          }},
               p.op);
    if (p.loss) {
      if (!std::holds_alternative<CondDisp>(p.op)) {
        throw std::invalid_argument(where + "loss annotations apply to cond_disp only");
      }
      if (!(*p.loss >= 0.0 && *p.loss < 1.0)) {
        throw InvalidEta(where + "eta must lie in [0, 1)");
      }
    }
  }
}

bool operator==(const Primitive& a, const Primitive& b) {
  if (a.loss != b.loss || a.op.index() != b.op.index()) return false;
  return std::visit(
      Overloaded{
          [&](const UncondDisp& x) { return x.beta == std::get<UncondDisp>(b.op).beta; },
          [&](const CondRot& x) {
            const auto& y = std::get<CondRot>(b.op);
            return x.theta == y.theta && x.qubit == y.qubit;
          },
          [&](const CondDisp& x) {
            const auto& y = std::get<CondDisp>(b.op);
            return x.beta == y.beta && x.qubit == y.qubit;
          },
          [&](const DrivePulse& x) {
            const auto& y = std::get<DrivePulse>(b.op);
            return x.eps == y.eps && x.drive_phase == y.drive_phase && x.sign == y.sign &&
                   x.duration == y.duration && x.chi == y.chi && x.qubit == y.qubit;
          }},
      a.op);
}

bool GateSequence::operator==(const GateSequence& other) const {
  return primitives_ == other.primitives_;
}

std::string serialize(const GateSequence& seq) {
  std::ostringstream out;
  for (const auto& p : seq.primitives()) {
    std::visit(Overloaded{
                   [&](const UncondDisp& op) { out << "uncond_disp beta=" << format_complex(op.beta); },
                   [&](const CondRot& op) {
                     out << "cond_rot theta=" << format_real(op.theta) << " qubit=" << op.qubit;
                   },
                   [&](const CondDisp& op) {
                     out << "cond_disp beta=" << format_complex(op.beta) << " qubit=" << op.qubit;
                   },
                   [&](const DrivePulse& op) {
                     out << "drive eps=" << format_real(op.eps)
                         << " phase=" << format_real(op.drive_phase)
                         << " sign=" << (op.sign > 0 ? "+1" : "-1")
                         << " t=" << format_real(op.duration) << " chi=" << format_real(op.chi)
                         << " qubit=" << op.qubit;
                   }},
               p.op);
    if (p.loss) out << " loss=" << format_real(*p.loss);
    out << '\n';
  }
  return out.str();
}

namespace {

class LineFields {
 public:
  LineFields(std::map<std::string, std::string> fields, std::size_t line)
      : fields_(std::move(fields)), line_(line) {}

  const std::string& raw(const std::string& key) {
    auto it = fields_.find(key);
    if (it == fields_.end()) fail("missing field '" + key + "'");
    used_.push_back(key);
    return it->second;
  }
  bool has(const std::string& key) const { return fields_.count(key) != 0; }

  double real(const std::string& key) {
    try {
      return parse_real(raw(key));
    } catch (const ParseError& e) {
      fail(key + ": " + e.what());
    }
  }
  Complex complex(const std::string& key) {
    try {
      return parse_complex(raw(key));
    } catch (const ParseError& e) {
      fail(key + ": " + e.what());
    }
  }
  std::size_t index(const std::string& key) {
    const auto& text = raw(key);
    std::size_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
      fail(key + ": invalid index '" + text + "'");
    }
    return value;
  }
  void finish() const {
    for (const auto& [key, value] : fields_) {
      if (std::find(used_.begin(), used_.end(), key) == used_.end()) {
        fail("unknown field '" + key + "'");
      }
    }
  }
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("sequence line " + std::to_string(line_) + ": " + msg);
  }

 private:
  std::map<std::string, std::string> fields_;
  std::vector<std::string> used_;
  std::size_t line_;
};

}  // namespace

GateSequence deserialize(std::string_view text) {
  GateSequence seq;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) {
      if (end == text.size()) break;
      continue;
    }

    std::istringstream tokens{std::string(line)};
    std::string kind;
    tokens >> kind;
    std::map<std::string, std::string> fields;
    std::string token;
    while (tokens >> token) {
      const auto eq = token.find('=');
      if (eq == std::string::npos || eq == 0) {
        throw ParseError("sequence line " + std::to_string(line_no) + ": malformed token '" +
                         token + "'");
      }
      if (!fields.emplace(token.substr(0, eq), token.substr(eq + 1)).second) {
        throw ParseError("sequence line " + std::to_string(line_no) + ": duplicate field '" +
                         token.substr(0, eq) + "'");
      }
    }
    LineFields f(std::move(fields), line_no);
    std::optional<double> loss;
    if (f.has("loss")) loss = f.real("loss");

    if (kind == "uncond_disp") {
      seq.add(UncondDisp{f.complex("beta")}, loss);
    } else if (kind == "cond_rot") {
      seq.add(CondRot{f.real("theta"), f.index("qubit")}, loss);
    } else if (kind == "cond_disp") {
      seq.add(CondDisp{f.complex("beta"), f.index("qubit")}, loss);
    } else if (kind == "drive") {
      DrivePulse pulse;
      pulse.eps = f.real("eps");
      pulse.drive_phase = f.real("phase");
      const auto& sign = f.raw("sign");
      if (sign == "+1" || sign == "1") {
        pulse.sign = 1;
      } else if (sign == "-1") {
        pulse.sign = -1;
      } else {
        f.fail("sign must be +1 or -1");
      }
      pulse.duration = f.real("t");
      pulse.chi = f.real("chi");
      pulse.qubit = f.index("qubit");
      seq.add(pulse, loss);
    } else {
      f.fail("unknown primitive '" + kind + "'");
    }
    f.finish();
    if (end == text.size()) break;
  }
  return seq;
}

}  // namespace qubus
