#pragma once

#include <stdexcept>
#include <string>

namespace flowmon {

struct SourcePos {
    int line = 0;
    int col = 0;

    bool operator==(const SourcePos&) const = default;
};

inline std::string to_string(const SourcePos& pos) {
    return std::to_string(pos.line) + ":" + std::to_string(pos.col);
}

/// Base for every diagnosable error. `what()` carries the bare message;
/// `describe()` prefixes the position when one is known.
class Diagnostic : public std::runtime_error {
  public:
    Diagnostic(SourcePos pos, const std::string& message) : std::runtime_error(message), pos_(pos) {}

    [[nodiscard]] SourcePos pos() const { return pos_; }

    [[nodiscard]] std::string describe() const {
        if (pos_.line == 0) {
            return what();
        }
        return to_string(pos_) + ": " + what();
    }

  private:
    SourcePos pos_;
};

class SyntaxError : public Diagnostic {
    using Diagnostic::Diagnostic;
};

class TypeError : public Diagnostic {
    using Diagnostic::Diagnostic;
};

/// Raised by the instrumenter (reserved names, unsupported pointer depth).
class InstrumentError : public Diagnostic {
    using Diagnostic::Diagnostic;
};

enum class FaultKind {
    type_mismatch,
    out_of_bounds,
    uninitialized_deref,
    scalar_pointer_arith,
};

inline const char* to_string(FaultKind k) {
    switch (k) {
    case FaultKind::type_mismatch: return "type mismatch";
    case FaultKind::out_of_bounds: return "index out of bounds";
    case FaultKind::uninitialized_deref: return "dereference of uninitialized pointer";
    case FaultKind::scalar_pointer_arith: return "pointer arithmetic on a scalar location";
    }
    return "fault";
}

/// A way the semantics gets stuck.
class Fault : public Diagnostic {
  public:
    Fault(FaultKind kind, SourcePos pos, const std::string& detail)
        : Diagnostic(pos, std::string(to_string(kind)) + (detail.empty() ? "" : ": " + detail)), kind_(kind) {}

    [[nodiscard]] FaultKind kind() const { return kind_; }

  private:
    FaultKind kind_;
};

} // namespace flowmon
