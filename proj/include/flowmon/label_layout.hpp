#pragma once

#include <string>
#include <vector>

#include "flowmon/model.hpp"

namespace flowmon {

enum class LabelKind { Exact, Summary };

inline const char* to_string(LabelKind k) { return k == LabelKind::Exact ? "exact" : "summary"; }

/// Shape of one shadow label: its kind, the dereference depth it tracks and
/// the carrier type it is stored in.
struct LabelType {
    LabelKind kind = LabelKind::Exact;
    int depth = 0;
    ObjType shape = ObjType::int_type();

    bool operator==(const LabelType&) const = default;
};

inline std::string to_string(const LabelType& l) {
    return std::string("Label ") + (l.kind == LabelKind::Exact ? "Exact" : "Summary") + " " +
           std::to_string(l.depth) + " (" + to_string(l.shape) + ")";
}

inline LabelType ptr_label(const LabelType& t) { return {t.kind, t.depth + 1, ObjType::ptr_to(t.shape)}; }

inline LabelType array_label(std::int64_t len, const LabelType& t) {
    return {t.kind, t.depth, ObjType::array_of(t.shape, len)};
}

inline std::vector<LabelType> labels_aux(const ObjType& t) {
    switch (t.kind()) {
    case ObjType::Kind::Int: return {LabelType{LabelKind::Exact, 0, ObjType::int_type()}};
    case ObjType::Kind::Ptr: {
        // The summary pointer always targets a scalar summary label.
        std::vector<LabelType> out{
            LabelType{LabelKind::Exact, 0, ObjType::int_type()},
            LabelType{LabelKind::Summary, 1, ObjType::ptr_to(ObjType::int_type())},
        };
        for (const auto& l : labels_aux(t.inner())) {
            out.push_back(ptr_label(l));
        }
        return out;
    }
    case ObjType::Kind::Array: {
        std::vector<LabelType> out;
        for (const auto& l : labels_aux(t.inner())) {
            out.push_back(array_label(t.length(), l));
        }
        return out;
    }
    }
    return {};
}

inline std::vector<LabelType> labels(const ObjType& t) {
    auto out = labels_aux(t);
    if (t.is_array()) {
        out.insert(out.begin(), LabelType{LabelKind::Summary, 0, ObjType::int_type()});
    }
    return out;
}

/// Name of the shadow variable for `var` with the given kind and depth.
/// The depth-0 label of a scalar and the summary of an array share `<var>_status`.
inline std::string label_name(const std::string& var, LabelKind kind, int depth, bool array_exact_d0 = false) {
    std::string n = var + "_status";
    if (depth == 0) {
        return array_exact_d0 ? n + "_d0" : n;
    }
    n += "_d" + std::to_string(depth);
    return kind == LabelKind::Summary ? n + "_summary" : n;
}

/// How a shadow declaration is initialized.
enum class LabelInit {
    /// Integer label cells start at the variable's annotation.
    annotation,
    /// Label pointers mirror the variable's initial pointer value.
    mirror,
};

struct LabelDecl {
    std::string name;
    LabelType label;
    LabelInit init = LabelInit::annotation;

    [[nodiscard]] const ObjType& shape() const { return label.shape; }
    [[nodiscard]] std::string c_declaration() const { return flowmon::c_declaration(label.shape, name); }
};

inline std::vector<LabelDecl> label_decls(const std::string& var, const ObjType& t) {
    std::vector<LabelDecl> out;
    for (const auto& l : labels(t)) {
        const bool array_exact_d0 = l.depth == 0 && l.kind == LabelKind::Exact && l.shape.is_array();
        out.push_back(LabelDecl{label_name(var, l.kind, l.depth, array_exact_d0), l,
                                l.depth == 0 ? LabelInit::annotation : LabelInit::mirror});
    }
    return out;
}

/// `<name> : <C type> (kind=…, depth=…)`
inline std::string layout_line(const LabelDecl& d) {
    std::string type = flowmon::c_declaration(d.label.shape, "");
    while (!type.empty() && type.back() == ' ') {
        type.pop_back();
    }
    return d.name + " : " + type + " (kind=" + to_string(d.label.kind) +
           ", depth=" + std::to_string(d.label.depth) + ")";
}

} // namespace flowmon
