#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "dedc/ast.hpp"

namespace dedc {

/// Width and signedness in which a comparison is evaluated. Mirrors C on a 16-bit-int target:
/// `byte` and `int` operands compute as a 16-bit signed int; any `unsigned long` operand, or a
/// constant outside the 16-bit range, moves the whole comparison to 32-bit unsigned.
/// Both widths wrap.
enum class ArithDomain : std::uint8_t { Int16, UInt32 };

inline std::int16_t wrap_int16(std::uint32_t raw) {
    raw &= 0xFFFFu;
    return static_cast<std::int16_t>((raw & 0x8000u) ? static_cast<std::int32_t>(raw) - 0x10000 : static_cast<std::int32_t>(raw));
}

/// `var_type(name)` yields the variable's value type.
template <class VarType>
ArithDomain expr_domain(const Expr& e, const VarType& var_type) {
    if (e.is_leaf()) {
        const Term& t = *e.leaf;
        if (t.is_variable()) {
            std::optional<ValueType> vt = var_type(t.var_name());
            return vt == ValueType::ULong ? ArithDomain::UInt32 : ArithDomain::Int16;
        }
        if (t.is_integer()) {
            std::int64_t v = t.integer_value();
            return (v < -32768 || v > 32767) ? ArithDomain::UInt32 : ArithDomain::Int16;
        }
        return ArithDomain::Int16;
    }
    for (const auto& c : e.children)
        if (expr_domain(c, var_type) == ArithDomain::UInt32) return ArithDomain::UInt32;
    return ArithDomain::Int16;
}

template <class VarType>
ArithDomain comparison_domain(const Comparison& c, const VarType& var_type) {
    if (expr_domain(c.lhs, var_type) == ArithDomain::UInt32 || expr_domain(c.rhs, var_type) == ArithDomain::UInt32)
        return ArithDomain::UInt32;
    return ArithDomain::Int16;
}

/// Evaluates modulo 2^32; `term_value(t)` supplies leaf values. Narrowing to the domain happens at
/// comparison time, which is exact for +, - and * because 2^16 divides 2^32.
template <class TermValue>
std::uint32_t eval_raw(const Expr& e, const TermValue& term_value) {
    if (e.is_leaf()) return static_cast<std::uint32_t>(static_cast<std::int64_t>(term_value(*e.leaf)));
    std::uint32_t a = eval_raw(e.children[0], term_value);
    std::uint32_t b = eval_raw(e.children[1], term_value);
    switch (e.op) {
        case ArithOp::Add: return a + b;
        case ArithOp::Sub: return a - b;
        case ArithOp::Mul: return a * b;
    }
    return 0;
}

template <class T>
bool apply_compare(CompareOp op, T a, T b) {
    switch (op) {
        case CompareOp::Less: return a < b;
        case CompareOp::LessEq: return a <= b;
        case CompareOp::Greater: return a > b;
        case CompareOp::GreaterEq: return a >= b;
        case CompareOp::Equal: return a == b;
        case CompareOp::NotEqual: return a != b;
    }
    return false;
}

inline bool compare_raw(ArithDomain domain, CompareOp op, std::uint32_t lhs, std::uint32_t rhs) {
    if (domain == ArithDomain::Int16) return apply_compare(op, wrap_int16(lhs), wrap_int16(rhs));
    return apply_compare(op, lhs, rhs);
}

/// Converts a value produced by C code into the variable's storage type the way a C assignment
/// would (modulo the type's width, two's complement for `int`).
inline std::int64_t convert_to(ValueType t, std::int64_t v) {
    switch (t) {
        case ValueType::Byte: return static_cast<std::int64_t>(static_cast<std::uint64_t>(v) & 0xFFu);
        case ValueType::Int: return wrap_int16(static_cast<std::uint32_t>(v));
        case ValueType::ULong: return static_cast<std::int64_t>(static_cast<std::uint64_t>(v) & 0xFFFFFFFFu);
    }
    return v;
}

}  // namespace dedc
