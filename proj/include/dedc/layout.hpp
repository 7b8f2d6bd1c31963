#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "dedc/ast.hpp"

namespace dedc {

inline constexpr std::size_t kDefaultBufferSize = 400;
inline constexpr std::size_t kMaxPredicates = 255;
inline constexpr std::size_t kMaxFactSize = 255;

struct PredicateLayout {
    std::string name;
    std::uint8_t number = 0;  // tag byte, >= 1
    std::vector<ValueType> arg_types;
    std::size_t fact_size = 1;

    std::size_t arity() const { return arg_types.size(); }
    /// Byte offset of argument `index` inside a stored fact.
    std::size_t arg_offset(std::size_t index) const;
};

/// Everything the store and the code generator need to know about physical fact placement.
struct CompileLayout {
    std::vector<PredicateLayout> predicates;  // predicates[i].number == i + 1
    std::map<std::string, std::set<std::string>> binding_patterns;
    std::size_t buffer_size = kDefaultBufferSize;

    const PredicateLayout* find(std::string_view name) const;
    const PredicateLayout& by_number(std::uint8_t number) const { return predicates.at(number - 1u); }

    void register_pattern(const std::string& predicate, std::string pattern) {
        binding_patterns[predicate].insert(std::move(pattern));
    }

    /// One `b` per argument; nullary predicates use `x`.
    static std::string all_bound(std::size_t arity) { return arity == 0 ? "x" : std::string(arity, 'b'); }
    static std::string all_free(std::size_t arity) { return arity == 0 ? "x" : std::string(arity, 'f'); }
};

}  // namespace dedc
