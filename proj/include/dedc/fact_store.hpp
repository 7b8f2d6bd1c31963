#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dedc/layout.hpp"

namespace dedc {

class FactStoreError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EncodeError : public FactStoreError {
public:
    using FactStoreError::FactStoreError;
};

class BufferOverflow : public FactStoreError {
public:
    BufferOverflow(std::string predicate, std::size_t used, std::size_t capacity);

    const std::string& predicate() const { return predicate_; }
    std::size_t used() const { return used_; }
    std::size_t capacity() const { return capacity_; }

private:
    std::string predicate_;
    std::size_t used_;
    std::size_t capacity_;
};

/// Big-endian. `byte` and `unsigned long` are plain binary; `int` is sign-magnitude (top bit sign,
/// 15 bits magnitude), so -12 is 0x80 0x0C and -32768 cannot be stored.
std::vector<std::uint8_t> encode_value(ValueType t, std::int64_t v);
void encode_value_into(ValueType t, std::int64_t v, std::span<std::uint8_t> out);
/// Every byte pattern decodes; the negative zero 0x80 0x00 reads as 0.
std::int64_t decode_value(ValueType t, std::span<const std::uint8_t> bytes);

enum class BufferId { Current, Next };

/// Two equally sized byte buffers holding packed facts for the current and the next timestamp.
/// A fact is its predicate number followed by its encoded arguments; facts sit back to back from
/// offset 0 and the unused tail is zero.
class FactStore {
public:
    explicit FactStore(const CompileLayout& layout);
    FactStore(std::vector<PredicateLayout> predicates, std::size_t buffer_size);

    /// Appends the fact unless an identical one is already stored. Throws BufferOverflow when the
    /// free tail is too short and EncodeError when an argument is not representable.
    bool insert_fact(BufferId buffer, std::uint8_t predicate, std::span<const std::int64_t> args);

    /// First fact at or after `start` with the given predicate whose `b` arguments equal
    /// `bound_values` (in order). `pattern` has one `b`/`f` per argument, or is `x` for nullary
    /// predicates.
    std::optional<std::size_t> find_fact(BufferId buffer, std::uint8_t predicate, std::string_view pattern,
                                         std::span<const std::int64_t> bound_values, std::size_t start = 0) const;

    std::int64_t read_arg(BufferId buffer, std::size_t offset, std::size_t arg_index) const;

    /// The next buffer becomes current; the old current buffer is zeroed and becomes next.
    void switch_buffers();

    std::span<const std::uint8_t> bytes(BufferId buffer) const { return buf(buffer); }
    std::size_t buffer_size() const { return size_; }
    std::size_t used_bytes(BufferId buffer) const;
    std::size_t fact_size_at(BufferId buffer, std::size_t offset) const;

    struct StoredFact {
        std::uint8_t predicate = 0;
        std::vector<std::int64_t> args;
        std::size_t offset = 0;
    };
    /// Facts in storage order.
    std::vector<StoredFact> facts(BufferId buffer) const;
    std::size_t fact_count(BufferId buffer) const { return facts(buffer).size(); }

    /// `p(1000), q(42,12)`: sorted by predicate number then argument bytes.
    std::string dump(BufferId buffer) const;

    const PredicateLayout& predicate(std::uint8_t number) const { return predicates_.at(number - 1u); }
    const std::vector<PredicateLayout>& predicates() const { return predicates_; }

private:
    const std::vector<std::uint8_t>& buf(BufferId b) const { return b == BufferId::Current ? current_ : next_; }
    std::vector<std::uint8_t>& buf(BufferId b) { return b == BufferId::Current ? current_ : next_; }

    std::vector<PredicateLayout> predicates_;
    std::size_t size_;
    std::vector<std::uint8_t> current_;
    std::vector<std::uint8_t> next_;
};

}  // namespace dedc
