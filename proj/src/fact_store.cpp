#include "dedc/fact_store.hpp"

#include <algorithm>

namespace dedc {

std::size_t PredicateLayout::arg_offset(std::size_t index) const {
    std::size_t off = 1;
    for (std::size_t i = 0; i < index; ++i) off += value_width(arg_types[i]);
    return off;
}

const PredicateLayout* CompileLayout::find(std::string_view name) const {
    for (const auto& p : predicates)
        if (p.name == name) return &p;
    return nullptr;
}

BufferOverflow::BufferOverflow(std::string predicate, std::size_t used, std::size_t capacity)
    : FactStoreError("buffer overflow inserting " + predicate + " (" + std::to_string(used) + "/" +
                     std::to_string(capacity) + " bytes used)"),
      predicate_(std::move(predicate)),
      used_(used),
      capacity_(capacity) {}

void encode_value_into(ValueType t, std::int64_t v, std::span<std::uint8_t> out) {
    if (!representable(t, v)) {
        throw EncodeError("value " + std::to_string(v) + " is not representable as " + std::string(type_name(t)));
    }
    std::uint32_t raw;
    if (t == ValueType::Int) {
        raw = v < 0 ? (0x8000u | static_cast<std::uint32_t>(-v)) : static_cast<std::uint32_t>(v);
    } else {
        raw = static_cast<std::uint32_t>(v);
    }
    const std::size_t w = value_width(t);
    for (std::size_t i = 0; i < w; ++i) out[i] = static_cast<std::uint8_t>(raw >> (8 * (w - 1 - i)));
}

std::vector<std::uint8_t> encode_value(ValueType t, std::int64_t v) {
    std::vector<std::uint8_t> out(value_width(t));
    encode_value_into(t, v, out);
    return out;
}

std::int64_t decode_value(ValueType t, std::span<const std::uint8_t> bytes) {
    std::uint32_t raw = 0;
    for (std::size_t i = 0; i < value_width(t); ++i) raw = (raw << 8) | bytes[i];
    if (t == ValueType::Int) {
        std::int64_t magnitude = raw & 0x7FFFu;
        return (raw & 0x8000u) ? -magnitude : magnitude;
    }
    return raw;
}

FactStore::FactStore(const CompileLayout& layout) : FactStore(layout.predicates, layout.buffer_size) {}

FactStore::FactStore(std::vector<PredicateLayout> predicates, std::size_t buffer_size)
    : predicates_(std::move(predicates)), size_(buffer_size), current_(buffer_size, 0), next_(buffer_size, 0) {}

std::size_t FactStore::fact_size_at(BufferId buffer, std::size_t offset) const {
    return predicate(buf(buffer)[offset]).fact_size;
}

std::size_t FactStore::used_bytes(BufferId buffer) const {
    const auto& b = buf(buffer);
    std::size_t off = 0;
    while (off < size_ && b[off] != 0) off += fact_size_at(buffer, off);
    return off;
}

bool FactStore::insert_fact(BufferId buffer, std::uint8_t predicate_number, std::span<const std::int64_t> args) {
    const PredicateLayout& pred = predicate(predicate_number);
    std::vector<std::uint8_t> encoded(pred.fact_size);
    encoded[0] = predicate_number;
    for (std::size_t i = 0; i < pred.arity(); ++i) {
        encode_value_into(pred.arg_types[i], args[i],
                          std::span<std::uint8_t>(encoded).subspan(pred.arg_offset(i), value_width(pred.arg_types[i])));
    }

    auto& b = buf(buffer);
    std::size_t off = 0;
    while (off < size_ && b[off] != 0) {
        std::size_t sz = fact_size_at(buffer, off);
        if (b[off] == predicate_number && std::equal(encoded.begin(), encoded.end(), b.begin() + off)) return false;
        off += sz;
    }
    if (off + encoded.size() > size_) throw BufferOverflow(pred.name, off, size_);
    std::copy(encoded.begin(), encoded.end(), b.begin() + off);
    return true;
}

std::optional<std::size_t> FactStore::find_fact(BufferId buffer, std::uint8_t predicate_number,
                                                std::string_view pattern, std::span<const std::int64_t> bound_values,
                                                std::size_t start) const {
    const PredicateLayout& pred = predicate(predicate_number);
    // Encode the bound arguments once; a value outside the column's range can never match.
    std::vector<std::pair<std::size_t, std::vector<std::uint8_t>>> probes;
    std::size_t next_bound = 0;
    for (std::size_t i = 0; i < pred.arity(); ++i) {
        if (pattern[i] != 'b') continue;
        std::int64_t v = bound_values[next_bound++];
        if (!representable(pred.arg_types[i], v)) return std::nullopt;
        probes.emplace_back(pred.arg_offset(i), encode_value(pred.arg_types[i], v));
    }

    const auto& b = buf(buffer);
    std::size_t off = start;
    while (off < size_ && b[off] != 0) {
        if (b[off] == predicate_number) {
            bool match = std::all_of(probes.begin(), probes.end(), [&](const auto& probe) {
                return std::equal(probe.second.begin(), probe.second.end(), b.begin() + off + probe.first);
            });
            if (match) return off;
        }
        off += fact_size_at(buffer, off);
    }
    return std::nullopt;
}

std::int64_t FactStore::read_arg(BufferId buffer, std::size_t offset, std::size_t arg_index) const {
    const auto& b = buf(buffer);
    const PredicateLayout& pred = predicate(b[offset]);
    const ValueType t = pred.arg_types.at(arg_index);
    return decode_value(t, std::span<const std::uint8_t>(b).subspan(offset + pred.arg_offset(arg_index), value_width(t)));
}

void FactStore::switch_buffers() {
    std::swap(current_, next_);
    std::fill(next_.begin(), next_.end(), std::uint8_t{0});
}

std::vector<FactStore::StoredFact> FactStore::facts(BufferId buffer) const {
    std::vector<StoredFact> out;
    const auto& b = buf(buffer);
    std::size_t off = 0;
    while (off < size_ && b[off] != 0) {
        StoredFact f{b[off], {}, off};
        const PredicateLayout& pred = predicate(b[off]);
        for (std::size_t i = 0; i < pred.arity(); ++i) f.args.push_back(read_arg(buffer, off, i));
        out.push_back(std::move(f));
        off += pred.fact_size;
    }
    return out;
}

std::string FactStore::dump(BufferId buffer) const {
    const auto& b = buf(buffer);
    auto all = facts(buffer);
    std::sort(all.begin(), all.end(), [&](const StoredFact& x, const StoredFact& y) {
        auto xs = b.begin() + x.offset;
        auto ys = b.begin() + y.offset;
        return std::lexicographical_compare(xs, xs + predicate(x.predicate).fact_size, ys,
                                            ys + predicate(y.predicate).fact_size);
    });
    std::string out;
    for (const auto& f : all) {
        if (!out.empty()) out += ", ";
        out += predicate(f.predicate).name;
        if (!f.args.empty()) {
            out += '(';
            for (std::size_t i = 0; i < f.args.size(); ++i) {
                if (i) out += ',';
                out += std::to_string(f.args[i]);
            }
            out += ')';
        }
    }
    return out;
}

}  // namespace dedc
