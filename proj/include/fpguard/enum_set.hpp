#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <iterator>

namespace fpguard {

/// Set of enumerators of a closed enum with at most 64 values, stored as a
/// bitmask. Iteration is in enumerator order.
template <typename E, std::size_t N>
class EnumSet {
    static_assert(N <= 64);

public:
    class iterator {
    public:
        using iterator_category = std::forward_iterator_tag;
        using value_type = E;
        using difference_type = std::ptrdiff_t;
        using pointer = const E*;
        using reference = E;

        iterator() = default;
        explicit iterator(std::uint64_t rest) : rest_(rest) {}
        E operator*() const { return static_cast<E>(std::countr_zero(rest_)); }
        iterator& operator++() {
            rest_ &= rest_ - 1;
            return *this;
        }
        iterator operator++(int) {
            auto copy = *this;
            ++*this;
            return copy;
        }
        bool operator==(const iterator&) const = default;

    private:
        std::uint64_t rest_ = 0;
    };

    constexpr EnumSet() = default;
    constexpr EnumSet(std::initializer_list<E> items) {
        for (auto e : items) insert(e);
    }
    static constexpr EnumSet from_bits(std::uint64_t bits) {
        EnumSet s;
        s.bits_ = bits & mask();
        return s;
    }

    constexpr void insert(E e) { bits_ |= bit(e); }
    constexpr void erase(E e) { bits_ &= ~bit(e); }
    constexpr bool contains(E e) const { return (bits_ & bit(e)) != 0; }
    constexpr bool empty() const { return bits_ == 0; }
    constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(bits_)); }
    constexpr std::uint64_t bits() const { return bits_; }

    constexpr EnumSet operator|(EnumSet o) const { return from_bits(bits_ | o.bits_); }
    constexpr EnumSet operator&(EnumSet o) const { return from_bits(bits_ & o.bits_); }
    constexpr EnumSet operator-(EnumSet o) const { return from_bits(bits_ & ~o.bits_); }
    constexpr EnumSet& operator|=(EnumSet o) {
        bits_ |= o.bits_;
        return *this;
    }
    constexpr bool operator==(const EnumSet&) const = default;

    iterator begin() const { return iterator(bits_); }
    iterator end() const { return iterator(0); }

private:
    static constexpr std::uint64_t mask() { return N == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << N) - 1; }
    static constexpr std::uint64_t bit(E e) { return std::uint64_t{1} << static_cast<unsigned>(e); }

    std::uint64_t bits_ = 0;
};

}  // namespace fpguard
