#pragma once

#include <bit>
#include <cstdint>
#include <deque>
#include <functional>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>

namespace npblog {

/// Process-wide string interner. Strings are never released, so ids stay valid
/// for the lifetime of the program and can be compared by integer.
class StringPool {
  public:
    static StringPool& global() {
        static StringPool pool;
        return pool;
    }

    std::int64_t intern(std::string_view text) {
        {
            std::shared_lock lock(mutex_);
            if (auto it = ids_.find(std::string(text)); it != ids_.end()) return it->second;
        }
        std::unique_lock lock(mutex_);
        auto [it, inserted] = ids_.try_emplace(std::string(text), static_cast<std::int64_t>(strings_.size()));
        if (inserted) strings_.emplace_back(text);
        return it->second;
    }

    const std::string& lookup(std::int64_t id) const {
        std::shared_lock lock(mutex_);
        return strings_.at(static_cast<std::size_t>(id));
    }

  private:
    mutable std::shared_mutex mutex_;
    std::unordered_map<std::string, std::int64_t> ids_;
    std::deque<std::string> strings_;
};

inline std::int64_t intern(std::string_view text) { return StringPool::global().intern(text); }
inline const std::string& string_of(std::int64_t id) { return StringPool::global().lookup(id); }

/// A ground value in a possible world. Objects carry their type id and their
/// index inside the type's extension (guaranteed objects) or atom list
/// (unknown objects). Strings are interned ids.
struct Value {
    enum class Kind : std::uint8_t { Null, Bool, Int, Real, Str, Obj };

    Kind kind = Kind::Null;
    std::int32_t type = -1;
    std::int64_t data = 0;

    static constexpr Value null() { return {}; }
    static constexpr Value boolean(bool b) { return {Kind::Bool, -1, b ? 1 : 0}; }
    static constexpr Value integer(std::int64_t v) { return {Kind::Int, -1, v}; }
    static Value real(double v) { return {Kind::Real, -1, std::bit_cast<std::int64_t>(v)}; }
    static Value str(std::string_view s) { return {Kind::Str, -1, intern(s)}; }
    static constexpr Value str_id(std::int64_t id) { return {Kind::Str, -1, id}; }
    static constexpr Value object(std::int32_t type_id, std::int64_t index) { return {Kind::Obj, type_id, index}; }

    bool is_null() const { return kind == Kind::Null; }
    double as_real() const { return std::bit_cast<double>(data); }
    bool truthy() const { return kind != Kind::Null && data != 0; }

    friend bool operator==(const Value&, const Value&) = default;
    friend auto operator<=>(const Value&, const Value&) = default;
};

/// Equality used by formulas: an object compares equal to an integer literal
/// naming its index, so `t = 0` works on guaranteed time steps.
inline bool loosely_equal(const Value& a, const Value& b) {
    if (a.kind == Value::Kind::Obj && b.kind == Value::Kind::Int) return a.data == b.data;
    if (a.kind == Value::Kind::Int && b.kind == Value::Kind::Obj) return a.data == b.data;
    return a == b;
}

struct ValueHash {
    std::size_t operator()(const Value& v) const noexcept {
        return std::hash<std::int64_t>{}(v.data * 1315423911LL + v.type * 31 + static_cast<int>(v.kind));
    }
};

}  // namespace npblog
