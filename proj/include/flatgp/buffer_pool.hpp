#pragma once

#include "flatgp/opcodes.hpp"

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace flatgp {

struct BufferHandle {
    std::uint32_t index = 0;
    std::uint32_t generation = 0;

    friend bool operator==(const BufferHandle&, const BufferHandle&) = default;
};

// A fixed number of fixed size genome buffers allocated once, up front.
// acquire/release may be called from concurrent workers. Exhaustion is an
// error rather than a wait: the breeding scheduler guarantees the bound.
class BufferPool {
public:
    BufferPool(std::size_t capacity, std::size_t buffer_size);

    BufferPool(const BufferPool&) = delete;
    BufferPool& operator=(const BufferPool&) = delete;

    BufferHandle acquire();
    void release(BufferHandle h);

    // Whole buffer; bytes past the genome length are junk. Throws
    // AccountingError for a handle that is no longer held.
    std::span<Code> data(BufferHandle h);
    std::span<const Code> data(BufferHandle h) const;

    bool is_held(BufferHandle h) const;

    std::size_t capacity() const { return capacity_; }
    std::size_t buffer_size() const { return buffer_size_; }
    std::size_t in_use() const;
    std::size_t peak() const;

    // Peak since the last begin_window(); starts at the current in_use.
    std::size_t window_peak() const;
    void begin_window();

private:
    void check(BufferHandle h) const;

    std::size_t capacity_;
    std::size_t buffer_size_;
    std::unique_ptr<Code[]> storage_;
    // Odd generation = held. Bumped on every acquire and release.
    std::unique_ptr<std::atomic<std::uint32_t>[]> generation_;

    mutable std::mutex mutex_;
    std::vector<std::uint32_t> free_;
    std::size_t in_use_ = 0;
    std::size_t peak_ = 0;
    std::size_t window_peak_ = 0;
};

// Variable size opcode fragments held on the heap, one slot per child.
// Distinct slots may be filled and dropped concurrently.
class FragmentStore {
public:
    explicit FragmentStore(std::size_t slots = 0) : fragments_(slots) { }

    void reset(std::size_t slots);

    void put(std::size_t slot, TreeView fragment);
    void put(std::size_t slot, std::vector<Code>&& fragment);
    TreeView get(std::size_t slot) const;
    bool has(std::size_t slot) const { return slot < fragments_.size() && held_bytes(slot) > 0; }
    void drop(std::size_t slot);

    std::size_t slots() const { return fragments_.size(); }
    std::size_t total_bytes() const { return total_bytes_.load(std::memory_order_relaxed); }

private:
    std::size_t held_bytes(std::size_t slot) const { return fragments_[slot].size(); }

    std::vector<std::vector<Code>> fragments_;
    std::atomic<std::size_t> total_bytes_ { 0 };
};

} // namespace flatgp
