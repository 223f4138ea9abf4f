#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "iu/checkpoint.hpp"
#include "iu/errors.hpp"
#include "iu/rng.hpp"

namespace iu::replay {

// One environment step: the reward vector carries every task's indicator.
struct Transition {
    Eigen::VectorXd s;
    Eigen::Vector2d a;
    Eigen::VectorXd r;       // length T, components in {0,1}
    Eigen::VectorXd s_next;  // same dimension as s
};

// Fixed-capacity FIFO ring; sampling is uniform with replacement.
class ReplayBuffer {
public:
    explicit ReplayBuffer(std::size_t capacity);

    void push(const Transition& t);
    std::vector<Transition> sample(std::size_t batch, RandomStream& rng) const;
    const Transition& sample_one(RandomStream& rng) const;

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

    // FIFO order: 0 is the oldest surviving transition.
    const Transition& at_fifo(std::size_t i) const;

    void dump(ckpt::Container& c, const std::string& prefix) const;
    static ReplayBuffer restore(const ckpt::Container& c, const std::string& prefix);

private:
    std::size_t capacity_;
    std::vector<Transition> store_;
    std::size_t next_ = 0;  // ring write position
    std::size_t size_ = 0;
};

}  // namespace iu::replay
