#include "iu/replay.hpp"

#include <string>

namespace iu::replay {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
    if (capacity == 0) throw ConfigError("ReplayBuffer: capacity must be positive");
    store_.reserve(capacity);
}

void ReplayBuffer::push(const Transition& t) {
    if (t.s.size() != t.s_next.size())
        throw ShapeError("replay push: s and s_next dimensions differ");
    if (size_ > 0) {
        const Transition& first = store_[0];
        if (t.s.size() != first.s.size() || t.r.size() != first.r.size())
            throw ShapeError("replay push: transition shape does not match buffer contents");
    }
    if (store_.size() < capacity_) {
        store_.push_back(t);
    } else {
        store_[next_] = t;
    }
    next_ = (next_ + 1) % capacity_;
    size_ = store_.size();
}

const Transition& ReplayBuffer::sample_one(RandomStream& rng) const {
    if (size_ == 0) throw ConfigError("replay sample: buffer is empty");
    return store_[static_cast<std::size_t>(rng.uniform_int(static_cast<int>(size_)))];
}

std::vector<Transition> ReplayBuffer::sample(std::size_t batch, RandomStream& rng) const {
    if (batch == 0) throw ConfigError("replay sample: batch must be positive");
    if (size_ == 0) throw ConfigError("replay sample: buffer is empty");
    std::vector<Transition> out;
    out.reserve(batch);
    for (std::size_t i = 0; i < batch; ++i) out.push_back(sample_one(rng));
    return out;
}

const Transition& ReplayBuffer::at_fifo(std::size_t i) const {
    if (i >= size_) throw ShapeError("replay at_fifo: index out of range");
    if (size_ < capacity_) return store_[i];
    return store_[(next_ + i) % capacity_];
}

void ReplayBuffer::dump(ckpt::Container& c, const std::string& prefix) const {
    Eigen::MatrixXd meta(2, 1);
    meta << static_cast<double>(capacity_), static_cast<double>(size_);
    c.put_matrix(prefix + ".meta", meta);
    if (size_ == 0) return;
    const auto sd = store_[0].s.size();
    const auto rd = store_[0].r.size();
    Eigen::MatrixXd S(sd, size_), A(2, size_), R(rd, size_), S2(sd, size_);
    for (std::size_t i = 0; i < size_; ++i) {
        const Transition& t = at_fifo(i);
        S.col(i) = t.s;
        A.col(i) = t.a;
        R.col(i) = t.r;
        S2.col(i) = t.s_next;
    }
    c.put_matrix(prefix + ".s", S);
    c.put_matrix(prefix + ".a", A);
    c.put_matrix(prefix + ".r", R);
    c.put_matrix(prefix + ".s_next", S2);
}

ReplayBuffer ReplayBuffer::restore(const ckpt::Container& c, const std::string& prefix) {
    const Eigen::MatrixXd meta = c.get_matrix(prefix + ".meta");
    ReplayBuffer b(static_cast<std::size_t>(meta(0)));
    const auto n = static_cast<std::size_t>(meta(1));
    if (n == 0) return b;
    const auto& S = c.get_matrix(prefix + ".s");
    const auto& A = c.get_matrix(prefix + ".a");
    const auto& R = c.get_matrix(prefix + ".r");
    const auto& S2 = c.get_matrix(prefix + ".s_next");
    for (std::size_t i = 0; i < n; ++i)
        b.push({S.col(i), A.col(i), R.col(i), S2.col(i)});
    return b;
}

}  // namespace iu::replay
