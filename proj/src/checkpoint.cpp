#include "iu/checkpoint.hpp"

#include <cstring>
#include <fstream>

namespace iu::ckpt {

namespace {

constexpr char kMagic[8] = {'I', 'U', 'C', 'K', 'P', 'T', '0', '1'};

void write_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint64_t read_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
}

}  // namespace

void Container::put_matrix(const std::string& name, const Eigen::MatrixXd& m) {
    insert(name, 0).mat = m;
}

void Container::put_scalar(const std::string& name, double v) {
    Eigen::MatrixXd m(1, 1);
    m(0, 0) = v;
    put_matrix(name, m);
}

void Container::put_bytes(const std::string& name, const std::string& bytes) {
    insert(name, 1).bytes = bytes;
}

bool Container::has(const std::string& name) const { return entries_.count(name) > 0; }

const Eigen::MatrixXd& Container::get_matrix(const std::string& name) const {
    return get(name, 0).mat;
}

double Container::get_scalar(const std::string& name) const {
    const Eigen::MatrixXd& m = get_matrix(name);
    if (m.size() != 1) throw IoError("checkpoint: entry '" + name + "' is not a scalar");
    return m(0, 0);
}

const std::string& Container::get_bytes(const std::string& name) const {
    return get(name, 1).bytes;
}

std::vector<std::string> Container::names() const { return order_; }

Container::Entry& Container::insert(const std::string& name, std::uint8_t kind) {
    auto it = entries_.find(name);
    if (it == entries_.end()) {
        order_.push_back(name);
        it = entries_.emplace(name, Entry{}).first;
    }
    it->second.kind = kind;
    return it->second;
}

const Container::Entry& Container::get(const std::string& name, std::uint8_t kind) const {
    auto it = entries_.find(name);
    if (it == entries_.end()) throw IoError("checkpoint: missing entry '" + name + "'");
    if (it->second.kind != kind) throw IoError("checkpoint: entry '" + name + "' has wrong kind");
    return it->second;
}

void Container::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("checkpoint: cannot open '" + path + "' for writing");
    os.write(kMagic, sizeof kMagic);
    write_u64(os, order_.size());
    for (const auto& name : order_) {
        const Entry& e = entries_.at(name);
        write_u64(os, name.size());
        os.write(name.data(), static_cast<std::streamsize>(name.size()));
        os.put(static_cast<char>(e.kind));
        if (e.kind == 0) {
            write_u64(os, static_cast<std::uint64_t>(e.mat.rows()));
            write_u64(os, static_cast<std::uint64_t>(e.mat.cols()));
            os.write(reinterpret_cast<const char*>(e.mat.data()),
                     static_cast<std::streamsize>(sizeof(double) * e.mat.size()));
        } else {
            write_u64(os, e.bytes.size());
            os.write(e.bytes.data(), static_cast<std::streamsize>(e.bytes.size()));
        }
    }
    if (!os) throw IoError("checkpoint: write to '" + path + "' failed");
}

Container Container::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("checkpoint: cannot open '" + path + "'");
    char magic[8];
    is.read(magic, sizeof magic);
    if (!is || std::memcmp(magic, kMagic, sizeof magic) != 0)
        throw IoError("checkpoint: '" + path + "' is not a checkpoint file");
    Container c;
    const std::uint64_t n = read_u64(is);
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::uint64_t name_len = read_u64(is);
        std::string name(name_len, '\0');
        is.read(name.data(), static_cast<std::streamsize>(name_len));
        const int kind = is.get();
        if (kind == 0) {
            const std::uint64_t rows = read_u64(is);
            const std::uint64_t cols = read_u64(is);
            Eigen::MatrixXd m(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(cols));
            is.read(reinterpret_cast<char*>(m.data()),
                    static_cast<std::streamsize>(sizeof(double) * m.size()));
            c.insert(name, 0).mat = std::move(m);
        } else if (kind == 1) {
            const std::uint64_t len = read_u64(is);
            std::string bytes(len, '\0');
            is.read(bytes.data(), static_cast<std::streamsize>(len));
            c.insert(name, 1).bytes = std::move(bytes);
        } else {
            throw IoError("checkpoint: unknown entry kind in '" + path + "'");
        }
        if (!is) throw IoError("checkpoint: truncated file '" + path + "'");
    }
    return c;
}

void put_params(Container& c, const std::string& prefix, const nn::ParamStore& p) {
    for (std::size_t l = 0; l < p.layers.size(); ++l) {
        const std::string base = prefix + "." + std::to_string(l) + ".";
        c.put_matrix(base + "W", p.layers[l].W);
        c.put_matrix(base + "b", p.layers[l].b);
        c.put_matrix(base + "mW", p.adam_m[l].W);
        c.put_matrix(base + "mb", p.adam_m[l].b);
        c.put_matrix(base + "vW", p.adam_v[l].W);
        c.put_matrix(base + "vb", p.adam_v[l].b);
    }
    c.put_scalar(prefix + ".t", static_cast<double>(p.adam_t));
}

nn::ParamStore get_params(const Container& c, const std::string& prefix,
                          const std::vector<nn::LayerSpec>& spec) {
    nn::ParamStore p;
    for (std::size_t l = 0; l < spec.size(); ++l) {
        const std::string base = prefix + "." + std::to_string(l) + ".";
        nn::LayerParams lp{c.get_matrix(base + "W"), c.get_matrix(base + "b").col(0)};
        nn::LayerParams m{c.get_matrix(base + "mW"), c.get_matrix(base + "mb").col(0)};
        nn::LayerParams v{c.get_matrix(base + "vW"), c.get_matrix(base + "vb").col(0)};
        if (lp.W.rows() != spec[l].out_dim || lp.W.cols() != spec[l].in_dim)
            throw IoError("checkpoint: '" + base + "W' does not match the expected layer shape");
        p.layers.push_back(std::move(lp));
        p.adam_m.push_back(std::move(m));
        p.adam_v.push_back(std::move(v));
        p.grads.push_back({Eigen::MatrixXd::Zero(spec[l].out_dim, spec[l].in_dim),
                           Eigen::VectorXd::Zero(spec[l].out_dim)});
    }
    p.adam_t = static_cast<std::int64_t>(c.get_scalar(prefix + ".t"));
    return p;
}

}  // namespace iu::ckpt
